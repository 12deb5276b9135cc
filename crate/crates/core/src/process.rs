//! The K4-free process state machine.
//!
//! Every unordered pair is classified as [`PairClass::Edge`], `Open` or
//! `Closed`. Open pairs live in an indexable array with a reverse position
//! index, so a uniform draw is one integer in `[0, |O(i)|)` and closures are
//! O(1) swap-removes. When an edge `uv` is inserted, the pairs it closes are
//! found by a neighbourhood scan around `Γ(u) ∩ Γ(v)` instead of keeping the
//! per-pair closing sets around.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::{self, BitSet};
use crate::error::{invalid, Error};
use crate::graph::AdjMatrix;
use crate::math;
use crate::pair::{pair_count, Pair};
use crate::rng::{self, StreamRng};
use crate::Result;

/// Largest supported vertex count (pairs are packed into 16-bit halves).
pub const MAX_VERTICES: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum PairClass {
    Edge,
    Open,
    Closed,
}

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct OpenPairs {
    list: Vec<u32>,
    // indexed by `Pair::tri_index`
    pos: Vec<u32>,
}

impl OpenPairs {
    fn full(n: usize) -> Self {
        let total = pair_count(n);
        let mut list = Vec::with_capacity(total);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                list.push(Pair { u, v }.pack());
            }
        }
        let pos = (0..total as u32).collect();
        OpenPairs { list, pos }
    }

    fn remove(&mut self, tri: usize, n: usize) -> bool {
        let at = self.pos[tri];
        if at == ABSENT {
            return false;
        }
        let last = self.list.pop().expect("position index out of sync");
        if (at as usize) < self.list.len() {
            self.list[at as usize] = last;
            self.pos[Pair::unpack(last).tri_index(n)] = at;
        }
        self.pos[tri] = ABSENT;
        true
    }
}

/// Audit record for one closure: adding `via_edge` closed `pair`, and `quad`
/// spans the K4 completed by adding both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureWitness {
    pub pair: Pair,
    pub via_edge: Pair,
    pub quad: [u32; 4],
}

/// One process step as seen by observers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepEvent {
    /// Edge count after this step, i.e. the `i + 1` of `G(i) -> G(i+1)`.
    pub step: usize,
    pub chosen: Pair,
    /// `C_{chosen}(i)`: open pairs closed by inserting `chosen`.
    pub newly_closed: Vec<Pair>,
}

/// Hooks invoked by [`ProcessState::run`].
///
/// `before_commit` sees `G(i)` together with the event describing the move to
/// `G(i+1)`; `after_commit` sees `G(i+1)`.
pub trait StepObserver {
    fn before_commit(&mut self, _pre: &ProcessState, _event: &StepEvent) -> Result<()> {
        Ok(())
    }

    fn after_commit(&mut self, _post: &ProcessState, _event: &StepEvent) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StopRule {
    Termination,
    AfterSteps(usize),
    /// Stop at `i = ⌈t · n²p⌉` with `p = n^{-2/5}`.
    AfterScaledTime(f64),
}

impl StopRule {
    pub fn step_limit(&self, n: usize) -> Option<usize> {
        match *self {
            StopRule::Termination => None,
            StopRule::AfterSteps(m) => Some(m),
            StopRule::AfterScaledTime(t) => Some(math::ceil_tol(t * time_unit(n)) as usize),
        }
    }
}

/// `n² p = n^{8/5}`: the number of steps in one unit of scaled time.
pub fn time_unit(n: usize) -> f64 {
    math::powf(n as f64, 1.6)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub seed: u64,
    pub run_index: u64,
    pub steps: usize,
    pub max_degree: usize,
    pub min_degree: usize,
    pub open_remaining: usize,
    pub terminated: bool,
    /// Filled in by callers that can read a clock.
    pub elapsed_secs: Option<f64>,
}

/// The evolving graph `G(i)` and the edge/open/closed partition of its pairs.
#[derive(Clone, Debug)]
pub struct ProcessState {
    n: usize,
    seed: u64,
    run_index: u64,
    step: usize,
    adj: AdjMatrix,
    class: Vec<PairClass>,
    open: OpenPairs,
    rng: StreamRng,
    history: Vec<Pair>,
}

impl ProcessState {
    /// Empty graph on `n` vertices with every pair open.
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Self::with_stream(n, seed, 0)
    }

    /// Like [`ProcessState::new`], drawing from stream `run_index` of
    /// `master_seed`.
    pub fn with_stream(n: usize, master_seed: u64, run_index: u64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("need at least 2 vertices, got {n}")));
        }
        if n > MAX_VERTICES {
            return Err(invalid(format!(
                "at most {MAX_VERTICES} vertices supported"
            )));
        }
        Ok(ProcessState {
            n,
            seed: master_seed,
            run_index,
            step: 0,
            adj: AdjMatrix::new(n),
            class: vec![PairClass::Open; pair_count(n)],
            open: OpenPairs::full(n),
            rng: rng::stream(master_seed, run_index),
            history: Vec::new(),
        })
    }

    /// Rebuilds a state by inserting `edges` in order. Every edge must be open
    /// when its turn comes, which holds for any prefix of a process history
    /// and, more generally, for any K4-free edge list.
    pub fn from_history(n: usize, seed: u64, edges: &[Pair]) -> Result<Self> {
        let mut s = Self::new(n, seed)?;
        for &e in edges {
            if e.v as usize >= n {
                return Err(invalid(format!("edge {e} out of range for n={n}")));
            }
            s.insert(e)?;
        }
        Ok(s)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn run_index(&self) -> u64 {
        self.run_index
    }

    /// Number of edges added so far (`i`).
    #[inline]
    pub fn step_index(&self) -> usize {
        self.step
    }

    /// `t = i / (n² p)`.
    pub fn scaled_time(&self) -> f64 {
        self.step as f64 / time_unit(self.n)
    }

    #[inline]
    pub fn class(&self, p: Pair) -> PairClass {
        self.class[p.tri_index(self.n)]
    }

    #[inline]
    pub fn class_of(&self, a: u32, b: u32) -> PairClass {
        self.class(Pair::new(a, b))
    }

    #[inline]
    pub fn adjacency(&self) -> &AdjMatrix {
        &self.adj
    }

    #[inline]
    pub fn open_count(&self) -> usize {
        self.open.list.len()
    }

    pub fn open_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.open.list.iter().map(|&x| Pair::unpack(x))
    }

    /// Open pair at position `i` of the sampling array.
    pub fn open_pair_at(&self, i: usize) -> Pair {
        Pair::unpack(self.open.list[i])
    }

    pub fn is_open_listed(&self, p: Pair) -> bool {
        self.open.pos[p.tri_index(self.n)] != ABSENT
    }

    pub fn is_terminated(&self) -> bool {
        self.open.list.is_empty()
    }

    /// Edges in insertion order.
    pub fn history(&self) -> &[Pair] {
        &self.history
    }

    /// The process stream, for callers that need to inspect its position.
    pub fn rng_mut(&mut self) -> &mut StreamRng {
        &mut self.rng
    }

    /// `C_e(i)`: the open pairs `xy` such that adding both `e` and `xy`
    /// creates a K4 containing both. Defined for open and closed `e`.
    pub fn closed_by(&self, e: Pair) -> Result<Vec<Pair>> {
        self.check_range(e)?;
        if self.class(e) == PairClass::Edge {
            return Err(Error::AlreadyEdge(e));
        }
        let (u, v) = (e.u as usize, e.v as usize);
        let common = self.adj.common_neighbors(u, v);
        if common.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        // xy inside Γ(u) ∩ Γ(v)
        let members: Vec<usize> = common.iter().collect();
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                if self.class_of(x as u32, y as u32) == PairClass::Open {
                    out.push(Pair::new(x as u32, y as u32));
                }
            }
        }
        // uy with y ∈ Γ(v) and Γ(u) ∩ Γ(v) ∩ Γ(y) ≠ ∅, and symmetrically vy
        let mut reach = BitSet::new(self.n);
        for &z in &members {
            reach.union_with(self.adj.row(z));
        }
        for (anchor, other) in [(u, v), (v, u)] {
            let row = self.adj.row(other);
            for (wi, (a, b)) in row.iter().zip(reach.words()).enumerate() {
                let mut w = a & b;
                while w != 0 {
                    let y = wi * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    if self.class_of(anchor as u32, y as u32) == PairClass::Open {
                        out.push(Pair::new(anchor as u32, y as u32));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Would adding both non-edges `e` and `f` create a K4 containing both?
    /// Equivalently `f ∈ C_e(i)` when `f` is open.
    pub fn closes_with(&self, e: Pair, f: Pair) -> bool {
        if e == f {
            return false;
        }
        let g = &self.adj;
        match e.shared_vertex(&f) {
            None => {
                g.has_edge(e.u, f.u)
                    && g.has_edge(e.u, f.v)
                    && g.has_edge(e.v, f.u)
                    && g.has_edge(e.v, f.v)
            }
            Some(x) => {
                let o = e.other(x);
                let y = f.other(x);
                g.has_edge(o, y)
                    && bitset::any_and3(g.row(x as usize), g.row(o as usize), g.row(y as usize))
            }
        }
    }

    /// Witness that `pair ∈ C_{via_edge}(i)`, if it is.
    pub fn closure_witness(&self, via_edge: Pair, pair: Pair) -> Option<ClosureWitness> {
        if !self.closes_with(via_edge, pair) {
            return None;
        }
        let mut quad = match via_edge.shared_vertex(&pair) {
            None => [via_edge.u, via_edge.v, pair.u, pair.v],
            Some(x) => {
                let o = via_edge.other(x);
                let y = pair.other(x);
                let g = &self.adj;
                let z = (0..g.words_len())
                    .find_map(|w| {
                        let bits =
                            g.row(x as usize)[w] & g.row(o as usize)[w] & g.row(y as usize)[w];
                        (bits != 0).then(|| (w * 64 + bits.trailing_zeros() as usize) as u32)
                    })
                    .expect("closes_with guarantees a common neighbour");
                [x, o, y, z]
            }
        };
        quad.sort_unstable();
        Some(ClosureWitness {
            pair,
            via_edge,
            quad,
        })
    }

    /// Uniformly random open pair, or `None` once the process has terminated.
    pub fn draw(&mut self) -> Option<Pair> {
        let len = self.open.list.len();
        if len == 0 {
            return None;
        }
        let i = self.rng.gen_range(0..len);
        Some(Pair::unpack(self.open.list[i]))
    }

    /// Builds the event for inserting the open pair `chosen` into `G(i)`.
    pub fn prepare(&self, chosen: Pair) -> Result<StepEvent> {
        self.check_range(chosen)?;
        match self.class(chosen) {
            PairClass::Open => {}
            PairClass::Edge => return Err(Error::AlreadyEdge(chosen)),
            PairClass::Closed => {
                return Err(invalid(format!(
                    "pair {chosen} is closed and cannot be added"
                )))
            }
        }
        Ok(StepEvent {
            step: self.step + 1,
            chosen,
            newly_closed: self.closed_by(chosen)?,
        })
    }

    /// Applies a prepared event. The event must come from [`ProcessState::prepare`]
    /// on this exact state.
    pub fn commit(&mut self, event: &StepEvent) {
        debug_assert_eq!(event.step, self.step + 1);
        let n = self.n;
        let t = event.chosen.tri_index(n);
        self.class[t] = PairClass::Edge;
        self.open.remove(t, n);
        self.adj.add_edge(event.chosen);
        for p in &event.newly_closed {
            let t = p.tri_index(n);
            self.class[t] = PairClass::Closed;
            self.open.remove(t, n);
        }
        self.history.push(event.chosen);
        self.step += 1;
    }

    /// Inserts a specific open pair (used for replays and hand-built graphs).
    pub fn insert(&mut self, chosen: Pair) -> Result<StepEvent> {
        let ev = self.prepare(chosen)?;
        self.commit(&ev);
        Ok(ev)
    }

    /// One uniformly random step. Returns [`Error::Terminated`] when no open
    /// pair remains.
    pub fn step(&mut self) -> Result<StepEvent> {
        let chosen = self.draw().ok_or(Error::Terminated)?;
        self.insert(chosen)
    }

    /// Runs until `stop` (or termination), calling every observer around
    /// every step.
    pub fn run(
        &mut self,
        stop: StopRule,
        observers: &mut [&mut dyn StepObserver],
    ) -> Result<RunSummary> {
        let limit = stop.step_limit(self.n);
        loop {
            if limit.is_some_and(|l| self.step >= l) {
                break;
            }
            let Some(chosen) = self.draw() else { break };
            let event = self.prepare(chosen)?;
            for obs in observers.iter_mut() {
                obs.before_commit(self, &event)
                    .map_err(|e| wrap(event.step, e))?;
            }
            self.commit(&event);
            for obs in observers.iter_mut() {
                obs.after_commit(self, &event)
                    .map_err(|e| wrap(event.step, e))?;
            }
        }
        Ok(self.summary())
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            n: self.n,
            seed: self.seed,
            run_index: self.run_index,
            steps: self.step,
            max_degree: self.adj.max_degree(),
            min_degree: self.adj.min_degree(),
            open_remaining: self.open_count(),
            terminated: self.is_terminated(),
            elapsed_secs: None,
        }
    }

    fn check_range(&self, p: Pair) -> Result<()> {
        if p.v as usize >= self.n {
            return Err(invalid(format!("pair {p} out of range for n={}", self.n)));
        }
        Ok(())
    }
}

fn wrap(step: usize, e: Error) -> Error {
    match e {
        Error::Observer { .. } => e,
        other => Error::Observer {
            step,
            message: format!("{other}"),
        },
    }
}

/// Exhaustive closure test: does some 4-set containing `u, v` become a K4
/// once `uv` is added? `O(n²)`; meant as a test oracle.
pub fn is_closed_oracle(g: &AdjMatrix, uv: Pair) -> Result<bool> {
    if g.has_edge(uv.u, uv.v) {
        return Err(Error::AlreadyEdge(uv));
    }
    let n = g.n() as u32;
    let (u, v) = (uv.u, uv.v);
    for w in 0..n {
        if w == u || w == v || !g.has_edge(u, w) || !g.has_edge(v, w) {
            continue;
        }
        for x in w + 1..n {
            if x != u && x != v && g.has_edge(u, x) && g.has_edge(v, x) && g.has_edge(w, x) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
