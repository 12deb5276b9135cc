//! Configuration-attached triple ledgers.
//!
//! A configuration `Σ = (U, (A, B, C))` anchors three families of triples
//! `(u, v, w) ∈ A × B × C`: open (all three pairs open), intermediate (`uv`,
//! `vw` open and `uw` an edge) and partial (`uw`, `vw` edges, `uv` not an
//! edge, governed by inductive add/remove/ignore rules). The tracker updates
//! all three per step, evaluating every rule in `G(i)`, and latches the bad
//! events `B1`–`B3`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bitset::{self, BitSet};
use crate::error::{invalid, Error};
use crate::graph::AdjMatrix;
use crate::pair::Pair;
use crate::params::ParamSet;
use crate::process::{PairClass, ProcessState, StepEvent, StepObserver};
use crate::Result;

/// `Σ = (U, (A, B, C))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    #[serde(rename = "U")]
    pub u_set: Vec<u32>,
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    #[serde(rename = "B")]
    pub b: Vec<u32>,
    #[serde(rename = "C")]
    pub c: Vec<u32>,
}

impl Configuration {
    pub fn new(u_set: Vec<u32>, a: Vec<u32>, b: Vec<u32>, c: Vec<u32>) -> Result<Self> {
        let s = Configuration { u_set, a, b, c };
        s.check_shape()?;
        Ok(s)
    }

    /// Configuration with `U = A ∪ B ∪ C`.
    pub fn from_parts(a: Vec<u32>, b: Vec<u32>, c: Vec<u32>) -> Result<Self> {
        let mut u: Vec<u32> = a.iter().chain(&b).chain(&c).copied().collect();
        u.sort_unstable();
        Self::new(u, a, b, c)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// `K = A ∪ B ∪ C`.
    pub fn k_vertices(&self) -> Vec<u32> {
        self.a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .copied()
            .collect()
    }

    fn check_shape(&self) -> Result<()> {
        let k = self.a.len();
        if k == 0 || self.b.len() != k || self.c.len() != k {
            return Err(invalid(format!(
                "A, B, C must be non-empty and equally sized (got {}, {}, {})",
                self.a.len(),
                self.b.len(),
                self.c.len()
            )));
        }
        let mut u = self.u_set.clone();
        u.sort_unstable();
        if u.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("U contains a repeated vertex"));
        }
        let mut kv = self.k_vertices();
        kv.sort_unstable();
        if kv.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("A, B, C are not pairwise disjoint"));
        }
        if kv.iter().any(|x| u.binary_search(x).is_err()) {
            return Err(invalid("A ∪ B ∪ C is not contained in U"));
        }
        Ok(())
    }

    /// Shape checks plus every vertex below `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.check_shape()?;
        if let Some(&x) = self.u_set.iter().find(|&&x| x as usize >= n) {
            return Err(invalid(format!("vertex {x} out of range for n={n}")));
        }
        Ok(())
    }
}

/// Effective thresholds of the removal rules and bad events. At desk scale
/// several of these fall below 1, which makes the corresponding rule fire on
/// any non-empty witness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `k p n^{-20ε}` (R2, R3b and B2's common-neighbour bound).
    pub codeg_small: f64,
    /// `p^{-1} n^{-15ε}` (R3a).
    pub k_degree_small: f64,
    /// `k p n^{5ε}` (B1).
    pub b1_degree: f64,
    /// `k n^{-20ε}` (B2's pair count).
    pub b2_count: f64,
    /// `k² p n^{-15ε}` (B3).
    pub b3_quadruples: f64,
}

impl Thresholds {
    pub fn new(params: &ParamSet, k: usize) -> Self {
        let kf = k as f64;
        let e = params.epsilon;
        let p = params.p;
        Thresholds {
            codeg_small: kf * p * params.n_pow(-20.0 * e),
            k_degree_small: params.n_pow(-15.0 * e) / p,
            b1_degree: kf * p * params.n_pow(5.0 * e),
            b2_count: kf * params.n_pow(-20.0 * e),
            b3_quadruples: kf * kf * p * params.n_pow(-15.0 * e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum TripleStatus {
    Open,
    Interm,
    Partial,
    /// Left the ledgers; never comes back.
    Gone,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCounters {
    pub promoted: usize,
    pub removed_open: usize,
    pub removed_interm: usize,
    pub added: usize,
    pub removed_case1: usize,
    #[serde(rename = "removed_R2")]
    pub removed_r2: usize,
    #[serde(rename = "removed_R3a")]
    pub removed_r3a: usize,
    #[serde(rename = "removed_R3b")]
    pub removed_r3b: usize,
    #[serde(rename = "ignored_I2")]
    pub ignored_i2: usize,
    #[serde(rename = "ignored_I3")]
    pub ignored_i3: usize,
    /// Additions for an `(u, v)` that had already left the partial ledger.
    /// Expected to stay zero.
    pub reentries: usize,
}

/// Latched bad events with the step at which each was first observed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadEventStatus {
    pub b1: bool,
    pub b2: bool,
    pub b3: bool,
    pub b1_step: Option<usize>,
    pub b2_step: Option<usize>,
    pub b3_step: Option<usize>,
}

impl BadEventStatus {
    pub fn any(&self) -> bool {
        self.b1 || self.b2 || self.b3
    }

    /// Earliest step at which any event latched.
    pub fn first_step(&self) -> Option<usize> {
        [self.b1_step, self.b2_step, self.b3_step]
            .into_iter()
            .flatten()
            .min()
    }

    fn latch(&mut self, snap: &BadEventSnapshot, step: usize) {
        if snap.b1 && !self.b1 {
            self.b1 = true;
            self.b1_step = Some(step);
        }
        if snap.b2 && !self.b2 {
            self.b2 = true;
            self.b2_step = Some(step);
        }
        if snap.b3 && !self.b3 {
            self.b3 = true;
            self.b3_step = Some(step);
        }
    }
}

/// Unlatched evaluation of the bad-event definitions on one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadEventSnapshot {
    pub max_degree_in_k: usize,
    /// Pairs `xy` with `min(|Γx∩Γy∩A|, |Γx∩Γy∩B|) ≥ k p n^{-20ε}`.
    pub b2_pairs: usize,
    pub xi_total: usize,
    /// Largest number of `Ξ` quadruples sharing one pair.
    pub xi_pair_max: usize,
    pub b1: bool,
    pub b2: bool,
    pub b3: bool,
}

/// `Ξ_Σ`: quadruples `(u, v, w, z) ∈ A × B × C × [n]` with `z ∉ {u, v, w}`
/// and `uw, zu, zv, zw` all edges. Enumerated from the `A × C` edges through
/// their common neighbours.
pub fn xi_quadruples(g: &AdjMatrix, sigma: &Configuration) -> Vec<[u32; 4]> {
    let b_bits = BitSet::from_iter_n(g.n(), sigma.b.iter().map(|&x| x as usize));
    let mut out = Vec::new();
    for &u in &sigma.a {
        for &w in &sigma.c {
            if !g.has_edge(u, w) {
                continue;
            }
            let common = g.common_neighbors(u as usize, w as usize);
            for z in common.iter() {
                for (wi, (&r, &b)) in g.row(z).iter().zip(b_bits.words()).enumerate() {
                    let mut bits = r & b;
                    while bits != 0 {
                        let v = (wi * 64 + bits.trailing_zeros() as usize) as u32;
                        bits &= bits - 1;
                        out.push([u, v, w, z as u32]);
                    }
                }
            }
        }
    }
    out
}

/// How many quadruples of `quads` use each pair among `uw, zu, zv, zw`.
pub fn xi_pair_loads(quads: &[[u32; 4]]) -> BTreeMap<Pair, usize> {
    let mut load = BTreeMap::new();
    for &[u, v, w, z] in quads {
        for e in [
            Pair::new(u, w),
            Pair::new(z, u),
            Pair::new(z, v),
            Pair::new(z, w),
        ] {
            *load.entry(e).or_insert(0) += 1;
        }
    }
    load
}

/// Number of pairs `xy` whose common neighbourhood meets both `A` and `B`
/// in at least `threshold` vertices.
pub fn count_codegree_pairs(g: &AdjMatrix, a: &[u32], b: &[u32], threshold: f64) -> usize {
    let n = g.n();
    if threshold <= 0.0 {
        return n * (n - 1) / 2;
    }
    let tally = |side: &[u32]| -> Vec<(u32, u32)> {
        let mut packed: Vec<u32> = Vec::new();
        for &s in side {
            let nb: Vec<usize> = g.neighbors(s as usize).collect();
            for (i, &x) in nb.iter().enumerate() {
                for &y in &nb[i + 1..] {
                    packed.push(Pair::new(x as u32, y as u32).pack());
                }
            }
        }
        packed.sort_unstable();
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for x in packed {
            match runs.last_mut() {
                Some((p, c)) if *p == x => *c += 1,
                _ => runs.push((x, 1)),
            }
        }
        runs
    };
    let ta = tally(a);
    let tb = tally(b);
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < ta.len() && j < tb.len() {
        match ta[i].0.cmp(&tb[j].0) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                if (ta[i].1.min(tb[j].1) as f64) >= threshold {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Evaluates `B1`–`B3` on `g` from scratch.
pub fn bad_event_snapshot(
    g: &AdjMatrix,
    sigma: &Configuration,
    thr: &Thresholds,
) -> BadEventSnapshot {
    let k_bits = BitSet::from_iter_n(g.n(), sigma.k_vertices().into_iter().map(|x| x as usize));
    let max_degree_in_k = k_bits
        .iter()
        .map(|v| g.degree_into(v, &k_bits))
        .max()
        .unwrap_or(0);
    let b2_pairs = count_codegree_pairs(g, &sigma.a, &sigma.b, thr.codeg_small);
    let quads = xi_quadruples(g, sigma);
    let xi_pair_max = xi_pair_loads(&quads).values().copied().max().unwrap_or(0);
    BadEventSnapshot {
        max_degree_in_k,
        b2_pairs,
        xi_total: quads.len(),
        xi_pair_max,
        b1: max_degree_in_k as f64 > thr.b1_degree,
        b2: b2_pairs as f64 > thr.b2_count,
        b3: xi_pair_max as f64 > thr.b3_quadruples,
    }
}

/// `|T_U(i)|`: open pairs inside `U` that close a triangle inside `U`.
pub fn t_u_count(state: &ProcessState, u_set: &[u32]) -> usize {
    let g = state.adjacency();
    let bits = BitSet::from_iter_n(g.n(), u_set.iter().map(|&x| x as usize));
    let members: Vec<usize> = bits.iter().collect();
    let mut count = 0;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if state.class_of(a as u32, b as u32) == PairClass::Open
                && bitset::any_and3(g.row(a), g.row(b), bits.words())
            {
                count += 1;
            }
        }
    }
    count
}

/// Ledger sizes at one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    pub open: usize,
    pub interm: usize,
    pub partial: usize,
    pub partial_open: usize,
    pub b1: bool,
    pub b2: bool,
    pub b3: bool,
}

/// Per-step changes `(Y⁺, Y⁻)` of the three ledgers: triples entering and
/// leaving each set in the move from `G(i)` to `G(i+1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub step: usize,
    pub open_plus: usize,
    pub open_minus: usize,
    pub interm_plus: usize,
    pub interm_minus: usize,
    pub partial_plus: usize,
    pub partial_minus: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct TrackerOptions {
    /// Steps between full `B2`/`B3` scans; `None` means `max(1, m/200)`.
    pub check_interval: Option<usize>,
    /// Record a [`LedgerRow`] every this many steps (and at step 0).
    pub row_stride: Option<usize>,
    /// Keep every [`Transition`].
    pub record_transitions: bool,
    /// Replaces the thresholds derived from the parameters.
    pub thresholds: Option<Thresholds>,
}

const NONE: u32 = u32::MAX;
const ROLE_NONE: u8 = 0;
const ROLE_A: u8 = 1;
const ROLE_B: u8 = 2;
const ROLE_C: u8 = 3;

enum PartialFate {
    Case1,
    R2,
    I2,
    R3a,
    R3b,
    I3,
}

/// Ledgers for one configuration, driven by the process step by step.
#[derive(Clone, Debug)]
pub struct TripleTracker {
    sigma: Configuration,
    k: usize,
    time_unit: f64,
    thr: Thresholds,
    role: Vec<u8>,
    slot: Vec<u32>,
    k_bits: BitSet,
    a_bits: BitSet,
    b_bits: BitSet,
    status: Vec<TripleStatus>,
    partial_by_pair: Vec<u32>,
    retired_pair: Vec<bool>,
    open_n: usize,
    interm_n: usize,
    partial_n: usize,
    counters: LedgerCounters,
    bad: BadEventStatus,
    deg_in_k: Vec<u32>,
    check_interval: usize,
    row_stride: Option<usize>,
    record_transitions: bool,
    next_step: usize,
    last_check: Option<usize>,
    rows: Vec<LedgerRow>,
    transitions: Vec<Transition>,
}

impl TripleTracker {
    /// Attaches to a state at step 0.
    pub fn attach(
        state: &ProcessState,
        sigma: Configuration,
        params: &ParamSet,
        options: TrackerOptions,
    ) -> Result<Self> {
        if state.step_index() != 0 {
            return Err(invalid(
                "tracker must attach at step 0; use TripleTracker::rebuild for a running state",
            ));
        }
        if params.n != state.n() {
            return Err(invalid(format!(
                "parameters are for n={} but the state has n={}",
                params.n,
                state.n()
            )));
        }
        sigma.validate(state.n())?;
        let n = state.n();
        let k = sigma.k();
        let mut role = vec![ROLE_NONE; n];
        let mut slot = vec![NONE; n];
        for (r, set) in [(ROLE_A, &sigma.a), (ROLE_B, &sigma.b), (ROLE_C, &sigma.c)] {
            for (i, &x) in set.iter().enumerate() {
                role[x as usize] = r;
                slot[x as usize] = i as u32;
            }
        }
        let bits = |s: &[u32]| BitSet::from_iter_n(n, s.iter().map(|&x| x as usize));
        let mut t = TripleTracker {
            k,
            time_unit: params.time_unit(),
            thr: options
                .thresholds
                .unwrap_or_else(|| Thresholds::new(params, k)),
            role,
            slot,
            k_bits: bits(&sigma.k_vertices()),
            a_bits: bits(&sigma.a),
            b_bits: bits(&sigma.b),
            status: vec![TripleStatus::Open; k * k * k],
            partial_by_pair: vec![NONE; k * k],
            retired_pair: vec![false; k * k],
            open_n: k * k * k,
            interm_n: 0,
            partial_n: 0,
            counters: LedgerCounters::default(),
            bad: BadEventStatus::default(),
            deg_in_k: vec![0; n],
            check_interval: options
                .check_interval
                .unwrap_or((params.m / 200).max(1))
                .max(1),
            row_stride: options.row_stride,
            record_transitions: options.record_transitions,
            next_step: 0,
            last_check: None,
            rows: Vec::new(),
            transitions: Vec::new(),
            sigma,
        };
        t.check_bad_events(state);
        if t.row_stride.is_some() {
            t.push_row(state);
        }
        Ok(t)
    }

    /// Builds a tracker for a running state by replaying its history from
    /// the empty graph.
    pub fn rebuild(
        state: &ProcessState,
        sigma: Configuration,
        params: &ParamSet,
        options: TrackerOptions,
    ) -> Result<Self> {
        let mut replay = ProcessState::with_stream(state.n(), state.seed(), state.run_index())?;
        let mut t = Self::attach(&replay, sigma, params, options)?;
        for &e in state.history() {
            let ev = replay.prepare(e)?;
            t.on_step(&replay, &ev)?;
            replay.commit(&ev);
            t.after_step(&replay, &ev)?;
        }
        Ok(t)
    }

    pub fn configuration(&self) -> &Configuration {
        &self.sigma
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thr
    }

    pub fn counters(&self) -> &LedgerCounters {
        &self.counters
    }

    pub fn bad_events(&self) -> &BadEventStatus {
        &self.bad
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// `(|Open|, |Interm|, |Partial|, |PartialOpen|)` against `state`'s
    /// current pair classes.
    pub fn counts(&self, state: &ProcessState) -> (usize, usize, usize, usize) {
        (
            self.open_n,
            self.interm_n,
            self.partial_n,
            self.partial_open(state),
        )
    }

    fn partial_open(&self, state: &ProcessState) -> usize {
        self.partial_pairs()
            .filter(|&(u, v, _)| state.class_of(u, v) == PairClass::Open)
            .count()
    }

    pub fn status(&self, u: u32, v: u32, w: u32) -> Option<TripleStatus> {
        let (ru, rv, rw) = (
            self.role[u as usize],
            self.role[v as usize],
            self.role[w as usize],
        );
        if ru != ROLE_A || rv != ROLE_B || rw != ROLE_C {
            return None;
        }
        Some(
            self.status[self.idx(
                self.slot[u as usize],
                self.slot[v as usize],
                self.slot[w as usize],
            )],
        )
    }

    /// Triples currently in `status`, as vertex ids, in `A × B × C` order.
    pub fn triples(&self, status: TripleStatus) -> Vec<(u32, u32, u32)> {
        let k = self.k;
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if self.status[(i * k + j) * k + l] == status {
                        out.push((self.sigma.a[i], self.sigma.b[j], self.sigma.c[l]));
                    }
                }
            }
        }
        out
    }

    /// The `w` with `(u, v, w)` partial, if any.
    pub fn partial_for(&self, u: u32, v: u32) -> Option<u32> {
        if self.role[u as usize] != ROLE_A || self.role[v as usize] != ROLE_B {
            return None;
        }
        let l = self.partial_by_pair
            [self.slot[u as usize] as usize * self.k + self.slot[v as usize] as usize];
        (l != NONE).then(|| self.sigma.c[l as usize])
    }

    /// Has `(u, v)` ever held a partial triple that later left?
    pub fn pair_retired(&self, u: u32, v: u32) -> bool {
        self.role[u as usize] == ROLE_A
            && self.role[v as usize] == ROLE_B
            && self.retired_pair
                [self.slot[u as usize] as usize * self.k + self.slot[v as usize] as usize]
    }

    fn partial_pairs(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        let k = self.k;
        self.partial_by_pair
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != NONE)
            .map(move |(ij, &l)| {
                (
                    self.sigma.a[ij / k],
                    self.sigma.b[ij % k],
                    self.sigma.c[l as usize],
                )
            })
    }

    #[inline]
    fn idx(&self, i: u32, j: u32, l: u32) -> usize {
        (i as usize * self.k + j as usize) * self.k + l as usize
    }

    /// Slots `(a, b, c)` of the endpoints when `p` joins two different parts,
    /// with the third slot `NONE`.
    fn split(&self, p: Pair) -> Option<(u8, u32, u32)> {
        let (ru, rv) = (self.role[p.u as usize], self.role[p.v as usize]);
        let (su, sv) = (self.slot[p.u as usize], self.slot[p.v as usize]);
        match (ru, rv) {
            (ROLE_A, ROLE_B) => Some((0, su, sv)),
            (ROLE_B, ROLE_A) => Some((0, sv, su)),
            (ROLE_B, ROLE_C) => Some((1, su, sv)),
            (ROLE_C, ROLE_B) => Some((1, sv, su)),
            (ROLE_A, ROLE_C) => Some((2, su, sv)),
            (ROLE_C, ROLE_A) => Some((2, sv, su)),
            _ => None,
        }
    }

    /// Triple indices containing the split pair: kind 0 is `uv`, 1 is `vw`,
    /// 2 is `uw`.
    fn triples_through(&self, kind: u8, s: u32, t: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.k as u32).map(move |x| match kind {
            0 => self.idx(s, t, x),
            1 => self.idx(x, s, t),
            _ => self.idx(s, x, t),
        })
    }

    /// Applies one step's ledger rules. `pre` is `G(i)` and `event` the move
    /// to `G(i+1)`; nothing is committed yet.
    pub fn on_step(&mut self, pre: &ProcessState, event: &StepEvent) -> Result<Transition> {
        if pre.step_index() != self.next_step || event.step != self.next_step + 1 {
            return Err(Error::StateCorruption(format!(
                "tracker expected step {} but saw state at step {} with event {}",
                self.next_step,
                pre.step_index(),
                event.step
            )));
        }
        let mut tr = Transition {
            step: event.step,
            ..Transition::default()
        };
        let chosen = event.chosen;

        // Open/intermediate removals caused by closures. A closed pair never
        // is `uw` of an intermediate triple (that pair is an edge).
        for &p in &event.newly_closed {
            if let Some((kind, s, t)) = self.split(p) {
                let ids: Vec<usize> = self.triples_through(kind, s, t).collect();
                for id in ids {
                    match self.status[id] {
                        TripleStatus::Open => {
                            self.status[id] = TripleStatus::Gone;
                            self.open_n -= 1;
                            tr.open_minus += 1;
                            self.counters.removed_open += 1;
                        }
                        TripleStatus::Interm if kind != 2 => {
                            self.status[id] = TripleStatus::Gone;
                            self.interm_n -= 1;
                            tr.interm_minus += 1;
                            self.counters.removed_interm += 1;
                        }
                        _ => {}
                    }
                }
            }
        }

        // Partial removals are decided on the pre-step partial set before
        // any addition below.
        let mut fates: Vec<(usize, PartialFate)> = Vec::new();
        for (ij, &l) in self.partial_by_pair.iter().enumerate() {
            if l == NONE {
                continue;
            }
            let (u, v) = (self.sigma.a[ij / self.k], self.sigma.b[ij % self.k]);
            let uv = Pair::new(u, v);
            if chosen == uv {
                fates.push((ij, PartialFate::Case1));
            } else if pre.closes_with(uv, chosen) {
                fates.push((ij, self.judge_closing(pre, uv, chosen)));
            }
        }

        if let Some((kind, s, t)) = self.split(chosen) {
            let ids: Vec<usize> = self.triples_through(kind, s, t).collect();
            for (x, id) in ids.into_iter().enumerate() {
                match (kind, self.status[id]) {
                    // uw: still-open uv and vw promote the triple
                    (2, TripleStatus::Open) => {
                        self.status[id] = TripleStatus::Interm;
                        self.open_n -= 1;
                        self.interm_n += 1;
                        tr.open_minus += 1;
                        tr.interm_plus += 1;
                        self.counters.promoted += 1;
                    }
                    (_, TripleStatus::Open) => {
                        self.status[id] = TripleStatus::Gone;
                        self.open_n -= 1;
                        tr.open_minus += 1;
                        self.counters.removed_open += 1;
                    }
                    (0, TripleStatus::Interm) => {
                        self.status[id] = TripleStatus::Gone;
                        self.interm_n -= 1;
                        tr.interm_minus += 1;
                        self.counters.removed_interm += 1;
                    }
                    // vw: uv is open here (closures were handled above), so
                    // uv ∉ C_vw(i); add unless (u, v) already has a partner
                    (1, TripleStatus::Interm) => {
                        self.interm_n -= 1;
                        tr.interm_minus += 1;
                        let ij = x * self.k + s as usize;
                        if self.partial_by_pair[ij] == NONE {
                            self.status[id] = TripleStatus::Partial;
                            self.partial_by_pair[ij] = t;
                            self.partial_n += 1;
                            tr.partial_plus += 1;
                            self.counters.added += 1;
                            if self.retired_pair[ij] {
                                self.counters.reentries += 1;
                            }
                        } else {
                            self.status[id] = TripleStatus::Gone;
                            self.counters.removed_interm += 1;
                        }
                    }
                    _ => {}
                }
            }
        }

        for (ij, fate) in fates {
            let remove = match fate {
                PartialFate::Case1 => {
                    self.counters.removed_case1 += 1;
                    true
                }
                PartialFate::R2 => {
                    self.counters.removed_r2 += 1;
                    true
                }
                PartialFate::R3a => {
                    self.counters.removed_r3a += 1;
                    true
                }
                PartialFate::R3b => {
                    self.counters.removed_r3b += 1;
                    true
                }
                PartialFate::I2 => {
                    self.counters.ignored_i2 += 1;
                    false
                }
                PartialFate::I3 => {
                    self.counters.ignored_i3 += 1;
                    false
                }
            };
            if remove {
                let l = self.partial_by_pair[ij];
                let id = ij * self.k + l as usize;
                self.status[id] = TripleStatus::Gone;
                self.partial_by_pair[ij] = NONE;
                self.retired_pair[ij] = true;
                self.partial_n -= 1;
                tr.partial_minus += 1;
            }
        }

        self.next_step += 1;
        if self.record_transitions {
            self.transitions.push(tr);
        }
        Ok(tr)
    }

    /// Case 2 / Case 3 decision for a partial triple on `uv` when `chosen`
    /// lies in `C_uv(i)`.
    fn judge_closing(&self, pre: &ProcessState, uv: Pair, chosen: Pair) -> PartialFate {
        let g = pre.adjacency();
        match uv.shared_vertex(&chosen) {
            None => {
                let (x, y) = (chosen.u as usize, chosen.v as usize);
                let in_a = bitset::count_and3(g.row(x), g.row(y), self.a_bits.words());
                let in_b = bitset::count_and3(g.row(x), g.row(y), self.b_bits.words());
                if (in_a.min(in_b) as f64) <= self.thr.codeg_small {
                    PartialFate::R2
                } else {
                    PartialFate::I2
                }
            }
            Some(x) => {
                let o = uv.other(x) as usize;
                let y = chosen.other(x) as usize;
                let kw = self.k_bits.words();
                if (bitset::count_and(g.row(y), kw) as f64) <= self.thr.k_degree_small {
                    return PartialFate::R3a;
                }
                let witness = bitset::ones(g.row(x as usize))
                    .filter(|&z| bitset::test_bit(g.row(y), z))
                    .any(|z| {
                        bitset::test_bit(g.row(y), o)
                            && bitset::test_bit(g.row(z), o)
                            && self.k_bits.contains(o)
                            && (bitset::count_and3(g.row(y), g.row(z), kw) as f64)
                                <= self.thr.codeg_small
                    });
                if witness {
                    PartialFate::R3b
                } else {
                    PartialFate::I3
                }
            }
        }
    }

    /// Post-commit bookkeeping: `B1` every step, `B2`/`B3` at the check
    /// interval, ledger rows at the row stride.
    pub fn after_step(&mut self, post: &ProcessState, event: &StepEvent) -> Result<()> {
        let c = event.chosen;
        if self.k_bits.contains(c.u as usize) && self.k_bits.contains(c.v as usize) {
            for x in [c.u, c.v] {
                self.deg_in_k[x as usize] += 1;
                if !self.bad.b1 && self.deg_in_k[x as usize] as f64 > self.thr.b1_degree {
                    self.bad.b1 = true;
                    self.bad.b1_step = Some(event.step);
                }
            }
        }
        if event.step.is_multiple_of(self.check_interval) {
            self.check_bad_events(post);
        }
        if let Some(stride) = self.row_stride {
            if event.step.is_multiple_of(stride.max(1)) {
                self.push_row(post);
            }
        }
        Ok(())
    }

    /// Runs the full bad-event scan (also the final check at the stop step)
    /// and appends a closing ledger row if one is due.
    pub fn finish(&mut self, state: &ProcessState) {
        if self.last_check != Some(state.step_index()) {
            self.check_bad_events(state);
        }
        if self.row_stride.is_some() && self.rows.last().map(|r| r.step) != Some(state.step_index())
        {
            self.push_row(state);
        }
    }

    fn check_bad_events(&mut self, state: &ProcessState) {
        let snap = bad_event_snapshot(state.adjacency(), &self.sigma, &self.thr);
        self.bad.latch(&snap, state.step_index());
        self.last_check = Some(state.step_index());
    }

    fn push_row(&mut self, state: &ProcessState) {
        let (open, interm, partial, partial_open) = self.counts(state);
        self.rows.push(LedgerRow {
            step: state.step_index(),
            t: state.step_index() as f64 / self.time_unit,
            open,
            interm,
            partial,
            partial_open,
            b1: self.bad.b1,
            b2: self.bad.b2,
            b3: self.bad.b3,
        });
    }
}

impl StepObserver for TripleTracker {
    fn before_commit(&mut self, pre: &ProcessState, event: &StepEvent) -> Result<()> {
        self.on_step(pre, event).map(|_| ())
    }

    fn after_commit(&mut self, post: &ProcessState, event: &StepEvent) -> Result<()> {
        self.after_step(post, event)
    }
}
