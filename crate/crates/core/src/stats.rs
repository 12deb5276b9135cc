//! Terminal-graph analytics: log-log fits, independence numbers, triangle
//! coverage of vertex subsets and K4-freeness certificates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::{self, BitSet};
use crate::error::{invalid, Error};
use crate::graph::AdjMatrix;
use crate::math;
use crate::pair::Pair;
use crate::process::{PairClass, ProcessState, StepEvent, StepObserver};
use crate::Result;

/// Least-squares line through `(ln n, ln value)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if let Some(&(n, v)) = points.iter().find(|&&(n, v)| !(n > 0.0) || !(v > 0.0)) {
        return Err(invalid(format!(
            "fit needs positive n and values, got ({n}, {v})"
        )));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    if xs.len() < 3 {
        return Err(invalid("fit needs at least 3 distinct n values"));
    }
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, v)| (math::ln(n), math::ln(v)))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let stderr = if pts.len() > 2 {
        math::sqrt(sse / (m - 2.0) / sxx)
    } else {
        0.0
    };
    Ok(ExponentFit {
        slope,
        intercept,
        stderr,
    })
}

/// Size of the greedy independent set obtained by scanning `order`.
pub fn greedy_pass(g: &AdjMatrix, order: &[u32]) -> usize {
    let mut blocked = BitSet::new(g.n());
    let mut size = 0;
    for &v in order {
        let v = v as usize;
        if !blocked.contains(v) {
            size += 1;
            blocked.insert(v);
            blocked.union_with(g.row(v));
        }
    }
    size
}

/// Repeatedly takes a vertex of minimum degree in what is left and deletes
/// its closed neighbourhood. Returns the independent set.
pub fn min_degree_greedy(g: &AdjMatrix) -> Vec<u32> {
    let n = g.n();
    let mut alive = BitSet::new(n);
    for v in 0..n {
        alive.insert(v);
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut out = Vec::new();
    while let Some(v) = alive.iter().min_by_key(|&v| (deg[v], v)) {
        out.push(v as u32);
        let mut removed = vec![v];
        removed.extend(bitset::ones(g.row(v)).filter(|&x| alive.contains(x)));
        for &x in &removed {
            alive.remove(x);
        }
        for &x in &removed {
            for y in bitset::ones(g.row(x)) {
                if alive.contains(y) {
                    deg[y] -= 1;
                }
            }
        }
    }
    out
}

/// Best of `passes` random-order greedy passes and one min-degree pass.
pub fn greedy_independence<R: Rng + ?Sized>(g: &AdjMatrix, passes: usize, rng: &mut R) -> usize {
    let mut order: Vec<u32> = (0..g.n() as u32).collect();
    let mut best = min_degree_greedy(g).len();
    for _ in 0..passes {
        order.shuffle(rng);
        best = best.max(greedy_pass(g, &order));
    }
    best
}

/// Exact independence number by branch and bound, for `n ≤ 64`.
/// `keep_going` is polled periodically; returning `false` abandons the
/// search and yields `None`.
pub fn exact_independence(
    g: &AdjMatrix,
    keep_going: &mut dyn FnMut() -> bool,
) -> Result<Option<usize>> {
    let n = g.n();
    if n > 64 {
        return Err(invalid(format!(
            "exact independence supports n <= 64, got {n}"
        )));
    }
    let nbr: Vec<u64> = (0..n)
        .map(|v| g.row(v).first().copied().unwrap_or(0))
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Search {
        nbr,
        best: 0,
        nodes: 0,
        aborted: false,
        keep_going,
    };
    search.go(all, 0);
    Ok((!search.aborted).then_some(search.best))
}

struct Search<'a> {
    nbr: Vec<u64>,
    best: usize,
    nodes: u64,
    aborted: bool,
    keep_going: &'a mut dyn FnMut() -> bool,
}

impl Search<'_> {
    fn go(&mut self, mut cand: u64, mut size: usize) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && !(self.keep_going)() {
            self.aborted = true;
            return;
        }
        // vertices of degree at most one inside `cand` belong to some
        // maximum independent set
        loop {
            let mut forced = None;
            let mut bits = cand;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if (self.nbr[v] & cand).count_ones() <= 1 {
                    forced = Some(v);
                    break;
                }
            }
            match forced {
                Some(v) => {
                    size += 1;
                    cand &= !(self.nbr[v] | (1 << v));
                }
                None => break,
            }
        }
        if cand == 0 {
            self.best = self.best.max(size);
            return;
        }
        if size + (cand.count_ones() as usize) <= self.best {
            return;
        }
        let mut pivot = 0;
        let mut pivot_deg = 0;
        let mut bits = cand;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let d = (self.nbr[v] & cand).count_ones();
            if d > pivot_deg {
                pivot = v;
                pivot_deg = d;
            }
        }
        self.go(cand & !(self.nbr[pivot] | (1 << pivot)), size + 1);
        self.go(cand & !(1 << pivot), size);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Independence {
    pub greedy: usize,
    pub exact: Option<usize>,
}

/// Greedy lower bound always; exact value for `n ≤ 40` unless `keep_going`
/// stops the search.
pub fn independence_lower<R: Rng + ?Sized>(
    g: &AdjMatrix,
    rng: &mut R,
    keep_going: &mut dyn FnMut() -> bool,
) -> Independence {
    let greedy = greedy_independence(g, 32, rng);
    let exact = if g.n() <= 40 {
        exact_independence(g, keep_going).ok().flatten()
    } else {
        None
    };
    Independence { greedy, exact }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub u_size: usize,
    pub samples: usize,
    pub covered: usize,
    pub rate: f64,
    /// Sampled subsets without a triangle.
    pub misses: Vec<Vec<u32>>,
    /// Triangles inside each sampled subset.
    pub triangle_counts: Vec<usize>,
}

/// Triangles of `g` inside `set`.
pub fn triangles_within(g: &AdjMatrix, set: &BitSet) -> usize {
    let mut total = 0;
    for x in set.iter() {
        for y in bitset::ones(g.row(x)).filter(|&y| y > x && set.contains(y)) {
            total += bitset::ones(g.row(x))
                .filter(|&z| z > y && set.contains(z) && g.has_edge(y as u32, z as u32))
                .count();
        }
    }
    total
}

/// Fraction of `samples` uniform `u_size`-subsets containing a triangle.
pub fn triangle_coverage<R: Rng + ?Sized>(
    g: &AdjMatrix,
    u_size: usize,
    samples: usize,
    rng: &mut R,
) -> Result<CoverageReport> {
    let n = g.n();
    if u_size > n {
        return Err(invalid(format!("subset size {u_size} exceeds n={n}")));
    }
    let mut rep = CoverageReport {
        u_size,
        samples,
        covered: 0,
        rate: 0.0,
        misses: Vec::new(),
        triangle_counts: Vec::with_capacity(samples),
    };
    for _ in 0..samples {
        let members = index::sample(rng, n, u_size);
        let set = BitSet::from_iter_n(n, members.iter());
        let t = triangles_within(g, &set);
        rep.triangle_counts.push(t);
        if t > 0 {
            rep.covered += 1;
        } else {
            let mut w: Vec<u32> = set.iter().map(|x| x as u32).collect();
            w.sort_unstable();
            rep.misses.push(w);
        }
    }
    rep.rate = if samples == 0 {
        1.0
    } else {
        rep.covered as f64 / samples as f64
    };
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    /// Every K4 is found by scanning each edge's common neighbourhood.
    Exhaustive,
    /// Uniformly random 4-subsets.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub mode: CertifyMode,
    pub k4_free: bool,
    pub witness: Option<[u32; 4]>,
    /// Only meaningful when the process has terminated.
    pub terminated: bool,
    /// No open pair is left and every non-edge completes a K4.
    pub maximal: Option<bool>,
    /// A non-edge that does not complete a K4, if one was found.
    pub maximality_witness: Option<Pair>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.k4_free && self.maximal != Some(false)
    }
}

/// K4-freeness of the current graph and, for a terminated run, maximality
/// rechecked from the adjacency alone.
pub fn certify_k4_free<R: Rng + ?Sized>(
    state: &ProcessState,
    mode: CertifyMode,
    rng: &mut R,
) -> Certificate {
    certify(state.adjacency(), state.is_terminated(), mode, rng)
}

/// Certificate for a bare graph, such as one read from a file. Maximality
/// is always checked; `terminated` records whether any open pair is left.
pub fn certify_graph<R: Rng + ?Sized>(
    g: &AdjMatrix,
    mode: CertifyMode,
    rng: &mut R,
) -> Certificate {
    let mut c = certify(g, true, mode, rng);
    c.terminated = c.maximal == Some(true);
    c
}

fn certify<R: Rng + ?Sized>(
    g: &AdjMatrix,
    terminated: bool,
    mode: CertifyMode,
    rng: &mut R,
) -> Certificate {
    let witness = match mode {
        CertifyMode::Exhaustive => g.find_k4(),
        CertifyMode::Sampled(count) => sampled_k4(g, count, rng),
    };
    let (maximal, maximality_witness) = if terminated {
        match first_non_closing_nonedge(g) {
            None => (Some(true), None),
            Some(p) => (Some(false), Some(p)),
        }
    } else {
        (None, None)
    };
    Certificate {
        mode,
        k4_free: witness.is_none(),
        witness,
        terminated,
        maximal,
        maximality_witness,
    }
}

fn sampled_k4<R: Rng + ?Sized>(g: &AdjMatrix, count: usize, rng: &mut R) -> Option<[u32; 4]> {
    let n = g.n();
    if n < 4 {
        return None;
    }
    for _ in 0..count {
        let s = index::sample(rng, n, 4);
        let q = [
            s.index(0) as u32,
            s.index(1) as u32,
            s.index(2) as u32,
            s.index(3) as u32,
        ];
        if (0..4).all(|i| (i + 1..4).all(|j| g.has_edge(q[i], q[j]))) {
            return Some(q);
        }
    }
    None
}

/// A non-edge whose common neighbourhood spans no edge, i.e. one that could
/// still be added without creating a K4.
pub fn first_non_closing_nonedge(g: &AdjMatrix) -> Option<Pair> {
    let n = g.n();
    let mut common = BitSet::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u as u32, v as u32) {
                continue;
            }
            common.clear();
            common.union_with(g.row(u));
            common.intersect_with(g.row(v));
            if !common
                .iter()
                .any(|w| bitset::any_and(g.row(w), common.words()))
            {
                return Some(Pair::new(u as u32, v as u32));
            }
        }
    }
    None
}

/// Step observer that certifies every intermediate graph: each new edge is
/// checked for a K4 through it, which by induction proves every `G(i)`
/// K4-free. It also checks that the inserted pair was open.
#[derive(Clone, Debug, Default)]
pub struct K4Guard {
    pub steps_certified: usize,
}

impl StepObserver for K4Guard {
    fn before_commit(&mut self, pre: &ProcessState, event: &StepEvent) -> Result<()> {
        if pre.class(event.chosen) != PairClass::Open {
            return Err(Error::StateCorruption(format!(
                "chosen pair {} is not open",
                event.chosen
            )));
        }
        Ok(())
    }

    fn after_commit(&mut self, post: &ProcessState, event: &StepEvent) -> Result<()> {
        if let Some(q) = post.adjacency().k4_through(event.chosen) {
            return Err(Error::K4Found(q));
        }
        self.steps_certified += 1;
        Ok(())
    }
}
