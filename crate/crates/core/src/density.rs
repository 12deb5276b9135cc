//! Monitors for the density events of the process graph, and greedy repair
//! procedures standing in for the existential deletion statements.
//!
//! Monitors never fail a run: a violated bound is returned as data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::{self, BitSet};
use crate::error::invalid;
use crate::graph::AdjMatrix;
use crate::math;
use crate::pair::Pair;
use crate::params::ParamSet;
use crate::process::{ProcessState, StopRule};
use crate::triples::{xi_pair_loads, xi_quadruples, Configuration};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub lemma: String,
    pub witness: Vec<Vec<u32>>,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub lemma: String,
    pub checked: usize,
    /// Checks whose hypothesis held, so that the bound applied.
    pub applicable: usize,
    pub violations: Vec<Violation>,
}

impl DensityReport {
    fn new(lemma: &str) -> Self {
        DensityReport {
            lemma: lemma.to_string(),
            checked: 0,
            applicable: 0,
            violations: Vec::new(),
        }
    }

    fn record(
        &mut self,
        bound: Option<f64>,
        observed: f64,
        witness: impl FnOnce() -> Vec<Vec<u32>>,
    ) {
        self.checked += 1;
        if let Some(bound) = bound {
            self.applicable += 1;
            if observed >= bound {
                self.violations.push(Violation {
                    lemma: self.lemma.clone(),
                    witness: witness(),
                    observed,
                    bound,
                });
            }
        }
    }
}

fn to_vec(s: &BitSet) -> Vec<u32> {
    s.iter().map(|x| x as u32).collect()
}

fn random_set<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitSet {
    let size = rng.gen_range(1..=n);
    BitSet::from_iter_n(n, index::sample(rng, n, size).iter())
}

/// Vertices sorted by degree, highest first, ties by id.
fn by_degree(g: &AdjMatrix) -> Vec<u32> {
    let mut order: Vec<u32> = (0..g.n() as u32).collect();
    order.sort_by_key(|&v| (usize::MAX - g.degree(v as usize), v));
    order
}

/// Edges with one end in `a` and the other in `b`; an edge inside `a ∩ b`
/// is counted once.
pub fn edges_between(g: &AdjMatrix, a: &BitSet, b: &BitSet) -> usize {
    let crossing: usize = a
        .iter()
        .map(|x| bitset::count_and(g.row(x), b.words()))
        .sum();
    let mut both = a.clone();
    both.intersect_with(b.words());
    let inside: usize = both
        .iter()
        .map(|x| bitset::count_and(g.row(x), both.words()))
        .sum::<usize>()
        / 2;
    crossing - inside
}

/// `max{4ε⁻¹(a+b), p a b n^{2ε}}`.
pub fn event_d_bound(params: &ParamSet, a: usize, b: usize) -> f64 {
    let linear = 4.0 / params.epsilon * (a + b) as f64;
    let product = params.p * (a * b) as f64 * params.n_pow(2.0 * params.epsilon);
    linear.max(product)
}

/// Checks `e(A, B)` against [`event_d_bound`] on `samples` random pairs of
/// random sizes, then on top-degree sets and neighbourhoods.
pub fn check_event_d<R: Rng + ?Sized>(
    g: &AdjMatrix,
    params: &ParamSet,
    samples: usize,
    rng: &mut R,
) -> DensityReport {
    let n = g.n();
    let mut rep = DensityReport::new("D");
    let check = |a: &BitSet, b: &BitSet, rep: &mut DensityReport| {
        let observed = edges_between(g, a, b) as f64;
        let bound =
            (!a.is_empty() && !b.is_empty()).then(|| event_d_bound(params, a.len(), b.len()));
        rep.record(bound, observed, || vec![to_vec(a), to_vec(b)]);
    };
    if n == 0 {
        return rep;
    }
    for _ in 0..samples {
        let a = random_set(n, rng);
        let b = random_set(n, rng);
        check(&a, &b, &mut rep);
    }
    let order = by_degree(g);
    let mut size = 1;
    while size <= n {
        let top = BitSet::from_iter_n(n, order[..size].iter().map(|&v| v as usize));
        check(&top, &top, &mut rep);
        size *= 2;
    }
    for &v in order.iter().take(8) {
        let mut nb = BitSet::new(n);
        nb.union_with(g.row(v as usize));
        check(&nb, &nb, &mut rep);
        let all = BitSet::from_iter_n(n, 0..n);
        check(&nb, &all, &mut rep);
    }
    rep
}

/// `D_{A,d} = {v : |Γ(v) ∩ A| ≥ d}`.
pub fn high_degree_set(g: &AdjMatrix, a: &BitSet, d: usize) -> Result<Vec<u32>> {
    if d == 0 {
        return Err(invalid("degree threshold must be at least 1"));
    }
    Ok((0..g.n())
        .filter(|&v| g.degree_into(v, a) >= d)
        .map(|v| v as u32)
        .collect())
}

/// `16ε⁻¹d⁻¹a` when `d ≥ max{16ε⁻¹, 2apn^{2ε}}`, otherwise `None`.
pub fn event_n_bound(params: &ParamSet, a: usize, d: usize) -> Option<f64> {
    let need =
        (16.0 / params.epsilon).max(2.0 * a as f64 * params.p * params.n_pow(2.0 * params.epsilon));
    (d as f64 >= need).then(|| 16.0 / params.epsilon / d as f64 * a as f64)
}

fn degree_thresholds(need: f64, cap: usize) -> Vec<usize> {
    let base = (math::ceil_tol(need.max(1.0)) as usize).max(1);
    let mut out = vec![1, 2, 4];
    out.extend([base, 2 * base, 4 * base]);
    out.retain(|&d| d <= cap.max(1));
    out.sort_unstable();
    out.dedup();
    out
}

/// Checks `|D_{A,d}|` for random sets `A` and for neighbourhoods of top
/// degree vertices, with `d` at and above the hypothesis threshold.
pub fn check_event_n<R: Rng + ?Sized>(
    g: &AdjMatrix,
    params: &ParamSet,
    samples: usize,
    rng: &mut R,
) -> DensityReport {
    let n = g.n();
    let mut rep = DensityReport::new("N");
    if n == 0 {
        return rep;
    }
    let mut sets: Vec<BitSet> = (0..samples).map(|_| random_set(n, rng)).collect();
    for &v in by_degree(g).iter().take(4) {
        let mut nb = BitSet::new(n);
        nb.union_with(g.row(v as usize));
        sets.push(nb);
    }
    for a in &sets {
        let need = (16.0 / params.epsilon)
            .max(2.0 * a.len() as f64 * params.p * params.n_pow(2.0 * params.epsilon));
        for d in degree_thresholds(need, n) {
            let hi = high_degree_set(g, a, d).unwrap_or_default();
            rep.record(event_n_bound(params, a.len(), d), hi.len() as f64, || {
                vec![to_vec(a), hi.clone(), vec![d as u32]]
            });
        }
    }
    rep
}

fn codegrees_into(g: &AdjMatrix, a: &BitSet, d: usize) -> Vec<Pair> {
    let n = g.n();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if bitset::count_and3(g.row(x), g.row(y), a.words()) >= d {
                out.push(Pair::new(x as u32, y as u32));
            }
        }
    }
    out
}

/// Greedy maximal family of disjoint pairs `xy` with `|Γx ∩ Γy ∩ A| ≥ d`,
/// scanning pairs in lexicographic order.
pub fn disjoint_codegree_family(g: &AdjMatrix, a: &BitSet, d: usize) -> Result<Vec<Pair>> {
    if d == 0 {
        return Err(invalid("codegree threshold must be at least 1"));
    }
    let mut used = BitSet::new(g.n());
    let mut out = Vec::new();
    for e in codegrees_into(g, a, d) {
        if !used.contains(e.u as usize) && !used.contains(e.v as usize) {
            used.insert(e.u as usize);
            used.insert(e.v as usize);
            out.push(e);
        }
    }
    Ok(out)
}

/// `30ε⁻¹d⁻¹a` when `d ≥ max{300ε⁻¹, a p² n^{5ε}, ε^{-1/2} √(ap) n^{2ε}}`.
pub fn event_m_bound(params: &ParamSet, a: usize, d: usize) -> Option<f64> {
    let eps = params.epsilon;
    let af = a as f64;
    let need = (300.0 / eps)
        .max(af * params.p * params.p * params.n_pow(5.0 * eps))
        .max(math::sqrt(af * params.p / eps) * params.n_pow(2.0 * eps));
    (d as f64 >= need).then(|| 30.0 / eps / d as f64 * af)
}

pub fn check_event_m<R: Rng + ?Sized>(
    g: &AdjMatrix,
    params: &ParamSet,
    samples: usize,
    rng: &mut R,
) -> DensityReport {
    let n = g.n();
    let mut rep = DensityReport::new("M");
    if n == 0 {
        return rep;
    }
    for _ in 0..samples {
        let a = random_set(n, rng);
        let eps = params.epsilon;
        let af = a.len() as f64;
        let need = (300.0 / eps)
            .max(af * params.p * params.p * params.n_pow(5.0 * eps))
            .max(math::sqrt(af * params.p / eps) * params.n_pow(2.0 * eps));
        for d in degree_thresholds(need, n) {
            let bound = event_m_bound(params, a.len(), d);
            if bound.is_none() && d > 4 {
                rep.checked += 1;
                continue;
            }
            let fam = disjoint_codegree_family(g, &a, d).unwrap_or_default();
            rep.record(bound, fam.len() as f64, || {
                let mut w = vec![to_vec(&a), vec![d as u32]];
                w.extend(fam.iter().map(|e| vec![e.u, e.v]));
                w
            });
        }
    }
    rep
}

/// The graph on qualifying pairs where two pairs are adjacent when they
/// share a vertex, with the greedy disjoint family as independent set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairGraphCheck {
    pub vertices: usize,
    pub max_degree: usize,
    pub alpha_lower: usize,
    /// `alpha_lower · (1 + max_degree) ≥ vertices`.
    pub holds: bool,
}

pub fn pair_intersection_check(g: &AdjMatrix, a: &BitSet, d: usize) -> Result<PairGraphCheck> {
    let family = disjoint_codegree_family(g, a, d)?;
    let pairs = codegrees_into(g, a, d);
    let mut load = vec![0usize; g.n()];
    for e in &pairs {
        load[e.u as usize] += 1;
        load[e.v as usize] += 1;
    }
    let max_degree = pairs
        .iter()
        .map(|e| load[e.u as usize] + load[e.v as usize] - 2)
        .max()
        .unwrap_or(0);
    Ok(PairGraphCheck {
        vertices: pairs.len(),
        max_degree,
        alpha_lower: family.len(),
        holds: family.len() * (1 + max_degree) >= pairs.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiStats {
    pub total: usize,
    pub per_pair_max: usize,
    pub argmax: Option<Pair>,
}

/// Counts `Ξ` quadruples and the pair lying in the most of them (lowest
/// pair on ties).
pub fn xi_quadruple_stats(g: &AdjMatrix, sigma: &Configuration) -> XiStats {
    let quads = xi_quadruples(g, sigma);
    let loads = xi_pair_loads(&quads);
    let mut best: Option<(Pair, usize)> = None;
    for (&e, &c) in &loads {
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((e, c));
        }
    }
    XiStats {
        total: quads.len(),
        per_pair_max: best.map_or(0, |b| b.1),
        argmax: best.map(|b| b.0),
    }
}

fn quad_pairs(q: &[u32; 4]) -> [Pair; 4] {
    let [u, v, w, z] = *q;
    [
        Pair::new(u, w),
        Pair::new(z, u),
        Pair::new(z, v),
        Pair::new(z, w),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleRepair {
    #[serde(rename = "E0")]
    pub removed: Vec<Pair>,
    pub initial: usize,
    pub residual: usize,
    /// `r³ n p⁴ n^{10ε}` with `r = k`.
    pub target: f64,
    /// `⌊20ε⁻¹ r⌋`.
    pub budget: usize,
    pub success: bool,
}

/// Greedily masks the edge lying in the most surviving `Ξ` quadruples until
/// the count drops to the target or the budget runs out. The graph itself
/// is untouched.
pub fn quadruple_deletion_repair(
    g: &AdjMatrix,
    sigma: &Configuration,
    params: &ParamSet,
) -> QuadrupleRepair {
    let r = sigma.k() as f64;
    let target =
        r * r * r * params.nf() * math::powf(params.p, 4.0) * params.n_pow(10.0 * params.epsilon);
    let budget = math::floor(20.0 / params.epsilon * r) as usize;
    let quads = xi_quadruples(g, sigma);
    let (removed, residual) = greedy_quadruple_cover(&quads, target, budget);
    QuadrupleRepair {
        initial: quads.len(),
        success: residual as f64 <= target,
        removed,
        residual,
        target,
        budget,
    }
}

/// Masks, one at a time, the pair lying in the most surviving quadruples
/// (highest pair on ties) until at most `target` survive or `budget` pairs
/// are masked. Returns the masked pairs and the surviving count.
pub fn greedy_quadruple_cover(
    quads: &[[u32; 4]],
    target: f64,
    budget: usize,
) -> (Vec<Pair>, usize) {
    let mut alive: Vec<bool> = vec![true; quads.len()];
    let mut residual = quads.len();
    let mut removed = Vec::new();
    while residual as f64 > target && removed.len() < budget {
        let mut loads: BTreeMap<Pair, usize> = BTreeMap::new();
        for (q, _) in quads.iter().zip(&alive).filter(|(_, &a)| a) {
            for e in quad_pairs(q) {
                *loads.entry(e).or_insert(0) += 1;
            }
        }
        let Some((&e, _)) = loads.iter().rev().max_by_key(|(_, &c)| c) else {
            break;
        };
        for (q, a) in quads.iter().zip(alive.iter_mut()) {
            if *a && quad_pairs(q).contains(&e) {
                *a = false;
                residual -= 1;
            }
        }
        removed.push(e);
    }
    (removed, residual)
}

/// Smallest residual reachable by masking at most `budget` pairs, by
/// exhaustive search. Exponential; for tiny instances only.
pub fn min_quadruple_residual(quads: &[[u32; 4]], budget: usize) -> usize {
    let mut candidates: Vec<Pair> = quads.iter().flat_map(quad_pairs).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let masks: Vec<u64> = quads
        .iter()
        .map(|q| {
            quad_pairs(q).iter().fold(0u64, |m, e| {
                m | 1 << candidates.binary_search(e).unwrap_or(0)
            })
        })
        .collect();
    assert!(
        candidates.len() <= 64,
        "too many candidate pairs for exhaustive search"
    );
    let mut best = quads.len();
    let mut chosen = 0u64;
    min_residual_rec(&masks, candidates.len(), 0, budget, &mut chosen, &mut best);
    best
}

fn min_residual_rec(
    masks: &[u64],
    total: usize,
    from: usize,
    left: usize,
    chosen: &mut u64,
    best: &mut usize,
) {
    let residual = masks.iter().filter(|&&m| m & *chosen == 0).count();
    *best = (*best).min(residual);
    if left == 0 || *best == 0 {
        return;
    }
    for i in from..total {
        *chosen |= 1 << i;
        min_residual_rec(masks, total, i + 1, left - 1, chosen, best);
        *chosen &= !(1 << i);
    }
}

/// Family of `ℓ`-element pair sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeFamily {
    pub members: Vec<Vec<Pair>>,
    pub ell: usize,
}

impl EdgeFamily {
    pub fn new(members: Vec<Vec<Pair>>) -> Result<Self> {
        let mut members = members;
        for m in members.iter_mut() {
            m.sort_unstable();
            m.dedup();
        }
        let ell = members.first().map_or(0, |m| m.len());
        if let Some(bad) = members.iter().find(|m| m.len() != ell) {
            return Err(invalid(format!(
                "family members must all have {ell} distinct pairs, found one with {}",
                bad.len()
            )));
        }
        Ok(EdgeFamily { members, ell })
    }

    /// Indices of members all of whose pairs are edges of `g` outside `mask`.
    pub fn contained(&self, g: &AdjMatrix, mask: &[Pair]) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| {
                self.members[i]
                    .iter()
                    .all(|e| g.has_edge(e.u, e.v) && !mask.contains(e))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeletionRepair {
    /// Indices into the family.
    #[serde(rename = "I0")]
    pub removed: Vec<usize>,
    pub initial: usize,
    pub residual: usize,
    /// `μ' + k`.
    pub target: f64,
    pub success: bool,
}

/// `μ' = |S| p^ℓ n^{2ℓε}`.
pub fn family_mean(family: &EdgeFamily, params: &ParamSet) -> f64 {
    let ell = family.ell as f64;
    family.members.len() as f64
        * math::powf(params.p, ell)
        * params.n_pow(2.0 * ell * params.epsilon)
}

/// Greedily picks contained members whose edges, once masked, destroy the
/// most contained members (first in family order on ties), until at most
/// `μ' + slack` remain or `budget` members were picked.
pub fn deletion_repair(
    g: &AdjMatrix,
    family: &EdgeFamily,
    params: &ParamSet,
    budget: usize,
    slack: usize,
) -> DeletionRepair {
    let target = family_mean(family, params) + slack as f64;
    let mut mask: Vec<Pair> = Vec::new();
    let mut removed = Vec::new();
    let mut contained = family.contained(g, &mask);
    let initial = contained.len();
    while contained.len() as f64 > target && removed.len() < budget {
        let mut best: Option<(usize, usize)> = None;
        for &i in &contained {
            let hit = contained
                .iter()
                .filter(|&&j| {
                    family.members[j]
                        .iter()
                        .any(|e| family.members[i].contains(e))
                })
                .count();
            if best.is_none_or(|(_, h)| hit > h) {
                best = Some((i, hit));
            }
        }
        let Some((i, _)) = best else { break };
        removed.push(i);
        mask.extend(family.members[i].iter().copied());
        contained.retain(|&j| !family.members[j].iter().any(|e| mask.contains(e)));
    }
    DeletionRepair {
        initial,
        residual: contained.len(),
        success: contained.len() as f64 <= target,
        removed,
        target,
    }
}

/// Whether some set of at most `budget` contained members brings the
/// contained count to `μ' + slack`. Exhaustive; tiny instances only.
pub fn deletion_repair_exists(
    g: &AdjMatrix,
    family: &EdgeFamily,
    params: &ParamSet,
    budget: usize,
    slack: usize,
) -> bool {
    let target = family_mean(family, params) + slack as f64;
    let contained = family.contained(g, &[]);
    let hits: Vec<u64> = contained
        .iter()
        .map(|&i| {
            contained.iter().enumerate().fold(0u64, |m, (b, &j)| {
                if family.members[j]
                    .iter()
                    .any(|e| family.members[i].contains(e))
                {
                    m | 1 << b
                } else {
                    m
                }
            })
        })
        .collect();
    assert!(
        contained.len() <= 64,
        "too many contained members for exhaustive search"
    );
    fn rec(hits: &[u64], from: usize, left: usize, killed: u64, total: usize, target: f64) -> bool {
        if (total - killed.count_ones() as usize) as f64 <= target {
            return true;
        }
        left > 0
            && (from..hits.len())
                .any(|i| rec(hits, i + 1, left - 1, killed | hits[i], total, target))
    }
    rec(&hits, 0, budget, 0, contained.len(), target)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSetReport {
    pub runs: usize,
    pub hits: usize,
    pub empirical: f64,
    /// `(p n^{2ε})^{|F|}`.
    pub bound: f64,
    pub steps: usize,
}

/// Runs `runs` independent processes for `m` steps each and reports how
/// often every pair of `f` ended up an edge.
pub fn edge_set_probability(
    n: usize,
    runs: usize,
    f: &[Pair],
    params: &ParamSet,
    master_seed: u64,
) -> Result<EdgeSetReport> {
    if runs == 0 {
        return Err(invalid("need at least one run"));
    }
    if let Some(e) = f.iter().find(|e| e.v as usize >= n) {
        return Err(invalid(format!("pair {e} outside [n] for n={n}")));
    }
    let mut hits = 0;
    for run in 0..runs {
        let mut state = ProcessState::with_stream(n, master_seed, run as u64)?;
        state.run(StopRule::AfterSteps(params.m), &mut [])?;
        if f.iter().all(|e| state.adjacency().has_edge(e.u, e.v)) {
            hits += 1;
        }
    }
    Ok(EdgeSetReport {
        runs,
        hits,
        empirical: hits as f64 / runs as f64,
        bound: math::powf(
            params.p * params.n_pow(2.0 * params.epsilon),
            f.len() as f64,
        ),
        steps: params.m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn set(n: usize, xs: &[usize]) -> BitSet {
        BitSet::from_iter_n(n, xs.iter().copied())
    }

    fn graph(n: usize, edges: &[(u32, u32)]) -> AdjMatrix {
        AdjMatrix::from_edges(n, edges.iter().map(|&(a, b)| Pair::new(a, b))).unwrap()
    }

    #[test]
    fn edges_between_examples() {
        let g = graph(5, &[(1, 2), (2, 3)]);
        let a = set(5, &[1, 2, 3]);
        assert_eq!(edges_between(&g, &a, &a), 2);
        assert_eq!(edges_between(&g, &set(5, &[0, 4]), &set(5, &[1])), 0);
    }

    #[test]
    fn event_d_trivial_graphs() {
        let params = ParamSet::desk(64).unwrap();
        let mut r = rng::stream(3, 0);
        assert!(check_event_d(&AdjMatrix::new(64), &params, 50, &mut r)
            .violations
            .is_empty());
        let g = graph(64, &[(0, 1)]);
        assert!(check_event_d(&g, &params, 50, &mut r).violations.is_empty());
    }

    #[test]
    fn high_degree_examples() {
        let a = set(6, &[1, 2, 3, 4, 5]);
        assert!(high_degree_set(&AdjMatrix::new(6), &a, 1)
            .unwrap()
            .is_empty());
        let star = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(high_degree_set(&star, &a, 5).unwrap(), vec![0]);
        assert!(high_degree_set(&star, &a, 0).is_err());
    }

    #[test]
    fn codegree_family_examples() {
        let a = set(5, &[3, 4]);
        assert!(disjoint_codegree_family(&AdjMatrix::new(5), &a, 2)
            .unwrap()
            .is_empty());
        let k4 = graph(5, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(
            disjoint_codegree_family(&k4, &a, 2).unwrap(),
            vec![Pair::new(1, 2)]
        );
        let chk = pair_intersection_check(&k4, &a, 1).unwrap();
        assert!(chk.holds);
    }

    #[test]
    fn xi_examples() {
        let (a, b, c, z) = (0, 1, 2, 3);
        let sigma = Configuration::from_parts(vec![a], vec![b], vec![c]).unwrap();
        let g = graph(4, &[(a, c), (z, a), (z, b), (z, c)]);
        let s = xi_quadruple_stats(&g, &sigma);
        assert_eq!((s.total, s.per_pair_max), (1, 1));
        let s = xi_quadruple_stats(&AdjMatrix::new(4), &sigma);
        assert_eq!(
            s,
            XiStats {
                total: 0,
                per_pair_max: 0,
                argmax: None
            }
        );

        let quads = xi_quadruples(&g, &sigma);
        let (removed, residual) = greedy_quadruple_cover(&quads, 0.0, 1);
        assert_eq!((removed.len(), residual), (1, 0));
        assert_eq!(min_quadruple_residual(&quads, 1), 0);
        assert_eq!(min_quadruple_residual(&quads, 0), 1);
    }

    #[test]
    fn repair_under_target_is_empty() {
        let params = ParamSet::desk(64).unwrap();
        let sigma = Configuration::from_parts(vec![0, 1], vec![2, 3], vec![4, 5]).unwrap();
        let rep = quadruple_deletion_repair(&AdjMatrix::new(64), &sigma, &params);
        assert!(rep.success && rep.removed.is_empty());
    }

    #[test]
    fn deletion_repair_examples() {
        let params = ParamSet::desk(64).unwrap();
        let fam = EdgeFamily::new(vec![vec![Pair::new(0, 1)], vec![Pair::new(1, 2)]]).unwrap();
        let rep = deletion_repair(&AdjMatrix::new(64), &fam, &params, 3, 0);
        assert!(rep.success && rep.removed.is_empty());

        let tri = graph(64, &[(0, 1), (1, 2), (0, 2)]);
        let fam = EdgeFamily::new(vec![
            vec![Pair::new(0, 1)],
            vec![Pair::new(1, 2)],
            vec![Pair::new(0, 2)],
        ])
        .unwrap();
        let rep = deletion_repair(&tri, &fam, &params, 3, 0);
        assert_eq!(rep.initial, 3);
        assert_eq!(rep.removed, vec![0, 1, 2]);
        assert!(rep.success && rep.residual == 0);
        assert!(EdgeFamily::new(vec![
            vec![Pair::new(0, 1)],
            vec![Pair::new(1, 2), Pair::new(2, 3)]
        ])
        .is_err());
    }

    #[test]
    fn empty_edge_set_always_present() {
        let params = ParamSet::desk(16).unwrap();
        let rep = edge_set_probability(16, 3, &[], &params, 1).unwrap();
        assert_eq!((rep.empirical, rep.bound), (1.0, 1.0));
    }
}
