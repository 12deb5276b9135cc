//! Brute-force reference implementations.
//!
//! Everything here recomputes its answer from definitions, with plain
//! nested loops over a private adjacency representation and no shared
//! incremental state. The functions are slow by design and meant for cross
//! checks on small graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::AdjMatrix;
use crate::pair::{pair_count, Pair};
use crate::process::{is_closed_oracle, PairClass, ProcessState};
use crate::triples::{Configuration, Thresholds};

/// Dense boolean adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveGraph {
    pub n: usize,
    adj: Vec<Vec<bool>>,
}

impl NaiveGraph {
    pub fn new(n: usize) -> Self {
        NaiveGraph {
            n,
            adj: vec![vec![false; n]; n],
        }
    }

    pub fn from_adj(g: &AdjMatrix) -> Self {
        let mut h = NaiveGraph::new(g.n());
        for e in g.edges() {
            h.add(e.u, e.v);
        }
        h
    }

    pub fn add(&mut self, a: u32, b: u32) {
        self.adj[a as usize][b as usize] = true;
        self.adj[b as usize][a as usize] = true;
    }

    pub fn has(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize][b as usize]
    }

    /// Is `ab` closed, i.e. a non-edge completing a K4?
    pub fn is_closed(&self, a: u32, b: u32) -> bool {
        let n = self.n as u32;
        !self.has(a, b)
            && (0..n).any(|w| {
                w != a
                    && w != b
                    && self.has(a, w)
                    && self.has(b, w)
                    && (w + 1..n).any(|x| {
                        x != a && x != b && self.has(a, x) && self.has(b, x) && self.has(w, x)
                    })
            })
    }

    pub fn is_open(&self, a: u32, b: u32) -> bool {
        !self.has(a, b) && !self.is_closed(a, b)
    }

    pub fn class(&self, a: u32, b: u32) -> PairClass {
        if self.has(a, b) {
            PairClass::Edge
        } else if self.is_closed(a, b) {
            PairClass::Closed
        } else {
            PairClass::Open
        }
    }

    /// `f ∈ C_e`: `f` open and some 4-set containing both pairs is a clique
    /// once `e` and `f` are added.
    pub fn in_closing_set(&self, e: Pair, f: Pair) -> bool {
        if e == f || !self.is_open(f.u, f.v) {
            return false;
        }
        let with = |a: u32, b: u32| {
            let p = Pair::new(a, b);
            p == e || p == f || self.has(a, b)
        };
        let mut verts = vec![e.u, e.v, f.u, f.v];
        verts.sort_unstable();
        verts.dedup();
        let clique = |q: &[u32]| (0..q.len()).all(|i| (i + 1..q.len()).all(|j| with(q[i], q[j])));
        match verts.len() {
            4 => clique(&verts),
            3 => (0..self.n as u32)
                .filter(|z| !verts.contains(z))
                .any(|z| clique(&[verts[0], verts[1], verts[2], z])),
            _ => false,
        }
    }

    pub fn common_in(&self, x: u32, y: u32, set: &[u32]) -> usize {
        set.iter()
            .filter(|&&z| self.has(x, z) && self.has(y, z))
            .count()
    }

    pub fn degree_in(&self, x: u32, set: &[u32]) -> usize {
        set.iter().filter(|&&z| self.has(x, z)).count()
    }

    /// Exhaustive K4 search over all 4-subsets.
    pub fn find_k4(&self) -> Option<[u32; 4]> {
        let n = self.n as u32;
        for a in 0..n {
            for b in a + 1..n {
                if !self.has(a, b) {
                    continue;
                }
                for c in b + 1..n {
                    if !self.has(a, c) || !self.has(b, c) {
                        continue;
                    }
                    for d in c + 1..n {
                        if self.has(a, d) && self.has(b, d) && self.has(c, d) {
                            return Some([a, b, c, d]);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Classifies every pair of `g` with [`is_closed_oracle`], indexed like
/// [`Pair::tri_index`].
pub fn reclassify_brute_force(g: &AdjMatrix) -> Vec<PairClass> {
    let n = g.n();
    let mut out = Vec::with_capacity(pair_count(n));
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            out.push(if g.has_edge(u, v) {
                PairClass::Edge
            } else if is_closed_oracle(g, Pair::new(u, v)).unwrap_or(false) {
                PairClass::Closed
            } else {
                PairClass::Open
            });
        }
    }
    out
}

/// `C_e` by enumerating every 4-set containing `e`.
pub fn closed_by_brute_force(state: &ProcessState, e: Pair) -> Vec<Pair> {
    let g = NaiveGraph::from_adj(state.adjacency());
    let n = g.n as u32;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if g.in_closing_set(e, Pair::new(a, b)) {
                out.push(Pair::new(a, b));
            }
        }
    }
    out
}

/// Triples in `A × B × C` (vertex ids) satisfying `pred`.
fn triples_where(
    sigma: &Configuration,
    mut pred: impl FnMut(u32, u32, u32) -> bool,
) -> BTreeSet<(u32, u32, u32)> {
    let mut out = BTreeSet::new();
    for &u in &sigma.a {
        for &v in &sigma.b {
            for &w in &sigma.c {
                if pred(u, v, w) {
                    out.insert((u, v, w));
                }
            }
        }
    }
    out
}

/// Open triples of `g` by definition.
pub fn open_triples(g: &NaiveGraph, sigma: &Configuration) -> BTreeSet<(u32, u32, u32)> {
    triples_where(sigma, |u, v, w| {
        g.is_open(u, v) && g.is_open(v, w) && g.is_open(u, w)
    })
}

/// Intermediate triples of `g` by definition.
pub fn interm_triples(g: &NaiveGraph, sigma: &Configuration) -> BTreeSet<(u32, u32, u32)> {
    triples_where(sigma, |u, v, w| {
        g.is_open(u, v) && g.is_open(v, w) && g.has(u, w)
    })
}

/// Straight-line replay of the partial-triple rules.
#[derive(Clone, Debug)]
pub struct ReferenceLedger {
    pub graph: NaiveGraph,
    sigma: Configuration,
    thr: Thresholds,
    /// `(u, v) -> w`.
    pub partial: BTreeMap<(u32, u32), u32>,
    /// Every `(u, v)` that ever held a partial triple, with its `w`.
    pub history: BTreeMap<(u32, u32), u32>,
}

impl ReferenceLedger {
    pub fn new(n: usize, sigma: Configuration, thr: Thresholds) -> Self {
        ReferenceLedger {
            graph: NaiveGraph::new(n),
            sigma,
            thr,
            partial: BTreeMap::new(),
            history: BTreeMap::new(),
        }
    }

    pub fn partial_set(&self) -> BTreeSet<(u32, u32, u32)> {
        self.partial.iter().map(|(&(u, v), &w)| (u, v, w)).collect()
    }

    /// Applies the step choosing `chosen` (open in the current graph).
    /// Returns the `(u, v)` pairs that re-entered after having left.
    pub fn step(&mut self, chosen: Pair) -> Vec<(u32, u32)> {
        let g = &self.graph;
        let sigma = &self.sigma;
        let k_all = sigma.k_vertices();
        let mut next = BTreeMap::new();

        for (&(u, v), &w) in &self.partial {
            let uv = Pair::new(u, v);
            let keep = if chosen == uv {
                false
            } else if !g.in_closing_set(uv, chosen) {
                true
            } else if !uv.contains(chosen.u) && !uv.contains(chosen.v) {
                let (x, y) = (chosen.u, chosen.v);
                let m = g.common_in(x, y, &sigma.a).min(g.common_in(x, y, &sigma.b));
                (m as f64) > self.thr.codeg_small
            } else {
                let x = if uv.contains(chosen.u) {
                    chosen.u
                } else {
                    chosen.v
                };
                let y = chosen.other(x);
                let o = uv.other(x);
                let r3a = (g.degree_in(y, &k_all) as f64) <= self.thr.k_degree_small;
                let r3b = (0..g.n as u32).any(|z| {
                    z != x
                        && z != y
                        && g.has(x, z)
                        && g.has(y, z)
                        && g.has(y, o)
                        && g.has(z, o)
                        && k_all.contains(&o)
                        && {
                            let c = k_all
                                .iter()
                                .filter(|&&q| g.has(y, q) && g.has(z, q))
                                .count();
                            (c as f64) <= self.thr.codeg_small
                        }
                });
                !(r3a || r3b)
            };
            if keep {
                next.insert((u, v), w);
            }
        }

        let mut reentered = Vec::new();
        for (u, v, w) in interm_triples(g, sigma) {
            if Pair::new(v, w) == chosen
                && !g.in_closing_set(chosen, Pair::new(u, v))
                && !self.partial.contains_key(&(u, v))
            {
                next.insert((u, v), w);
                if self.history.contains_key(&(u, v)) {
                    reentered.push((u, v));
                }
                self.history.insert((u, v), w);
            }
        }

        self.partial = next;
        self.graph.add(chosen.u, chosen.v);
        reentered
    }
}

/// Maximum degree inside `K`, by definition.
pub fn max_degree_in_k(g: &NaiveGraph, sigma: &Configuration) -> usize {
    let k_all = sigma.k_vertices();
    k_all
        .iter()
        .map(|&v| g.degree_in(v, &k_all))
        .max()
        .unwrap_or(0)
}

/// Pairs `xy` with `min(|Γx∩Γy∩A|, |Γx∩Γy∩B|) ≥ threshold`.
pub fn codegree_pairs(g: &NaiveGraph, sigma: &Configuration, threshold: f64) -> usize {
    let n = g.n as u32;
    let mut count = 0;
    for x in 0..n {
        for y in x + 1..n {
            let m = g.common_in(x, y, &sigma.a).min(g.common_in(x, y, &sigma.b));
            if m as f64 >= threshold {
                count += 1;
            }
        }
    }
    count
}

/// `Ξ_Σ` by four nested loops.
pub fn xi_quadruples(g: &NaiveGraph, sigma: &Configuration) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for &u in &sigma.a {
        for &v in &sigma.b {
            for &w in &sigma.c {
                for z in 0..g.n as u32 {
                    if z != u
                        && z != v
                        && z != w
                        && g.has(u, w)
                        && g.has(z, u)
                        && g.has(z, v)
                        && g.has(z, w)
                    {
                        out.push([u, v, w, z]);
                    }
                }
            }
        }
    }
    out
}

/// Largest number of `Ξ` quadruples sharing a pair among `uw, zu, zv, zw`.
pub fn xi_pair_max(g: &NaiveGraph, sigma: &Configuration) -> usize {
    let quads = xi_quadruples(g, sigma);
    let n = g.n as u32;
    let mut best = 0;
    for a in 0..n {
        for b in a + 1..n {
            let e = Pair::new(a, b);
            let c = quads
                .iter()
                .filter(|&&[u, v, w, z]| {
                    [
                        Pair::new(u, w),
                        Pair::new(z, u),
                        Pair::new(z, v),
                        Pair::new(z, w),
                    ]
                    .contains(&e)
                })
                .count();
            best = best.max(c);
        }
    }
    best
}

/// `|T_U|` by enumerating pairs and witnesses.
pub fn t_u_count(g: &NaiveGraph, u_set: &[u32]) -> usize {
    let mut count = 0;
    for (i, &a) in u_set.iter().enumerate() {
        for &b in &u_set[i + 1..] {
            if g.is_open(a, b)
                && u_set
                    .iter()
                    .any(|&w| w != a && w != b && g.has(a, w) && g.has(b, w))
            {
                count += 1;
            }
        }
    }
    count
}
