//! Greedy construction of a configuration `Σ* = (U, (A, B, C))` inside a
//! fixed graph, and the neighbourhood bounds it is meant to guarantee.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::invalid;
use crate::params::ParamSet;
use crate::process::ProcessState;
use crate::triples::Configuration;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaStarResult {
    /// `A`, `B`, `C` (empty when infeasible).
    pub sigma: Configuration,
    #[serde(rename = "I")]
    pub i_set: Vec<u32>,
    /// 1-based greedy indices; `None` stands for `∞`.
    pub ell_a: Option<usize>,
    pub ell_b: Option<usize>,
    pub ell_c: Option<usize>,
    #[serde(rename = "L")]
    pub l_set: Vec<u32>,
    /// 1 when `I = ∅` (`ℓ_C` infinite or large), 2 otherwise.
    pub branch: u8,
    pub feasible: bool,
    pub diagnostic: Option<String>,
}

/// Builds `Σ*` in the current graph of `state` for the vertex set `u_set`.
pub fn build_sigma_star(
    state: &ProcessState,
    u_set: &[u32],
    params: &ParamSet,
) -> Result<SigmaStarResult> {
    let n = state.n();
    if u_set.len() != params.u {
        return Err(invalid(format!(
            "|U| = {} but u = {}",
            u_set.len(),
            params.u
        )));
    }
    if u_set.iter().any(|&x| x as usize >= n) {
        return Err(invalid("U contains a vertex outside [n]"));
    }
    let ubits = BitSet::from_iter_n(n, u_set.iter().map(|&x| x as usize));
    if ubits.len() != u_set.len() {
        return Err(invalid("U contains a repeated vertex"));
    }
    let g = state.adjacency();
    let k = params.k;
    let into_u: Vec<usize> = (0..n).map(|v| g.degree_into(v, &ubits)).collect();

    let l_threshold = k as f64 * params.p * params.n_pow(5.0 * params.epsilon);
    let l_set: Vec<u32> = (0..n as u32)
        .filter(|&v| into_u[v as usize] as f64 >= l_threshold)
        .collect();
    let lbits = BitSet::from_iter_n(n, l_set.iter().map(|&x| x as usize));

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&x, &y| into_u[y as usize].cmp(&into_u[x as usize]).then(x.cmp(&y)));

    // Greedy ℓ_A, ℓ_B, ℓ_C. Once an index is infinite the corresponding
    // set absorbs every remaining neighbourhood and later sets stay empty.
    let mut taken = BitSet::new(n);
    let mut sets: [BitSet; 3] = [BitSet::new(n), BitSet::new(n), BitSet::new(n)];
    let mut ells: [Option<usize>; 3] = [None; 3];
    let mut j = 0;
    for part in 0..3 {
        if part > 0 && ells[part - 1].is_none() {
            break;
        }
        while j < n {
            let v = order[j] as usize;
            j += 1;
            for x in g.neighbors(v) {
                if ubits.contains(x) && !taken.contains(x) {
                    sets[part].insert(x);
                    taken.insert(x);
                }
            }
            if sets[part].len() >= 2 * k {
                ells[part] = Some(j);
                break;
            }
        }
    }
    let [ell_a, ell_b, ell_c] = ells;
    let [n_a, n_b, n_c] = sets;

    let small = k as f64 * params.p * params.n_pow(-5.0 * params.epsilon);
    let branch_one = match ell_c {
        None => true,
        Some(l) => l as f64 > small,
    };

    let pick = |pool: &mut dyn Iterator<Item = usize>| -> Vec<u32> {
        pool.take(k).map(|x| x as u32).collect()
    };
    let (a, b, c, i_set) = if branch_one {
        let mut free = BitSet::new(n);
        free.union_with(ubits.words());
        for s in [&n_a, &n_b, &n_c, &lbits] {
            free.difference_with(s.words());
        }
        let mut it = free.iter();
        let a = pick(&mut it);
        let b = pick(&mut it);
        let c = pick(&mut it);
        (a, b, c, Vec::new())
    } else {
        let la = ell_a.unwrap_or(0);
        let lc = ell_c.unwrap_or(0);
        let mut gamma_bc = BitSet::new(n);
        for &v in &order[la..lc] {
            gamma_bc.union_with(g.row(v as usize));
        }
        let mut pool_a = n_a.clone();
        pool_a.difference_with(gamma_bc.words());
        pool_a.difference_with(lbits.words());
        let mut pool_b = n_b.clone();
        pool_b.difference_with(lbits.words());
        let mut pool_c = n_c.clone();
        pool_c.difference_with(lbits.words());
        let mut i_set: Vec<u32> = order[..lc].to_vec();
        i_set.sort_unstable();
        (
            pick(&mut pool_a.iter()),
            pick(&mut pool_b.iter()),
            pick(&mut pool_c.iter()),
            i_set,
        )
    };

    let short: Vec<&str> = [("A", &a), ("B", &b), ("C", &c)]
        .iter()
        .filter(|(_, s)| s.len() < k)
        .map(|(name, _)| *name)
        .collect();
    let feasible = short.is_empty();
    let diagnostic = (!feasible).then(|| {
        format!(
            "branch {}: could not fill {} with {k} vertices (|N_A|={}, |N_B|={}, |N_C|={}, |L|={}, |U|={})",
            if branch_one { 1 } else { 2 },
            short.join(", "),
            n_a.len(),
            n_b.len(),
            n_c.len(),
            l_set.len(),
            u_set.len()
        )
    });
    let mut u_sorted = u_set.to_vec();
    u_sorted.sort_unstable();
    let sigma = if feasible {
        Configuration {
            u_set: u_sorted,
            a,
            b,
            c,
        }
    } else {
        Configuration {
            u_set: u_sorted,
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
        }
    };
    Ok(SigmaStarResult {
        sigma,
        i_set,
        ell_a,
        ell_b,
        ell_c,
        l_set,
        branch: if branch_one { 1 } else { 2 },
        feasible,
        diagnostic,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodReport {
    /// `p^{-1} n^{10ε}`.
    pub bound: f64,
    pub checked: usize,
    /// `v ∉ I` with `|Γ(v) ∩ K|` above the bound.
    pub outside_i_violations: Vec<u32>,
    /// `v ∈ I` meeting both `A` and `B`.
    pub inside_i_violations: Vec<u32>,
    pub max_k_degree_outside_i: usize,
}

impl NeighborhoodReport {
    pub fn violation_rate(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            (self.outside_i_violations.len() + self.inside_i_violations.len()) as f64
                / self.checked as f64
        }
    }
}

/// Checks `|Γ(v) ∩ K| ≤ p^{-1} n^{10ε}` for `v ∉ I` and
/// `min(|Γ(v) ∩ A|, |Γ(v) ∩ B|) = 0` for `v ∈ I`.
pub fn verify_neighborhood_bounds(
    result: &SigmaStarResult,
    state: &ProcessState,
    params: &ParamSet,
) -> Result<NeighborhoodReport> {
    if !result.feasible {
        return Err(invalid("cannot verify an infeasible construction"));
    }
    let n = state.n();
    let g = state.adjacency();
    let s = &result.sigma;
    let kbits = BitSet::from_iter_n(n, s.k_vertices().into_iter().map(|x| x as usize));
    let abits = BitSet::from_iter_n(n, s.a.iter().map(|&x| x as usize));
    let bbits = BitSet::from_iter_n(n, s.b.iter().map(|&x| x as usize));
    let ibits = BitSet::from_iter_n(n, result.i_set.iter().map(|&x| x as usize));
    let bound = params.n_pow(10.0 * params.epsilon) / params.p;
    let mut rep = NeighborhoodReport {
        bound,
        checked: n,
        outside_i_violations: Vec::new(),
        inside_i_violations: Vec::new(),
        max_k_degree_outside_i: 0,
    };
    for v in 0..n {
        if ibits.contains(v) {
            if g.degree_into(v, &abits).min(g.degree_into(v, &bbits)) > 0 {
                rep.inside_i_violations.push(v as u32);
            }
        } else {
            let d = g.degree_into(v, &kbits);
            rep.max_k_degree_outside_i = rep.max_k_degree_outside_i.max(d);
            if d as f64 > bound {
                rep.outside_i_violations.push(v as u32);
            }
        }
    }
    Ok(rep)
}
