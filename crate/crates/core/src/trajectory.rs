//! Trajectory functions and a step observer that checks the global envelopes
//! (open-pair count, degrees, codegrees, closing-set sizes and overlaps).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::pair::{pair_count, Pair};
pub use crate::params::ParamSet;
use crate::process::{PairClass, ProcessState, StepEvent, StepObserver};
use crate::rng::{self, StreamRng};
use crate::Result;

/// `q(t) = e^{-16 t⁵}`.
pub fn q(t: f64) -> f64 {
    math::exp(-16.0 * math::powf(t, 5.0))
}

/// `q'(t) = -80 t⁴ q(t)`.
pub fn q_prime(t: f64) -> f64 {
    -80.0 * math::powf(t, 4.0) * q(t)
}

/// `f(t) = e^{(t⁵ + t) W}`.
pub fn f(t: f64, w: f64) -> f64 {
    math::exp((math::powf(t, 5.0) + t) * w)
}

/// `f'(t) = W (5 t⁴ + 1) f(t)`.
pub fn f_prime(t: f64, w: f64) -> f64 {
    w * (5.0 * math::powf(t, 4.0) + 1.0) * f(t, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    /// Non-edge pairs sampled per checked step for the `|C_uv|` envelope;
    /// half as many pairs of open pairs are sampled for the overlap bound.
    pub sample_pairs: usize,
    /// Check every `stride`-th step.
    pub stride: usize,
    /// Last step to check; `None` means `m`.
    pub horizon: Option<usize>,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            sample_pairs: 64,
            stride: 1,
            horizon: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WorstDeviation {
    /// `max | |O(i)| / (q n²/2) - 1 |`.
    pub open: f64,
    /// `max Δ / (3 n p t_max)`.
    pub degree: f64,
    /// `max codegree / (ln n · n p²)`.
    pub codegree: f64,
    /// `max |p |C_uv| - 40 t⁴ q| / (9 f / s_e)`; above 1 means outside.
    pub cuv: f64,
    /// `max |C ∩ C'| / (n^{-1/6} p^{-1})`.
    pub cc: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub steps_checked: usize,
    pub pairs_sampled: usize,
    pub pair_pairs_sampled: usize,
    #[serde(rename = "violations_O")]
    pub violations_o: usize,
    pub violations_deg: usize,
    pub violations_codeg: usize,
    #[serde(rename = "violations_Cuv")]
    pub violations_cuv: usize,
    #[serde(rename = "violations_CC")]
    pub violations_cc: usize,
    pub worst_rel_dev: WorstDeviation,
    /// `(n²/2 - n(n-1)/2) / (n²/2) = 1/n`: the offset between the envelope's
    /// centre at `t = 0` and the true pair count.
    pub pair_count_slack: f64,
}

impl EnvelopeReport {
    pub fn fraction_o(&self) -> f64 {
        ratio(self.violations_o, self.steps_checked)
    }

    pub fn fraction_cuv(&self) -> f64 {
        ratio(self.violations_cuv, self.pairs_sampled)
    }

    pub fn fraction_cc(&self) -> f64 {
        ratio(self.violations_cc, self.pair_pairs_sampled)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Observer for the global envelopes. Violations are recorded, never raised.
pub struct EnvelopeMonitor {
    params: ParamSet,
    config: EnvelopeConfig,
    rng: StreamRng,
    // codegree of every pair, indexed by `Pair::tri_index`
    codeg: Vec<u16>,
    synced_step: Option<usize>,
    max_codeg: usize,
    report: EnvelopeReport,
}

impl EnvelopeMonitor {
    pub fn new(params: ParamSet, config: EnvelopeConfig, master_seed: u64, run_index: u64) -> Self {
        let n = params.n;
        EnvelopeMonitor {
            rng: rng::fork(master_seed, run_index, rng::lane::ENVELOPE),
            codeg: Vec::new(),
            synced_step: None,
            max_codeg: 0,
            report: EnvelopeReport {
                pair_count_slack: 1.0 / n as f64,
                ..EnvelopeReport::default()
            },
            params,
            config,
        }
    }

    pub fn report(&self) -> &EnvelopeReport {
        &self.report
    }

    pub fn into_report(self) -> EnvelopeReport {
        self.report
    }

    fn horizon(&self) -> usize {
        self.config.horizon.unwrap_or(self.params.m)
    }

    fn rebuild_codegrees(&mut self, state: &ProcessState) {
        let n = state.n();
        let g = state.adjacency();
        self.codeg = vec![0; pair_count(n)];
        self.max_codeg = 0;
        for a in 0..n {
            for b in a + 1..n {
                let c = g.codegree(a, b);
                self.codeg[Pair::new(a as u32, b as u32).tri_index(n)] = c as u16;
                self.max_codeg = self.max_codeg.max(c);
            }
        }
        self.synced_step = Some(state.step_index());
    }

    fn update_codegrees(&mut self, post: &ProcessState, chosen: Pair) {
        let n = post.n();
        let g = post.adjacency();
        for (x, other) in [(chosen.u, chosen.v), (chosen.v, chosen.u)] {
            for y in g.neighbors(other as usize) {
                let y = y as u32;
                if y == x {
                    continue;
                }
                let t = Pair::new(x, y).tri_index(n);
                self.codeg[t] += 1;
                self.max_codeg = self.max_codeg.max(self.codeg[t] as usize);
            }
        }
        self.synced_step = Some(post.step_index());
    }

    /// Checks every envelope on `state` (any step, including 0).
    pub fn observe(&mut self, state: &ProcessState) {
        if self.synced_step != Some(state.step_index()) {
            self.rebuild_codegrees(state);
        }
        let i = state.step_index();
        if i > self.horizon() {
            return;
        }
        let pr = &self.params;
        let nf = pr.nf();
        let t = pr.t_of(i);
        let qt = q(t);
        let ft = f(t, pr.w);
        let rep = &mut self.report;
        rep.steps_checked += 1;

        let centre = qt * nf * nf / 2.0;
        let dev = (state.open_count() as f64 / centre - 1.0).abs();
        rep.worst_rel_dev.open = rep.worst_rel_dev.open.max(dev);
        if dev > 3.0 * ft / pr.s_e {
            rep.violations_o += 1;
        }

        let deg_bound = 3.0 * nf * pr.p * pr.t_max;
        let maxdeg = state.adjacency().max_degree() as f64;
        rep.worst_rel_dev.degree = rep.worst_rel_dev.degree.max(maxdeg / deg_bound);
        if maxdeg > deg_bound {
            rep.violations_deg += 1;
        }

        let codeg_bound = pr.ln_n() * nf * pr.p * pr.p;
        let c = self.max_codeg as f64;
        rep.worst_rel_dev.codegree = rep.worst_rel_dev.codegree.max(c / codeg_bound);
        if c > codeg_bound {
            rep.violations_codeg += 1;
        }

        self.sample_closing_sets(state, t, qt, ft);
    }

    fn sample_closing_sets(&mut self, state: &ProcessState, t: f64, qt: f64, ft: f64) {
        let pr = &self.params;
        let n = state.n() as u32;
        let centre = 40.0 * math::powf(t, 4.0) * qt;
        let half = 9.0 * ft / pr.s_e;
        let mut drawn = 0;
        let mut attempts = 0;
        while drawn < self.config.sample_pairs && attempts < 16 * self.config.sample_pairs {
            attempts += 1;
            let a = self.rng.gen_range(0..n);
            let b = self.rng.gen_range(0..n);
            if a == b || state.adjacency().has_edge(a, b) {
                continue;
            }
            drawn += 1;
            let size = state
                .closed_by(Pair::new(a, b))
                .map(|c| c.len())
                .unwrap_or(0);
            let dev = (size as f64 * pr.p - centre).abs() / half;
            let rep = &mut self.report;
            rep.pairs_sampled += 1;
            rep.worst_rel_dev.cuv = rep.worst_rel_dev.cuv.max(dev);
            if dev > 1.0 {
                rep.violations_cuv += 1;
            }
        }

        let open = state.open_count();
        if open < 2 {
            return;
        }
        let cc_bound = pr.n_pow(-1.0 / 6.0) / pr.p;
        for _ in 0..self.config.sample_pairs / 2 {
            let a = state.open_pair_at(self.rng.gen_range(0..open));
            let b = state.open_pair_at(self.rng.gen_range(0..open));
            if a == b {
                continue;
            }
            debug_assert_eq!(state.class(a), PairClass::Open);
            let mut ca = state.closed_by(a).unwrap_or_default();
            let mut cb = state.closed_by(b).unwrap_or_default();
            ca.sort_unstable();
            cb.sort_unstable();
            let common = sorted_intersection(&ca, &cb) as f64;
            let rep = &mut self.report;
            rep.pair_pairs_sampled += 1;
            rep.worst_rel_dev.cc = rep.worst_rel_dev.cc.max(common / cc_bound);
            if common > cc_bound {
                rep.violations_cc += 1;
            }
        }
    }
}

fn sorted_intersection(a: &[Pair], b: &[Pair]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

impl StepObserver for EnvelopeMonitor {
    fn after_commit(&mut self, post: &ProcessState, event: &StepEvent) -> Result<()> {
        if self.synced_step == Some(post.step_index() - 1) {
            self.update_codegrees(post, event.chosen);
        }
        if event.step.is_multiple_of(self.config.stride.max(1)) {
            self.observe(post);
        }
        Ok(())
    }
}

/// Records `(i, |O(i)|)` every `stride` steps, starting with the state it
/// was created from.
#[derive(Clone, Debug)]
pub struct OpenCountRecorder {
    stride: usize,
    pub samples: Vec<(usize, usize)>,
}

impl OpenCountRecorder {
    pub fn new(state: &ProcessState, stride: usize) -> Self {
        OpenCountRecorder {
            stride: stride.max(1),
            samples: vec![(state.step_index(), state.open_count())],
        }
    }
}

impl StepObserver for OpenCountRecorder {
    fn after_commit(&mut self, post: &ProcessState, event: &StepEvent) -> Result<()> {
        if event.step.is_multiple_of(self.stride) {
            self.samples.push((event.step, post.open_count()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::StopRule;

    #[test]
    fn q_values() {
        assert_eq!(q(0.0), 1.0);
        assert!((q(0.5) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((q(0.5) - 0.606531).abs() < 1e-6);
        assert!((q(1.0) - 1.12535e-7).abs() < 1e-11);
    }

    #[test]
    fn f_values() {
        assert_eq!(f(0.0, 4.0), 1.0);
        assert!((f(1.0, 4.0) - 2980.958).abs() < 1e-3);
    }

    #[test]
    fn derivatives_match_differences() {
        for i in 1..50 {
            let t = i as f64 * 0.02;
            let h = 1e-6;
            let dq = (q(t + h) - q(t - h)) / (2.0 * h);
            assert!((dq - q_prime(t)).abs() <= 1e-6 * (1.0 + dq.abs()));
            let df = (f(t + h, 4.0) - f(t - h, 4.0)) / (2.0 * h);
            assert!((df - f_prime(t, 4.0)).abs() <= 1e-6 * df.abs());
        }
    }

    #[test]
    fn step_zero_is_inside_envelope() {
        let params = ParamSet::desk(64).unwrap();
        let state = ProcessState::new(64, 1).unwrap();
        let mut mon = EnvelopeMonitor::new(params, EnvelopeConfig::default(), 1, 0);
        mon.observe(&state);
        let r = mon.report();
        assert_eq!(r.steps_checked, 1);
        assert_eq!(r.violations_o, 0);
        assert_eq!(r.violations_deg, 0);
    }

    #[test]
    fn incremental_codegrees_match_rebuild() {
        let params = ParamSet::desk(40).unwrap();
        let mut state = ProcessState::new(40, 5).unwrap();
        let mut mon = EnvelopeMonitor::new(params, EnvelopeConfig::default(), 5, 0);
        mon.observe(&state);
        state
            .run(StopRule::AfterSteps(200), &mut [&mut mon])
            .unwrap();
        let incremental = mon.codeg.clone();
        let max = mon.max_codeg;
        mon.rebuild_codegrees(&state);
        assert_eq!(incremental, mon.codeg);
        assert_eq!(max, mon.max_codeg);
    }
}
