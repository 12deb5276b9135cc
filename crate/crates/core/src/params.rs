//! Asymptotic parameters of the process at a concrete `n`.

use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::math;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `ε = 1/1000`, `W = 500`, `μ = (ε / 2W)^{1/5}`; the constraint
    /// `2Wμ⁵ ≤ ε` is enforced.
    Paper,
    /// Constants small enough for the envelopes to mean something at
    /// `n ≤ 2^13`; the constraint is only reported.
    Desk,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "paper" => Ok(Mode::Paper),
            "desk" => Ok(Mode::Desk),
            _ => Err(invalid(format!(
                "unknown mode {s:?} (expected paper or desk)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Paper => "paper",
            Mode::Desk => "desk",
        }
    }
}

pub const PAPER_EPSILON: f64 = 1.0 / 1000.0;
pub const PAPER_W: f64 = 500.0;
pub const DESK_EPSILON: f64 = 0.05;
pub const DESK_W: f64 = 4.0;
pub const DESK_MU: f64 = 0.3;
/// Desk-mode `γ`. The closed-form `γ` exceeds `n / (n p t_max)` for every
/// `n` a desk run can reach, which would make `u > n`.
pub const DESK_GAMMA: f64 = 5.0;
pub const DELTA: f64 = 1.0 / 7000.0;

/// Constant choices before anything is derived from `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub mode: Mode,
    pub epsilon: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub mu: f64,
    /// Replaces the closed-form `γ` when set.
    pub gamma: Option<f64>,
}

impl Constants {
    pub fn paper() -> Self {
        Constants {
            mode: Mode::Paper,
            epsilon: PAPER_EPSILON,
            w: PAPER_W,
            mu: math::powf(PAPER_EPSILON / (2.0 * PAPER_W), 0.2),
            gamma: None,
        }
    }

    pub fn desk() -> Self {
        Constants {
            mode: Mode::Desk,
            epsilon: DESK_EPSILON,
            w: DESK_W,
            mu: DESK_MU,
            gamma: Some(DESK_GAMMA),
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Paper => Self::paper(),
            Mode::Desk => Self::desk(),
        }
    }

    /// `2 W μ⁵ ≤ ε`.
    pub fn constraint_holds(&self) -> bool {
        2.0 * self.w * math::powf(self.mu, 5.0) <= self.epsilon * (1.0 + 1e-12)
    }
}

/// Everything derived from `(n, ε, μ, W)`. Ceilings are applied to `m`, `u`
/// and `k`; `log` is natural.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub n: usize,
    pub mode: Mode,
    pub epsilon: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub mu: f64,
    pub p: f64,
    pub t_max: f64,
    pub m: usize,
    pub s_e: f64,
    pub delta: f64,
    pub gamma: f64,
    pub gamma_overridden: bool,
    pub u: usize,
    pub k: usize,
    pub constraint_ok: bool,
}

impl ParamSet {
    pub fn paper(n: usize) -> Result<Self> {
        Self::new(n, Constants::paper())
    }

    pub fn desk(n: usize) -> Result<Self> {
        Self::new(n, Constants::desk())
    }

    pub fn new(n: usize, c: Constants) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("need n >= 2, got {n}")));
        }
        for (name, v) in [("epsilon", c.epsilon), ("W", c.w), ("mu", c.mu)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(g) = c.gamma {
            if !(g > 0.0) || !g.is_finite() {
                return Err(invalid(format!("gamma must be positive, got {g}")));
            }
        }
        let constraint_ok = c.constraint_holds();
        if c.mode == Mode::Paper && !constraint_ok {
            return Err(invalid(format!(
                "paper mode requires 2*W*mu^5 <= epsilon (W={}, mu={}, epsilon={})",
                c.w, c.mu, c.epsilon
            )));
        }
        let nf = n as f64;
        let ln_n = math::ln(nf);
        let p = math::powf(nf, -0.4);
        let t_max = c.mu * math::powf(ln_n, 0.2);
        let m = math::ceil_tol(nf * nf * p * t_max) as usize;
        let s_e = math::powf(nf, 1.0 / 12.0 - c.epsilon);
        let formula_gamma = (5.0 / (math::sqrt(DELTA) * math::powf(c.mu, 2.5))).max(150.0);
        let gamma = c.gamma.unwrap_or(formula_gamma);
        let u = math::ceil_tol(gamma * nf * p * t_max) as usize;
        let k = math::ceil_tol(u as f64 / 15.0) as usize;
        if m == 0 || u == 0 || k == 0 {
            return Err(invalid(format!(
                "degenerate parameters at n={n}: m={m}, u={u}, k={k}"
            )));
        }
        Ok(ParamSet {
            n,
            mode: c.mode,
            epsilon: c.epsilon,
            w: c.w,
            mu: c.mu,
            p,
            t_max,
            m,
            s_e,
            delta: DELTA,
            gamma,
            gamma_overridden: c.gamma.is_some(),
            u,
            k,
            constraint_ok,
        })
    }

    pub fn constants(&self) -> Constants {
        Constants {
            mode: self.mode,
            epsilon: self.epsilon,
            w: self.w,
            mu: self.mu,
            gamma: self.gamma_overridden.then_some(self.gamma),
        }
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `n^x`.
    pub fn n_pow(&self, x: f64) -> f64 {
        math::powf(self.nf(), x)
    }

    /// `n² p`, the number of steps per unit of scaled time.
    pub fn time_unit(&self) -> f64 {
        self.nf() * self.nf() * self.p
    }

    /// `t = i / (n² p)`.
    pub fn t_of(&self, step: usize) -> f64 {
        step as f64 / self.time_unit()
    }

    pub fn ln_n(&self) -> f64 {
        math::ln(self.nf())
    }

    /// One-line human summary, used as a report header.
    pub fn describe(&self) -> String {
        format!(
            "n={} mode={} epsilon={} W={} mu={} gamma={}{} p={:.6} t_max={:.6} m={} u={} k={} s_e={:.6} constraint_ok={}",
            self.n,
            self.mode.name(),
            self.epsilon,
            self.w,
            self.mu,
            self.gamma,
            if self.gamma_overridden { " (override)" } else { "" },
            self.p,
            self.t_max,
            self.m,
            self.u,
            self.k,
            self.s_e,
            self.constraint_ok
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_mu_saturates_constraint() {
        let c = Constants::paper();
        assert!((2.0 * c.w * c.mu.powi(5) - c.epsilon).abs() < 1e-15);
        assert!(c.constraint_holds());
    }

    #[test]
    fn paper_mode_rejects_large_mu() {
        let mut c = Constants::paper();
        c.mu = 0.3;
        assert!(ParamSet::new(1024, c).is_err());
        c.mode = Mode::Desk;
        let p = ParamSet::new(1024, c).unwrap();
        assert!(!p.constraint_ok);
    }

    #[test]
    fn desk_values_at_1024() {
        let p = ParamSet::desk(1024).unwrap();
        assert!((p.p - 1.0 / 16.0).abs() < 1e-15);
        assert!(p.gamma_overridden);
        assert!(p.u <= p.n);
        assert_eq!(p.k, p.u.div_ceil(15));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ParamSet::desk(1).is_err());
        let mut c = Constants::desk();
        c.epsilon = 0.0;
        assert!(ParamSet::new(100, c).is_err());
    }
}
