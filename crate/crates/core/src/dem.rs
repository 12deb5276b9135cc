//! Numeric harness for the differential equation method: variable specs,
//! hypothesis checklists, supermartingale transforms and tail bounds.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::math;
use crate::params::ParamSet;
use crate::trajectory::{f as f_traj, f_prime, q, q_prime};
use crate::Result;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Real function of scaled time with an optional analytic derivative.
#[derive(Clone)]
pub struct ScalarFn {
    eval: Eval,
    deriv: Option<Eval>,
}

impl core::fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScalarFn")
            .field("analytic_derivative", &self.deriv.is_some())
            .finish()
    }
}

impl ScalarFn {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn {
            eval: Arc::new(eval),
            deriv: None,
        }
    }

    pub fn with_derivative(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFn {
            eval: Arc::new(eval),
            deriv: Some(Arc::new(deriv)),
        }
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::with_derivative(move |_| c, |_| 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// Analytic derivative if supplied, central difference with step `h`
    /// otherwise.
    pub fn derivative(&self, t: f64, h: f64) -> f64 {
        match &self.deriv {
            Some(d) => d(t),
            None => central_difference(&*self.eval, t, h),
        }
    }
}

pub fn central_difference(g: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (g(t + h) - g(t - h)) / (2.0 * h)
}

/// Relative tolerance of [`integrate`] on each subinterval.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// Adaptive Simpson quadrature of `g` over `[a, b]`. A subinterval is
/// accepted once its error estimate is within `tol` (split in proportion to
/// length) or within [`QUAD_REL_TOL`] of its value.
pub fn integrate(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PANELS: usize = 16;
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == PANELS { b } else { lo + width };
            let (flo, fmid, fhi) = (g(lo), g(0.5 * (lo + hi)), g(hi));
            let whole = simpson(lo, hi, flo, fmid, fhi);
            simpson_rec(g, lo, hi, flo, fmid, fhi, whole, tol / PANELS as f64, 30)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let scale = tol.max(QUAD_REL_TOL * math::abs(left + right));
    if depth == 0 || math::abs(delta) <= 15.0 * scale || !delta.is_finite() {
        return left + right + delta / 15.0;
    }
    simpson_rec(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_rec(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// One tracked variable with its trajectory, error functions and scaling.
#[derive(Clone, Debug)]
pub struct DemVariableSpec {
    pub name: String,
    pub x: ScalarFn,
    pub y_plus: ScalarFn,
    pub y_minus: ScalarFn,
    pub f: ScalarFn,
    pub h: ScalarFn,
    /// `S`.
    pub scale: f64,
    pub s_sigma: f64,
    pub lambda: f64,
    pub beta: f64,
    pub tau: f64,
    pub u_sigma: f64,
    /// Steps per unit of scaled time.
    pub s: f64,
    /// Horizon in steps.
    pub m: f64,
}

impl DemVariableSpec {
    pub fn horizon(&self) -> f64 {
        self.m / self.s
    }

    /// `(y^{±₁}(t) ∓₂ h(t)/s_σ)·S/s` for `plus1`, `plus2` selecting the signs.
    pub fn compensator(&self, t: f64, plus1: bool, plus2: bool) -> f64 {
        let y = if plus1 {
            self.y_plus.eval(t)
        } else {
            self.y_minus.eval(t)
        };
        let e = self.h.eval(t) / self.s_sigma;
        let inner = if plus2 { y - e } else { y + e };
        inner * self.scale / self.s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChecklistItem {
    pub item: String,
    pub status: CheckStatus,
    pub observed: f64,
    pub required: f64,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChecklistReport {
    pub variable: String,
    pub items: Vec<ChecklistItem>,
}

impl ChecklistReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.status == CheckStatus::Pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|i| i.status != CheckStatus::Pass)
            .map(|i| i.item.as_str())
            .collect()
    }

    pub fn get(&self, item: &str) -> Option<&ChecklistItem> {
        self.items.iter().find(|i| i.item == item)
    }
}

pub const GRID_POINTS: usize = 1000;
pub const IDENTITY_TOL: f64 = 1e-6;
pub const INTEGRAL_TOL: f64 = 1e-9;

fn item(name: &str, ok: bool, observed: f64, required: f64) -> ChecklistItem {
    let status = if !observed.is_finite() || !required.is_finite() {
        CheckStatus::Error
    } else if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    ChecklistItem {
        item: name.to_string(),
        status,
        observed,
        required,
        detail: (status == CheckStatus::Error).then(|| "non-finite evaluation".to_string()),
    }
}

fn grid(end: f64, points: usize) -> impl Iterator<Item = f64> {
    let last = points.max(2) - 1;
    (0..=last).map(move |i| end * i as f64 / last as f64)
}

/// Numerically checks the hypotheses and technical assumptions of the
/// method for one variable.
pub fn validate_spec(spec: &DemVariableSpec) -> ChecklistReport {
    validate_spec_on(spec, GRID_POINTS)
}

pub fn validate_spec_on(spec: &DemVariableSpec, points: usize) -> ChecklistReport {
    let end = spec.horizon();
    let step = 1e-5 * if end > 0.0 { end } else { 1.0 };
    let ratio = spec.s_sigma * spec.lambda / spec.beta;
    let mut items = Vec::new();

    let min_value = grid(end, points)
        .flat_map(|t| {
            [
                spec.x.eval(t),
                spec.y_plus.eval(t),
                spec.y_minus.eval(t),
                spec.f.eval(t),
                spec.h.eval(t),
            ]
        })
        .fold(
            f64::INFINITY,
            |a, b| if b.is_nan() { f64::NAN } else { a.min(b) },
        );
    items.push(item("nonnegative", min_value >= 0.0, min_value, 0.0));

    let s_need = (15.0 * spec.u_sigma * spec.tau * ratio * ratio).max(9.0 * ratio);
    items.push(item("s_lower", spec.s >= s_need, spec.s, s_need));
    let m_low = spec.s / (18.0 * ratio);
    items.push(item("m_lower", m_low < spec.m, spec.m, m_low));
    let m_high = spec.s * spec.tau / 1944.0;
    items.push(item("m_upper", spec.m <= m_high, spec.m, m_high));

    let y_sup = grid(end, points)
        .map(|t| spec.y_plus.eval(t).max(spec.y_minus.eval(t)))
        .fold(f64::NEG_INFINITY, f64::max);
    items.push(item("y_sup", y_sup <= spec.lambda, y_sup, spec.lambda));

    let x2 = |t: f64| math::abs(central_difference(&|u| spec.x.derivative(u, step), t, step));
    let tol = 1e-10 * end.max(1e-300);
    let x_var = integrate(&x2, 0.0, end, tol);
    items.push(item(
        "x_second_variation",
        x_var <= spec.lambda * (1.0 + 1e-8),
        x_var,
        spec.lambda,
    ));

    let h0 = spec.h.eval(0.0);
    let h_cap = spec.s_sigma * spec.lambda;
    items.push(item("h_initial", h0 <= h_cap, h0, h_cap));
    let h1 = |t: f64| math::abs(spec.h.derivative(t, step));
    let h_var = integrate(&h1, 0.0, end, tol);
    items.push(item(
        "h_variation",
        h_var <= h_cap * (1.0 + 1e-8),
        h_var,
        h_cap,
    ));

    let identity = grid(end, points)
        .map(|t| {
            let fd = central_difference(&|u| spec.x.eval(u), t, step);
            let (yp, ym) = (spec.y_plus.eval(t), spec.y_minus.eval(t));
            math::abs(fd - (yp - ym)) / (math::abs(yp) + math::abs(ym)).max(1.0)
        })
        .fold(
            0.0,
            |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) },
        );
    items.push(item(
        "derivative_identity",
        identity <= IDENTITY_TOL,
        identity,
        IDENTITY_TOL,
    ));

    let h_abs = |t: f64| spec.h.eval(t);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut slack = f64::INFINITY;
    for t in grid(end, points) {
        acc += integrate(&h_abs, prev, t, 1e-12 * (t - prev).max(1e-300));
        prev = t;
        let fv = spec.f.eval(t);
        let gap = (fv - 2.0 * acc - spec.beta) / fv.abs().max(1.0);
        slack = if gap.is_nan() {
            f64::NAN
        } else {
            slack.min(gap)
        };
    }
    items.push(item(
        "f_integral",
        slack >= -INTEGRAL_TOL,
        slack,
        -INTEGRAL_TOL,
    ));

    ChecklistReport {
        variable: spec.name.clone(),
        items,
    }
}

/// The open, intermediate and partial triple variables.
pub fn builtin_triple_specs(params: &ParamSet) -> [DemVariableSpec; 3] {
    let w = params.w;
    let eps = params.epsilon;
    let k = params.k as f64;
    let p = params.p;
    let s = params.nf() * params.nf() * p;
    let common =
        |name: &str, x: ScalarFn, y_plus: ScalarFn, y_minus: ScalarFn, iota: i32, scale: f64| {
            let fs = move |t: f64| f_traj(t, w) * math::powf(q(t), iota as f64);
            let fs_prime = move |t: f64| {
                let qi = math::powf(q(t), iota as f64);
                let dqi = if iota == 0 {
                    0.0
                } else {
                    iota as f64 * math::powf(q(t), (iota - 1) as f64) * q_prime(t)
                };
                f_prime(t, w) * qi + f_traj(t, w) * dqi
            };
            DemVariableSpec {
                name: name.to_string(),
                x,
                y_plus,
                y_minus,
                f: ScalarFn::with_derivative(fs, fs_prime),
                h: ScalarFn::new(move |t| fs_prime(t) / 2.0),
                scale,
                s_sigma: params.n_pow(2.0 * eps),
                lambda: params.n_pow(eps),
                beta: 1.0,
                tau: params.n_pow(eps),
                u_sigma: params.u as f64 * params.n_pow(eps),
                s,
                m: params.m as f64,
            }
        };
    let t4 = |t: f64| math::powf(t, 4.0);
    let open = common(
        "open",
        ScalarFn::with_derivative(
            |t| math::powf(q(t), 3.0),
            |t| 3.0 * q(t) * q(t) * q_prime(t),
        ),
        ScalarFn::constant(0.0),
        ScalarFn::new(move |t| 240.0 * t4(t) * math::powf(q(t), 3.0)),
        2,
        k * k * k,
    );
    let interm = common(
        "interm",
        ScalarFn::with_derivative(
            |t| 2.0 * t * q(t) * q(t),
            |t| 2.0 * q(t) * q(t) + 4.0 * t * q(t) * q_prime(t),
        ),
        ScalarFn::new(|t| 2.0 * q(t) * q(t)),
        ScalarFn::new(move |t| 320.0 * t * t4(t) * q(t) * q(t)),
        1,
        k * k * k * p,
    );
    let partial = common(
        "partial",
        ScalarFn::with_derivative(
            |t| 2.0 * t * t * q(t),
            |t| 4.0 * t * q(t) + 2.0 * t * t * q_prime(t),
        ),
        ScalarFn::new(|t| 4.0 * t * q(t)),
        ScalarFn::new(move |t| 160.0 * t * t * t4(t) * q(t)),
        0,
        k * k * k * p * p,
    );
    [open, interm, partial]
}

/// `Z^{±₁±₂}` sequences of one variable with their bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleAudit {
    #[serde(rename = "Z_pp")]
    pub z_pp: Vec<f64>,
    #[serde(rename = "Z_pm")]
    pub z_pm: Vec<f64>,
    #[serde(rename = "Z_mp")]
    pub z_mp: Vec<f64>,
    #[serde(rename = "Z_mm")]
    pub z_mm: Vec<f64>,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(rename = "N")]
    pub n_bound: f64,
    pub a: f64,
    pub max_excursion: f64,
    pub frozen_at: Option<usize>,
    /// Unfrozen steps with some increment outside `[-M, N]`.
    pub out_of_bounds: Vec<usize>,
    pub m_le_n_over_10: bool,
    pub reached_a: bool,
}

impl MartingaleAudit {
    pub fn increments_in_bounds(&self) -> bool {
        self.out_of_bounds.is_empty()
    }
}

/// Turns per-step observed `(Y⁺, Y⁻)` into the four compensated sums,
/// with every increment from `freeze_at` on set to zero.
pub fn transform_increments(
    spec: &DemVariableSpec,
    observed: &[(f64, f64)],
    freeze_at: Option<usize>,
) -> Result<MartingaleAudit> {
    if observed.len() as f64 > spec.m {
        return Err(invalid(format!(
            "{} observed steps exceed the horizon m = {}",
            observed.len(),
            spec.m
        )));
    }
    let m_bound = 3.0 * spec.lambda * spec.scale / spec.s;
    let n_bound = 2.0 * spec.beta * spec.beta
        / (spec.s_sigma * spec.s_sigma * spec.lambda * spec.tau * spec.u_sigma)
        * spec.scale;
    let a = spec.beta / 6.0 * spec.scale / spec.s_sigma;
    let len = observed.len() + 1;
    let mut z = [
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    ];
    for seq in z.iter_mut() {
        seq.push(0.0);
    }
    let signs = [(true, true), (true, false), (false, true), (false, false)];
    let mut out_of_bounds = Vec::new();
    for (i, &(yp, ym)) in observed.iter().enumerate() {
        let frozen = freeze_at.is_some_and(|f| i >= f);
        let t = i as f64 / spec.s;
        let mut bad = false;
        for (seq, &(p1, p2)) in z.iter_mut().zip(&signs) {
            let inc = if frozen {
                0.0
            } else {
                let y = if p1 { yp } else { ym };
                y - spec.compensator(t, p1, p2)
            };
            if !frozen && !(-m_bound..=n_bound).contains(&inc) {
                bad = true;
            }
            let last = *seq.last().unwrap_or(&0.0);
            seq.push(last + inc);
        }
        if bad {
            out_of_bounds.push(i);
        }
    }
    let max_excursion = z
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(math::abs(*v)));
    let [z_pp, z_pm, z_mp, z_mm] = z;
    Ok(MartingaleAudit {
        z_pp,
        z_pm,
        z_mp,
        z_mm,
        m_bound,
        n_bound,
        a,
        max_excursion,
        frozen_at: freeze_at,
        out_of_bounds,
        m_le_n_over_10: m_bound <= n_bound / 10.0,
        reached_a: max_excursion >= a,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub bound: f64,
    /// `0 < a < m·M`.
    pub hypothesis_ok: bool,
}

/// `exp(−a² / (3 m M N))`.
pub fn hoeffding_bound(a: f64, m: f64, big_m: f64, big_n: f64) -> Result<TailBound> {
    if !(a > 0.0 && m > 0.0 && big_m > 0.0 && big_n > 0.0) {
        return Err(invalid(format!(
            "tail bound needs positive inputs, got a={a}, m={m}, M={big_m}, N={big_n}"
        )));
    }
    Ok(TailBound {
        bound: math::exp(-a * a / (3.0 * m * big_m * big_n)),
        hypothesis_ok: a < m * big_m,
    })
}

/// Final value of an `m`-step martingale whose increments are `+N` with
/// probability `M/(M+N)` and `−M` otherwise.
pub fn two_point_walk<R: Rng + ?Sized>(m: usize, big_m: f64, big_n: f64, rng: &mut R) -> f64 {
    let up = big_m / (big_m + big_n);
    (0..m)
        .map(|_| if rng.gen_bool(up) { big_n } else { -big_m })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub a: f64,
    pub empirical: f64,
    pub bound: f64,
}

/// Empirical upper tails of [`two_point_walk`] at each `a` next to the
/// bound.
pub fn synthetic_tails<R: Rng + ?Sized>(
    m: usize,
    big_m: f64,
    big_n: f64,
    trials: usize,
    a_grid: &[f64],
    rng: &mut R,
) -> Result<Vec<TailPoint>> {
    let finals: Vec<f64> = (0..trials)
        .map(|_| two_point_walk(m, big_m, big_n, rng))
        .collect();
    a_grid
        .iter()
        .map(|&a| {
            let bound = hoeffding_bound(a, m as f64, big_m, big_n)?.bound;
            let hits = finals.iter().filter(|&&x| x >= a).count();
            Ok(TailPoint {
                a,
                empirical: hits as f64 / trials.max(1) as f64,
                bound,
            })
        })
        .collect()
}
