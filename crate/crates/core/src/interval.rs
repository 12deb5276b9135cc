//! `a ± b` intervals and executable forms of the inclusion rules used to
//! propagate them.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::Result;

/// Relative slack applied by the inclusion checks in this module.
pub const REL_SLACK: f64 = 1e-12;

/// The closed interval `[center − radius, center + radius]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmInterval {
    pub center: f64,
    pub radius: f64,
}

impl PmInterval {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !center.is_finite() {
            return Err(invalid(format!("bad interval {center} ± {radius}")));
        }
        Ok(PmInterval { center, radius })
    }

    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        PmInterval {
            center: 0.5 * (lo + hi),
            radius: 0.5 * (hi - lo),
        }
    }

    pub fn point(x: f64) -> Self {
        PmInterval {
            center: x,
            radius: 0.0,
        }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.center + self.radius
    }

    /// `inner ⊆ self` exactly.
    pub fn contains(&self, inner: &PmInterval) -> bool {
        self.contains_with_slack(inner, 0.0)
    }

    /// `inner ⊆ self` with the outer endpoints widened by `slack`.
    pub fn contains_with_slack(&self, inner: &PmInterval, slack: f64) -> bool {
        inner.lo() >= self.lo() - slack && inner.hi() <= self.hi() + slack
    }

    pub fn contains_value(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    /// Exact interval product from the four endpoint products.
    pub fn mul(&self, other: &PmInterval) -> PmInterval {
        let c = [
            self.lo() * other.lo(),
            self.lo() * other.hi(),
            self.hi() * other.lo(),
            self.hi() * other.hi(),
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        PmInterval::from_bounds(lo, hi)
    }

    fn widen(self, r: f64) -> PmInterval {
        PmInterval {
            center: self.center,
            radius: self.radius + r,
        }
    }

    fn rel_slack(&self, inner: &PmInterval) -> f64 {
        REL_SLACK
            * self
                .lo()
                .abs()
                .max(self.hi().abs())
                .max(inner.hi().abs())
                .max(1.0)
    }
}

/// `{1/(1+s) : |s| ≤ x}` and the claimed enclosure `1 ± 2x`.
pub fn reciprocal_envelope(x: f64) -> Result<(PmInterval, PmInterval)> {
    if !(0.0..=0.5).contains(&x) {
        return Err(invalid(format!(
            "reciprocal envelope needs 0 <= x <= 1/2, got {x}"
        )));
    }
    let computed = PmInterval::from_bounds(1.0 / (1.0 + x), 1.0 / (1.0 - x));
    Ok((computed, PmInterval::point(1.0).widen(2.0 * x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Inclusion {
    HypothesisNotMet,
    Holds,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCase {
    pub outcome: Inclusion,
    pub computed: PmInterval,
    pub claimed: PmInterval,
}

impl InclusionCase {
    fn evaluate(hypothesis: bool, computed: PmInterval, claimed: PmInterval) -> Self {
        let outcome = if !hypothesis {
            Inclusion::HypothesisNotMet
        } else if claimed.contains_with_slack(&computed, claimed.rel_slack(&computed)) {
            Inclusion::Holds
        } else {
            Inclusion::Violated
        };
        InclusionCase {
            outcome,
            computed,
            claimed,
        }
    }
}

/// Both product rules for one parameter tuple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    /// `(x ± f_x)(1 ± g) ⊆ x ± h` when `f_x + x g ≤ h/2`.
    pub single: InclusionCase,
    /// `(x ± f_x)(y ± f_y)(1 ± g) ⊆ xy ± h` when
    /// `x f_y + y f_x + f_x f_y + x y g ≤ h/2`.
    pub double: InclusionCase,
}

impl ProductReport {
    pub fn any_violated(&self) -> bool {
        self.single.outcome == Inclusion::Violated || self.double.outcome == Inclusion::Violated
    }
}

pub fn product_envelope(
    x: f64,
    y: f64,
    f_x: f64,
    f_y: f64,
    g: f64,
    h: f64,
) -> Result<ProductReport> {
    for (name, v) in [
        ("x", x),
        ("y", y),
        ("f_x", f_x),
        ("f_y", f_y),
        ("g", g),
        ("h", h),
    ] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(invalid(format!(
                "{name} must be a non-negative real, got {v}"
            )));
        }
    }
    if g > 1.0 {
        return Err(invalid(format!("g must be at most 1, got {g}")));
    }
    let xi = PmInterval {
        center: x,
        radius: f_x,
    };
    let yi = PmInterval {
        center: y,
        radius: f_y,
    };
    let gi = PmInterval {
        center: 1.0,
        radius: g,
    };
    let tol = |v: f64| v * (1.0 + REL_SLACK);

    let single = InclusionCase::evaluate(
        f_x + x * g <= tol(h / 2.0),
        xi.mul(&gi),
        PmInterval {
            center: x,
            radius: h,
        },
    );
    let double = InclusionCase::evaluate(
        x * f_y + y * f_x + f_x * f_y + x * y * g <= tol(h / 2.0),
        xi.mul(&yi).mul(&gi),
        PmInterval {
            center: x * y,
            radius: h,
        },
    );
    Ok(ProductReport { single, double })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(c: f64, r: f64) -> PmInterval {
        PmInterval::new(c, r).unwrap()
    }

    #[test]
    fn containment() {
        assert!(iv(1.0, 1.0).contains(&iv(1.0, 0.5)));
        assert!(!iv(1.0, 0.5).contains(&iv(1.0, 1.0)));
        assert!(iv(0.0, 0.0).contains(&iv(0.0, 0.0)));
        assert!(iv(0.0, 0.0).contains_with_slack(&iv(0.0, 0.1), 0.1));
        assert!(PmInterval::new(0.0, -1.0).is_err());
    }

    #[test]
    fn reciprocal_examples() {
        let (c, k) = reciprocal_envelope(0.0).unwrap();
        assert_eq!((c.lo(), c.hi()), (1.0, 1.0));
        assert!(k.contains(&c));
        let (c, k) = reciprocal_envelope(0.5).unwrap();
        assert!((c.lo() - 2.0 / 3.0).abs() < 1e-15 && (c.hi() - 2.0).abs() < 1e-15);
        assert_eq!((k.lo(), k.hi()), (0.0, 2.0));
        assert!(k.contains(&c));
        assert!(reciprocal_envelope(0.6).is_err());
        assert!(reciprocal_envelope(-0.1).is_err());
    }

    #[test]
    fn product_examples() {
        let r = product_envelope(1.0, 1.0, 0.1, 0.0, 0.1, 0.4).unwrap();
        assert_eq!(r.single.outcome, Inclusion::Holds);
        assert!((r.single.computed.lo() - 0.81).abs() < 1e-12);
        assert!((r.single.computed.hi() - 1.21).abs() < 1e-12);
        let r = product_envelope(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(r.single.outcome, Inclusion::Holds);
        assert_eq!(r.double.outcome, Inclusion::Holds);
        let r = product_envelope(1.0, 1.0, 0.5, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(r.single.outcome, Inclusion::HypothesisNotMet);
        assert!(product_envelope(1.0, 1.0, 0.0, 0.0, 1.5, 1.0).is_err());
    }
}
