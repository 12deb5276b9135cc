// Thin wrappers so the rest of the crate reads like ordinary float code
// without depending on std.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Ceiling that treats values within 1e-9 (relative) of an integer as that
/// integer, so that e.g. `1024^(8/5)` evaluated in floating point lands on
/// 65536 instead of 65537.
pub fn ceil_tol(x: f64) -> f64 {
    let r = libm::round(x);
    let scale = if abs(x) > 1.0 { abs(x) } else { 1.0 };
    if abs(x - r) <= 1e-9 * scale {
        r
    } else {
        libm::ceil(x)
    }
}
