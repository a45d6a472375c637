//! The triangular-matrix limit law on `[0, e]`, given parametrically by
//! `x(v) = (sin v / v)·e^{v cot v}` and `f(v) = sin v · e^{-v cot v} / π`
//! for `v ∈ (0, π)`.

use std::f64::consts::PI;

use super::LawError;
use crate::quadrature::{integrate, Tolerance};

/// Right end of the support.
pub const DH_EDGE: f64 = std::f64::consts::E;

/// `(x(v), f(v))` for `0 < v < π`.
pub fn dh_density_param(v: f64) -> Result<(f64, f64), LawError> {
    if !(v > 0.0 && v < PI) {
        return Err(LawError::OutsideDomain(format!("angle {v} not in (0, π)")));
    }
    let (s, c) = v.sin_cos();
    let vc = v * c / s;
    Ok(((s / v) * vc.exp(), s * (-vc).exp() / PI))
}

/// Angle `v` with `x(v) = x`; `x(v)` falls from `e` to `0` on `(0, π)`.
fn angle_of(x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (xm, _) = dh_density_param(mid).expect("interior angle");
        if xm > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Density at `x`, zero outside `(0, e)`.
pub fn dh_density(x: f64) -> f64 {
    if !(x > 0.0 && x < DH_EDGE) {
        return 0.0;
    }
    dh_density_param(angle_of(x)).expect("interior angle").1
}

/// Distribution function at `x`.
///
/// With `F(x) = ∫_{v(x)}^π f(v)·|x'(v)| dv` the integrand simplifies to
/// `(1 - sin 2v / v + sin²v / v²)/π`, which is smooth on `[0, π]`.
pub fn dh_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= DH_EDGE {
        return 1.0;
    }
    let v0 = angle_of(x);
    let g = |v: f64| {
        let s = v.sin();
        (1.0 - (2.0 * v).sin() / v + s * s / (v * v)) / PI
    };
    integrate(g, v0, PI, Tolerance::new(1e-14, 1e-13))
        .value
        .clamp(0.0, 1.0)
}
