//! Moments of `F⟨r⟩` by two routes independent of the binomial formula.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use super::{support_edge, LawError};
use crate::quadrature::periodic_trapezoid;

/// `E Y^k` from the uniform-times-Betas factorization, in exact arithmetic:
/// `L^k/(k+1) · ∏_j ∏_{i<k} (j/(r+1) + i) / (j/r + i)`.
pub fn beta_product_moment(r: usize, k: usize) -> Result<BigRational, LawError> {
    let edge = support_edge(r)?;
    let mut acc = num_traits::pow(edge, k) / BigRational::from_integer(BigInt::from(k + 1));
    let rb = BigInt::from(r);
    let r1 = BigInt::from(r + 1);
    for j in 1..=r {
        let a = BigRational::new(BigInt::from(j), r1.clone());
        let ab = BigRational::new(BigInt::from(j), rb.clone());
        for i in 0..k {
            let i = BigRational::from_integer(BigInt::from(i));
            acc *= (&a + &i) / (&ab + &i);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourMoment {
    pub value: f64,
    /// Imaginary part of the same quadrature; zero up to rounding.
    pub imag: f64,
    /// Nodes used by the accepted rule.
    pub nodes: usize,
}

/// Largest node count tried before giving up.
const MAX_NODES: usize = 1 << 22;

/// `(1/(k+1)) ∫_0^1 [e^{-2πiu}(1 + e^{2πiu})^{r+1}]^k du` by the periodic
/// trapezoid rule, doubling from `resolution` nodes until two successive
/// values agree to `tol` (relative to the value, or absolute below 1).
pub fn contour_moment(
    r: usize,
    k: usize,
    resolution: usize,
    tol: f64,
) -> Result<ContourMoment, LawError> {
    support_edge(r)?;
    if resolution == 0 || !(tol > 0.0) {
        return Err(LawError::InvalidArgument(format!(
            "resolution {resolution}, tolerance {tol}"
        )));
    }
    let power = (r + 1) as i32;
    let kk = k as i32;
    let rule = |n: usize| -> Complex64 {
        periodic_trapezoid(
            |u| {
                let e = Complex64::from_polar(1.0, std::f64::consts::TAU * u);
                (e.inv() * (Complex64::one() + e).powi(power)).powi(kk)
            },
            n,
        ) / (k as f64 + 1.0)
    };
    let mut n = resolution;
    let mut prev = rule(n);
    while n < MAX_NODES {
        n *= 2;
        let next = rule(n);
        if (next.re - prev.re).abs() <= tol * next.re.abs().max(1.0) {
            return Ok(ContourMoment {
                value: next.re,
                imag: next.im,
                nodes: n,
            });
        }
        prev = next;
    }
    Err(LawError::NoConvergence(format!(
        "contour moment k = {k} unstable at {n} nodes"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn binomial_moment(r: usize, k: usize) -> BigRational {
        let n = (r + 1) * k;
        let mut c = BigInt::one();
        for i in 0..k {
            c = c * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        BigRational::new(c, BigInt::from(k + 1))
    }

    #[test]
    fn product_matches_worked_example() {
        assert_eq!(
            beta_product_moment(2, 2).unwrap(),
            BigRational::from_integer(5.into())
        );
        assert_eq!(
            beta_product_moment(1, 3).unwrap(),
            BigRational::from_integer(5.into())
        );
        for r in 1..=6 {
            assert_eq!(beta_product_moment(r, 0).unwrap(), BigRational::one());
        }
        assert_eq!(beta_product_moment(0, 2), Err(LawError::InvalidOrder(0)));
    }

    #[test]
    fn product_telescopes_to_binomial_formula() {
        for r in 1..=5 {
            for k in 0..=8 {
                assert_eq!(
                    beta_product_moment(r, k).unwrap(),
                    binomial_moment(r, k),
                    "r={r} k={k}"
                );
            }
        }
    }

    #[test]
    fn contour_route_reproduces_moments() {
        let v = contour_moment(1, 2, 4, 1e-12).unwrap();
        assert!((v.value - 2.0).abs() < 1e-8);
        let v = contour_moment(2, 3, 4, 1e-12).unwrap();
        assert!((v.value - 21.0).abs() < 1e-8);
        for r in 1..=4 {
            let v = contour_moment(r, 0, 1, 1e-12).unwrap();
            assert!((v.value - 1.0).abs() < 1e-14);
            for k in 1..=6 {
                let v = contour_moment(r, k, 8, 1e-13).unwrap();
                let exact = binomial_moment(r, k).to_f64().unwrap();
                assert!(((v.value - exact) / exact).abs() < 1e-10, "r={r} k={k}");
                assert!(v.imag.abs() < 1e-8 * exact);
            }
        }
    }

    #[test]
    fn contour_rejects_bad_arguments() {
        assert!(contour_moment(2, 3, 0, 1e-10).is_err());
        assert!(contour_moment(0, 3, 8, 1e-10).is_err());
    }
}
