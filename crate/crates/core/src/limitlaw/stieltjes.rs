//! Stieltjes transform `G(z) = ∫ dF⟨r⟩(x) / (z - x)`.
//!
//! Outside the disc `|z| ≤ L(r)` the moment series `Σ m_k z^{-k-1}`
//! converges geometrically and equals the `rF_{r-1}` representation
//! `(1 - rF_{r-1}[-1/(r+1),…,-r/(r+1); -1/r,…,-(r-1)/r; L/z]) / (r+1)`.
//! Both are summed here by their own term recurrences. For `r = 1, 2` the
//! transform is algebraic and can be evaluated anywhere off the support,
//! which is what the inversion check uses.

use num_complex::Complex64;

use super::{LawError, LimitLaw};

/// Relative margin kept between `|z|` and `L(r)` by the series evaluators.
pub const DOMAIN_MARGIN: f64 = 1e-3;

/// Upper bound on summed terms.
const TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesValue {
    pub value: Complex64,
    /// Number of terms summed.
    pub terms: usize,
    /// Bound on the neglected tail.
    pub tail_bound: f64,
}

fn check_domain(r: usize, z: Complex64, tol: f64) -> Result<f64, LawError> {
    let edge = LimitLaw::new(r)?.edge();
    if !(tol > 0.0) {
        return Err(LawError::InvalidArgument(format!("tolerance {tol}")));
    }
    if !(z.norm() > edge * (1.0 + DOMAIN_MARGIN)) {
        return Err(LawError::OutsideDomain(format!(
            "|z| = {} must exceed L({r})·(1 + {DOMAIN_MARGIN}) = {}",
            z.norm(),
            edge * (1.0 + DOMAIN_MARGIN)
        )));
    }
    Ok(edge)
}

/// Sums terms `t_0, t_1, …` given by `next(n, t_n) = t_{n+1}` until the
/// geometric tail bound with ratio `q` drops below `tol`.
fn sum_geometric<F>(
    first: Complex64,
    q: f64,
    tol: f64,
    mut next: F,
) -> Result<StieltjesValue, LawError>
where
    F: FnMut(usize, Complex64) -> Complex64,
{
    let mut term = first;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..TERM_CAP {
        sum += term;
        term = next(n, term);
        let tail = term.norm() / (1.0 - q);
        if tail < tol {
            return Ok(StieltjesValue {
                value: sum,
                terms: n + 1,
                tail_bound: tail,
            });
        }
    }
    Err(LawError::NoConvergence(format!(
        "tail bound above {tol:e} after {TERM_CAP} terms"
    )))
}

/// `G(z)` from the moment series, for `|z| > L(r)(1 + margin)`.
pub fn stieltjes(r: usize, z: Complex64, tol: f64) -> Result<StieltjesValue, LawError> {
    let edge = check_domain(r, z, tol)?;
    let q = edge / z.norm();
    let w = z.inv();
    // m_{k+1}/m_k = ∏_{i=1}^{r+1}((r+1)k+i) / ((k+2) ∏_{i=1}^{r}(rk+i)); every
    // such ratio is below L(r), so q bounds the tail
    sum_geometric(w, q, tol, |k, t| {
        let (kf, rf) = (k as f64, r as f64);
        let mut ratio = 1.0 / (kf + 2.0);
        for i in 1..=r {
            ratio *= ((rf + 1.0) * kf + i as f64) / (rf * kf + i as f64);
        }
        ratio *= (rf + 1.0) * kf + rf + 1.0;
        t * ratio * w
    })
}

/// `G(z)` from the hypergeometric term recurrence.
pub fn stieltjes_hypergeometric(
    r: usize,
    z: Complex64,
    tol: f64,
) -> Result<StieltjesValue, LawError> {
    let edge = check_domain(r, z, tol)?;
    let q = edge / z.norm();
    let rf = r as f64;
    let upper: Vec<f64> = (1..=r).map(|i| -(i as f64) / (rf + 1.0)).collect();
    let lower: Vec<f64> = (1..r).map(|i| -(i as f64) / rf).collect();
    let arg = Complex64::new(edge, 0.0) / z;
    // the n = 0 term of rF_{r-1} is 1 and cancels; start from n = 1
    let term_ratio = |n: usize| -> f64 {
        let nf = n as f64;
        let num: f64 = upper.iter().map(|a| a + nf).product();
        let den: f64 = lower.iter().map(|b| b + nf).product();
        num / (den * (nf + 1.0))
    };
    let scale = -1.0 / (rf + 1.0);
    let first = arg * term_ratio(0) * scale;
    // term n+1 carries the ratio at Pochhammer index n+1
    sum_geometric(first, q, tol, |n, t| t * arg * term_ratio(n + 1))
}

/// `G(z)` in closed form for `r = 1` and `r = 2`, valid anywhere off
/// `[0, L(r)]`.
///
/// `r = 1`: `(1 - √(1 - 4/z))/2` on the principal branch.
/// `r = 2`: `(T + T²)/(2z)` where `T³ - zT + z = 0` and `T → 1` as
/// `z → ∞`. The root is tracked by Newton's method along a vertical path
/// from far above the real axis, so it never crosses the cut.
pub fn stieltjes_closed_form(r: usize, z: Complex64) -> Result<Complex64, LawError> {
    let edge = LimitLaw::new(r)?.edge();
    if z.im == 0.0 && z.re >= 0.0 && z.re <= edge {
        return Err(LawError::OutsideDomain(format!(
            "z = {z} lies on the support"
        )));
    }
    match r {
        1 => {
            let one = Complex64::new(1.0, 0.0);
            Ok((one - (one - 4.0 / z).sqrt()) * 0.5)
        }
        2 => Ok(cubic_branch(z)),
        _ => Err(LawError::InvalidArgument(format!(
            "no closed form for order {r}"
        ))),
    }
}

fn cubic_branch(z: Complex64) -> Complex64 {
    let newton = |t: &mut Complex64, z: Complex64, steps: usize| {
        for _ in 0..steps {
            let f = *t * *t * *t - z * *t + z;
            let df = 3.0 * *t * *t - z;
            let step = f / df;
            *t -= step;
            if step.norm() < 1e-16 * t.norm() {
                break;
            }
        }
    };
    let mut t = Complex64::new(1.0, 0.0);
    if z.norm() > 1e3 {
        newton(&mut t, z, 60);
        return (t + t * t) / (2.0 * z);
    }
    // walk in from height 1e3 on the same side of the real axis as z
    let sign = if z.im < 0.0 { -1.0 } else { 1.0 };
    // below this height the root no longer moves appreciably
    let floor = z.im.abs().max(1e-12);
    let mut y: f64 = 1e3;
    newton(&mut t, Complex64::new(z.re, sign * y), 60);
    while y > floor {
        y = (y * 0.8).max(floor);
        newton(&mut t, Complex64::new(z.re, sign * y), 40);
    }
    newton(&mut t, z, 40);
    (t + t * t) / (2.0 * z)
}

/// Density recovered by Stieltjes inversion of the closed form at
/// `x + iε` for `ε = 1e-3, 1e-4`, extrapolated linearly to `ε = 0`.
pub fn inversion_density(r: usize, x: f64) -> Result<f64, LawError> {
    let at = |eps: f64| -> Result<f64, LawError> {
        Ok(-stieltjes_closed_form(r, Complex64::new(x, eps))?.im / std::f64::consts::PI)
    };
    let (e1, e2) = (1e-3, 1e-4);
    let (f1, f2) = (at(e1)?, at(e2)?);
    Ok(f2 + (f2 - f1) * e2 / (e1 - e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitlaw::{density_mp, density_r2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn marchenko_pastur_at_five() {
        let expected = (1.0 - 0.2f64.sqrt()) / 2.0;
        let g = stieltjes(1, c(5.0, 0.0), 1e-13).unwrap();
        assert!((g.value.re - expected).abs() < 1e-10, "{g:?}");
        assert!(g.value.im.abs() < 1e-15);
        let closed = stieltjes_closed_form(1, c(5.0, 0.0)).unwrap();
        assert!((closed.re - expected).abs() < 1e-15);
    }

    #[test]
    fn leading_behaviour_at_infinity() {
        for r in 1..=4 {
            let l = LimitLaw::new(r).unwrap().edge();
            for phase in [0.0, 1.0, 2.5, -2.0] {
                let z = Complex64::from_polar(1e6 * l, phase);
                let g = stieltjes(r, z, 1e-14).unwrap();
                assert!((z * g.value - 1.0).norm() < 1e-5, "r = {r}");
            }
        }
    }

    #[test]
    fn series_agrees_with_hypergeometric_recurrence() {
        for r in 1..=5 {
            for z in [c(10.0, 0.0), c(0.0, 12.0), c(-9.0, 7.0), c(40.0, -3.0)] {
                let l = LimitLaw::new(r).unwrap().edge();
                let z = z * (l / 4.0);
                let a = stieltjes(r, z, 1e-14).unwrap().value;
                let b = stieltjes_hypergeometric(r, z, 1e-14).unwrap().value;
                assert!((a - b).norm() < 1e-10, "r = {r}, z = {z}: {a} vs {b}");
            }
        }
        let a = stieltjes(2, c(10.0, 0.0), 1e-14).unwrap().value;
        let b = stieltjes_hypergeometric(2, c(10.0, 0.0), 1e-14)
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn closed_forms_agree_with_series() {
        for r in 1..=2 {
            for z in [c(10.0, 0.0), c(0.3, 9.0), c(-8.0, -1.0), c(7.0, 0.5)] {
                let a = stieltjes(r, z, 1e-14).unwrap().value;
                let b = stieltjes_closed_form(r, z).unwrap();
                assert!((a - b).norm() < 1e-12, "r = {r}, z = {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(
            stieltjes(1, c(4.0, 0.0), 1e-10),
            Err(LawError::OutsideDomain(_))
        ));
        assert!(matches!(
            stieltjes(2, c(0.0, 6.755), 1e-10),
            Err(LawError::OutsideDomain(_))
        ));
        assert!(matches!(
            stieltjes_closed_form(1, c(2.0, 0.0)),
            Err(LawError::OutsideDomain(_))
        ));
        assert!(stieltjes_closed_form(3, c(20.0, 0.0)).is_err());
        assert_eq!(
            stieltjes(0, c(5.0, 0.0), 1e-10).unwrap_err(),
            LawError::InvalidOrder(0)
        );
    }

    #[test]
    fn inversion_recovers_closed_form_densities() {
        for i in 1..20 {
            let x = 4.0 * i as f64 / 20.0;
            let d = inversion_density(1, x).unwrap();
            assert!((d - density_mp(x)).abs() < 1e-3, "x = {x}");
            let x = 6.75 * i as f64 / 20.0;
            let d = inversion_density(2, x).unwrap();
            assert!((d - density_r2(x)).abs() < 1e-3, "x = {x}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = c(3.0, 0.7);
        for r in 1..=2 {
            let a = stieltjes_closed_form(r, z).unwrap();
            let b = stieltjes_closed_form(r, z.conj()).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }
}
