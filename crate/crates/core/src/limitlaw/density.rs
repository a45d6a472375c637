//! Density of `F⟨r⟩` by iterated Mellin convolution.
//!
//! Write the law as `L(r)·U·B_1⋯B_r`. In logarithmic coordinates the
//! density of a product is a convolution, so with `κ = ln(L(r)/x)`
//!
//! ```text
//! f(x)   = H_r(κ) / L(r)
//! H_0(κ) = 1                                     (κ > 0)
//! H_j(κ) = ∫_0^κ ψ_j(μ) H_{j-1}(κ - μ) dμ
//! ψ_j(μ) = β_j(e^{-μ}),  β_j the Beta(a_j, b_j) density
//! ```
//!
//! `H_1` is summed as a convergent series; each further level is an adaptive
//! Gauss–Kronrod integral split at `κ/2`. The left half carries the
//! `μ^{b_j-1}` singularity of `ψ_j` and is flattened by `μ = m·s^{1/b_j}`;
//! the right half carries the `κ'^{b_1+⋯+b_{j-1}}` soft-edge behaviour of
//! `H_{j-1}` and is flattened by a matching power substitution.

use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::{beta_parameters, LawError, LimitLaw};
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, Copy)]
struct BetaFactor {
    a: f64,
    b: f64,
    log_norm: f64,
    /// Unnormalized `∫_{1/2}^1 t^{a-2}(1-t)^{b-1} dt`.
    upper_half_mass: f64,
}

impl BetaFactor {
    fn new(a: f64, b: f64) -> Self {
        let log_norm = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b);
        let mut f = Self {
            a,
            b,
            log_norm,
            upper_half_mass: 0.0,
        };
        f.upper_half_mass = f.upper_series(0.5);
        f
    }

    /// Beta density evaluated at `e^{-μ}`.
    fn psi(&self, mu: f64) -> f64 {
        let one_minus = -(-mu).exp_m1();
        (self.log_norm + mu * (1.0 - self.a) + (self.b - 1.0) * one_minus.ln()).exp()
    }

    /// `∫_{1-w}^1 t^{a-2}(1-t)^{b-1} dt = Σ (2-a)_n/n! · w^{b+n}/(b+n)` for
    /// `w ≤ 1/2`.
    fn upper_series(&self, w: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let mut coef = 1.0;
        let mut wpow = w.powf(b);
        let mut sum = 0.0;
        for n in 0..400 {
            let nf = n as f64;
            let term = coef * wpow / (b + nf);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            coef *= (2.0 - a + nf) / (nf + 1.0);
            wpow *= w;
        }
        sum
    }

    /// `∫_0^κ ψ(μ) dμ`, i.e. the integral of `t^{a-2}(1-t)^{b-1}` over
    /// `[e^{-κ}, 1]`, normalized.
    fn cumulative_psi(&self, kappa: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let s = if kappa <= std::f64::consts::LN_2 {
            self.upper_series(-(-kappa).exp_m1())
        } else {
            // [t0, 1/2] by expanding (1-t)^{b-1} = Σ (1-b)_n/n! t^n
            let t0 = (-kappa).exp();
            let mut half_pow = 0.5f64.powf(a - 1.0);
            let mut t0_pow = (-kappa * (a - 1.0)).exp();
            let mut sum = self.upper_half_mass;
            let mut coef = 1.0;
            for n in 0..400 {
                let nf = n as f64;
                let e = a - 1.0 + nf;
                let term = coef * (half_pow - t0_pow) / e;
                sum += term;
                if term.abs() < 1e-17 * sum.abs() {
                    break;
                }
                coef *= (1.0 - b + nf) / (nf + 1.0);
                half_pow *= 0.5;
                t0_pow *= t0;
            }
            sum
        };
        s * self.log_norm.exp()
    }
}

/// Evaluator for `H_j`, shared across abscissae.
struct Convolution {
    factors: Vec<BetaFactor>,
    /// `b_1 + ⋯ + b_j`: soft-edge exponent of `H_j`.
    soft_exponents: Vec<f64>,
}

impl Convolution {
    fn new(r: usize) -> Self {
        let factors: Vec<BetaFactor> = beta_parameters(r)
            .into_iter()
            .map(|(a, b)| BetaFactor::new(a, b))
            .collect();
        let mut soft_exponents = vec![0.0];
        let mut acc = 0.0;
        for f in &factors {
            acc += f.b;
            soft_exponents.push(acc);
        }
        Self {
            factors,
            soft_exponents,
        }
    }

    /// `H_level(κ)` with a relative error estimate.
    fn h(&self, level: usize, kappa: f64, rel_tol: f64) -> (f64, f64) {
        match level {
            0 => (1.0, 0.0),
            1 => (self.factors[0].cumulative_psi(kappa), 1e-14),
            _ => self.h_quadrature(level, kappa, rel_tol),
        }
    }

    fn h_quadrature(&self, level: usize, kappa: f64, rel_tol: f64) -> (f64, f64) {
        let factor = self.factors[level - 1];
        let inner_tol = rel_tol * 0.25;
        let worst_inner = Cell::new(0.0f64);
        let tol = Tolerance::new(0.0, rel_tol * 0.5).with_max_intervals(60);

        let m = 0.5 * kappa;
        // left: μ = m s^p with p = 1/b, so μ^{b-1} dμ = (m^b / b) ds
        let p = 1.0 / factor.b;
        let log_pref = factor.log_norm + factor.b * m.ln() + p.ln();
        let left = integrate(
            |s| {
                let mu = m * s.powf(p);
                let g = if mu < 1e-8 {
                    1.0 - 0.5 * mu
                } else {
                    -(-mu).exp_m1() / mu
                };
                let weight = (log_pref + mu * (1.0 - factor.a) + (factor.b - 1.0) * g.ln()).exp();
                let (inner, rel) = self.h(level - 1, kappa - mu, inner_tol);
                worst_inner.set(worst_inner.get().max(rel));
                weight * inner
            },
            0.0,
            1.0,
            tol,
        );

        // right: κ' = w t^q flattens κ'^s dκ' to O(t) near t = 0
        let w = kappa - m;
        let q = 2.0 / (1.0 + self.soft_exponents[level - 1]);
        let right = integrate(
            |t| {
                let tq1 = t.powf(q - 1.0);
                let kp = w * tq1 * t;
                let jac = w * q * tq1;
                let (inner, rel) = self.h(level - 1, kp, inner_tol);
                worst_inner.set(worst_inner.get().max(rel));
                factor.psi(kappa - kp) * inner * jac
            },
            0.0,
            1.0,
            tol,
        );

        let value = left.value + right.value;
        let rel =
            (left.abs_err + right.abs_err) / value.abs().max(f64::MIN_POSITIVE) + worst_inner.get();
        (value, rel)
    }
}

/// Density of `F⟨r⟩` at `x ∈ (0, L(r))`, to relative accuracy about `tol`.
///
/// The reported absolute error is the quadrature estimate including what
/// propagates from the inner levels. `ToleranceNotMet` is returned when that
/// estimate exceeds `max(tol, tol·f(x))`.
pub fn density(r: usize, x: f64, tol: f64) -> Result<DensityValue, LawError> {
    let law = LimitLaw::new(r)?;
    let conv = Convolution::new(r);
    density_with(&law, &conv, x, tol)
}

fn density_with(
    law: &LimitLaw,
    conv: &Convolution,
    x: f64,
    tol: f64,
) -> Result<DensityValue, LawError> {
    let edge = law.edge();
    if !(x > 0.0 && x < edge) {
        return Err(LawError::OutsideSupport(x));
    }
    if !(tol > 0.0) {
        return Err(LawError::InvalidArgument(format!("tolerance {tol}")));
    }
    let kappa = (edge / x).ln();
    // inner levels aim a little tighter than the caller asks
    let (h, rel) = conv.h(law.order(), kappa, 0.1 * tol);
    let value = h / edge;
    let abs_err = rel * value;
    if abs_err > tol.max(tol * value) {
        return Err(LawError::ToleranceNotMet {
            requested: tol,
            achieved: abs_err,
        });
    }
    Ok(DensityValue { value, abs_err })
}

/// Marchenko–Pastur density `(1/2π)·sqrt((4-x)/x)` on `[0, 4]`.
pub fn density_mp(x: f64) -> f64 {
    if x > 0.0 && x < 4.0 {
        ((4.0 - x) / x).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// Marchenko–Pastur distribution function.
pub fn mp_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 4.0 {
        1.0
    } else {
        let theta = (0.25 * x).sqrt().asin();
        (2.0 / PI) * (theta + 0.5 * (2.0 * theta).sin())
    }
}

/// Closed form of the `r = 2` density on `[0, 27/4]`.
pub fn density_r2(x: f64) -> f64 {
    const EDGE: f64 = 27.0 / 4.0;
    if !(x > 0.0 && x < EDGE) {
        return 0.0;
    }
    let s3 = 3f64.sqrt();
    let t = 2.0 * (EDGE - x).sqrt();
    let pref = 1.0 / (2f64.powf(3.0 + 1.0 / 3.0) * s3 * PI * x.powf(2.0 / 3.0));
    let bracket = (s3 + t) * (3.0 * s3 - t).max(0.0).cbrt() - (s3 - t) * (3.0 * s3 + t).cbrt();
    (pref * bracket).max(0.0)
}

/// Power applied to the base map; `x ∝ u^{2(r+1)}` near `u = 0`.
fn grading_exponent(r: usize) -> i32 {
    r as i32 + 1
}

/// `x(u) = L·y^p` with `y = 1 - (1 - u^2)^2`. The density times `dx/du` is
/// then analytic in `u` at both ends: odd at `u = 0`, where the hard-edge
/// singularity is absorbed, and vanishing like `(1-u)^2` at `u = 1`.
fn graded_map(edge: f64, p: i32, u: f64) -> (f64, f64) {
    let s = 1.0 - u * u;
    let y = 1.0 - s * s;
    let x = edge * y.powi(p);
    let dx = edge * p as f64 * y.powi(p - 1) * 4.0 * u * s;
    (x, dx)
}

/// `n + 1` abscissae on `[0, L(r)]` graded toward the hard edge.
pub fn graded_abscissae(r: usize, n: usize) -> Result<Vec<f64>, LawError> {
    let law = LimitLaw::new(r)?;
    let p = grading_exponent(r);
    Ok((0..=n)
        .map(|i| graded_map(law.edge(), p, i as f64 / n as f64).0)
        .collect())
}

/// Density values on `n + 1` graded abscissae, with integration weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub r: usize,
    pub edge: f64,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub abs_err: Vec<f64>,
    /// Quadrature weights for `∫ φ(x) f(x) dx ≈ Σ w_i φ(x_i) f_i`. Empty for
    /// grids built on caller-supplied abscissae.
    pub weights: Vec<f64>,
}

impl DensityGrid {
    /// `∫ φ(x) dF⟨r⟩(x)` using the grid weights.
    pub fn integrate<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        assert!(
            !self.weights.is_empty(),
            "grid carries no quadrature weights"
        );
        self.x
            .iter()
            .zip(&self.density)
            .zip(&self.weights)
            .map(|((&x, &f), &w)| w * f * phi(x))
            .sum()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.integrate(|x| x.powi(k as i32))
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Evaluates the density on caller-supplied abscissae. Points on or outside
/// the support edges get density 0 with zero error.
pub fn density_grid(r: usize, xs: &[f64], tol: f64) -> Result<DensityGrid, LawError> {
    let law = LimitLaw::new(r)?;
    let conv = Convolution::new(r);
    let values: Vec<DensityValue> = xs
        .par_iter()
        .map(|&x| {
            if x <= 0.0 || x >= law.edge() {
                Ok(DensityValue {
                    value: 0.0,
                    abs_err: 0.0,
                })
            } else {
                density_with(&law, &conv, x, tol)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(DensityGrid {
        r,
        edge: law.edge(),
        x: xs.to_vec(),
        density: values.iter().map(|v| v.value).collect(),
        abs_err: values.iter().map(|v| v.abs_err).collect(),
        weights: Vec::new(),
    })
}

/// Gregory weights: composite trapezoid with end corrections through sixth
/// differences, falling back to plain trapezoid on short grids.
fn gregory_weights(n: usize) -> Vec<f64> {
    const CORRECTIONS: [f64; 6] = [
        1.0 / 12.0,
        1.0 / 24.0,
        19.0 / 720.0,
        3.0 / 160.0,
        863.0 / 60480.0,
        275.0 / 24192.0,
    ];
    let mut w = vec![1.0; n + 1];
    w[0] = 0.5;
    w[n] = 0.5;
    if n < 2 * CORRECTIONS.len() {
        return w;
    }
    // the k-th correction contributes c_k·(-1)^{i+1}·C(k,i) at node i from
    // each end
    for (m, &c) in CORRECTIONS.iter().enumerate() {
        let k = m + 1;
        let mut binom = 1.0;
        for i in 0..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            let d = c * sign * binom;
            w[i] += d;
            w[n - i] += d;
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
    }
    w
}

impl DensityGrid {
    /// Density on the graded grid with `n` panels, carrying weights.
    pub fn graded(r: usize, n: usize, tol: f64) -> Result<Self, LawError> {
        if n < 16 {
            return Err(LawError::InvalidArgument(format!(
                "grid size {n} below the minimum of 16"
            )));
        }
        let xs = graded_abscissae(r, n)?;
        let mut grid = density_grid(r, &xs, tol)?;
        let p = grading_exponent(r);
        let h = 1.0 / n as f64;
        let gw = gregory_weights(n);
        grid.weights = (0..=n)
            .map(|i| h * gw[i] * graded_map(grid.edge, p, i as f64 * h).1)
            .collect();
        Ok(grid)
    }
}

/// A continuous piecewise-linear distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCdf {
    pub x: Vec<f64>,
    pub cdf: Vec<f64>,
}

impl PiecewiseLinearCdf {
    pub fn new(x: Vec<f64>, cdf: Vec<f64>) -> Self {
        assert_eq!(x.len(), cdf.len());
        assert!(!x.is_empty());
        Self { x, cdf }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return if t < self.x[0] { 0.0 } else { self.cdf[0] };
        }
        if t >= self.x[n - 1] {
            return 1.0;
        }
        let i = self.x.partition_point(|&v| v <= t);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        if x1 == x0 {
            return c1;
        }
        c0 + (c1 - c0) * (t - x0) / (x1 - x0)
    }

    /// Value at the right end of the grid before clamping to 1.
    pub fn total(&self) -> f64 {
        *self.cdf.last().expect("nonempty")
    }
}

/// Distribution function of `F⟨r⟩` on a graded grid of `n` panels.
pub fn cdf_grid(r: usize, n: usize, tol: f64) -> Result<PiecewiseLinearCdf, LawError> {
    DensityGrid::graded(r, n, tol)?.cdf()
}

impl DensityGrid {
    /// Distribution function at the nodes of a graded grid.
    ///
    /// Cumulative trapezoid in the grading variable, with the derivative end
    /// correction applied on every partial integral so the nodal values are
    /// fourth-order accurate. Values are forced nondecreasing.
    pub fn cdf(&self) -> Result<PiecewiseLinearCdf, LawError> {
        if self.weights.is_empty() || self.len() < 3 {
            return Err(LawError::InvalidArgument(
                "distribution function needs a graded grid".into(),
            ));
        }
        let n = self.len() - 1;
        let p = grading_exponent(self.r);
        let h = 1.0 / n as f64;
        // integrand in the grading variable; zero at both ends
        let g: Vec<f64> = (0..=n)
            .map(|i| self.density[i] * graded_map(self.edge, p, i as f64 * h).1)
            .collect();
        let dg = |i: usize| -> f64 {
            if i == 0 {
                (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h)
            } else if i == n {
                (3.0 * g[n] - 4.0 * g[n - 1] + g[n - 2]) / (2.0 * h)
            } else {
                (g[i + 1] - g[i - 1]) / (2.0 * h)
            }
        };
        let dg0 = dg(0);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut trap = 0.0;
        cdf.push(0.0);
        let mut running_max: f64 = 0.0;
        for i in 1..=n {
            trap += 0.5 * h * (g[i - 1] + g[i]);
            let corrected = trap - h * h / 12.0 * (dg(i) - dg0);
            running_max = running_max.max(corrected);
            cdf.push(running_max);
        }
        Ok(PiecewiseLinearCdf::new(self.x.clone(), cdf))
    }
}
