//! Monte Carlo draws of `U(0, L)·∏ B(a_j, b_j)`.
//!
//! The smallest Beta shape is `1/(r(r+1))`, so Gamma variates are produced in
//! log space: `ln G(a) = ln G(a+1) + ln(U)/a`, which stays finite where the
//! direct `G(a+1)·U^{1/a}` would underflow.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{beta_parameters, LawError, LimitLaw};

/// Logarithm of a `Gamma(shape, 1)` variate drawn with `rng`.
pub fn sample_gamma_ln<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    assert!(shape > 0.0, "gamma shape must be positive");
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("valid shape");
        return g.sample(rng).ln();
    }
    let boosted = Gamma::new(shape + 1.0, 1.0).expect("valid shape");
    boosted.sample(rng).ln() + open_unit(rng).ln() / shape
}

/// Uniform on `(0, 1)`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

#[derive(Debug, Clone)]
pub struct BetaProductSampler {
    r: usize,
    edge: f64,
    parameters: Vec<(f64, f64)>,
    gammas: Vec<(Gamma<f64>, Gamma<f64>)>,
}

impl BetaProductSampler {
    pub fn new(r: usize) -> Result<Self, LawError> {
        let law = LimitLaw::new(r)?;
        let parameters = beta_parameters(r);
        let boosted = |s: f64| Gamma::new(s + 1.0, 1.0).expect("positive shape");
        let gammas = parameters
            .iter()
            .map(|&(a, b)| (boosted(a), boosted(b)))
            .collect();
        Ok(Self {
            r,
            edge: law.edge(),
            parameters,
            gammas,
        })
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn parameters(&self) -> &[(f64, f64)] {
        &self.parameters
    }

    /// `ln(Y/L)`, always `≤ 0`.
    pub fn sample_ln_scaled<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut acc = open_unit(rng).ln();
        for (&(a, b), (ga, gb)) in self.parameters.iter().zip(&self.gammas) {
            // all shapes are below 1
            let ln_x = ga.sample(rng).ln() + open_unit(rng).ln() / a;
            let ln_y = gb.sample(rng).ln() + open_unit(rng).ln() / b;
            // ln(X/(X+Y))
            acc -= softplus(ln_y - ln_x);
        }
        acc
    }
}

impl Distribution<f64> for BetaProductSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.edge * self.sample_ln_scaled(rng).exp()
    }
}

/// One draw of the Beta-product variable of order `r`.
pub fn beta_product_sample<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<f64, LawError> {
    Ok(BetaProductSampler::new(r)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitlaw::mp_cdf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn draws_stay_in_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for r in 1..=6 {
            let s = BetaProductSampler::new(r).unwrap();
            for _ in 0..2000 {
                let y = s.sample(&mut rng);
                assert!((0.0..=s.edge()).contains(&y));
            }
        }
    }

    #[test]
    fn gamma_log_sampler_has_right_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for shape in [0.05, 0.3, 1.0, 2.5] {
            let xs: Vec<f64> = (0..200_000)
                .map(|_| sample_gamma_ln(shape, &mut rng).exp())
                .collect();
            let (m, se) = mean_and_se(&xs);
            assert!((m - shape).abs() < 4.0 * se, "shape {shape}: {m} ± {se}");
        }
    }

    #[test]
    fn first_moments_match_exact_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let s1 = BetaProductSampler::new(1).unwrap();
        let xs: Vec<f64> = (0..1_000_000).map(|_| s1.sample(&mut rng)).collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 1.0).abs() < 4.0 * se, "{m} ± {se}");

        let s2 = BetaProductSampler::new(2).unwrap();
        let sq: Vec<f64> = (0..1_000_000)
            .map(|_| s2.sample(&mut rng).powi(2))
            .collect();
        let (m, se) = mean_and_se(&sq);
        assert!((m - 5.0).abs() < 4.0 * se, "{m} ± {se}");
    }

    #[test]
    fn order_one_matches_marchenko_pastur() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let s = BetaProductSampler::new(1).unwrap();
        let mut xs: Vec<f64> = (0..1_000_000).map(|_| s.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = mp_cdf(x);
            ks = ks
                .max((f - i as f64 / n).abs())
                .max((f - (i + 1) as f64 / n).abs());
        }
        assert!(ks < 0.005, "KS distance {ks}");
    }
}
