//! Eigenvalues, empirical distributions and distances between CDFs.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::limitlaw::PiecewiseLinearCdf;
use crate::matrix_lab::{
    covariance, sample_shaped, CovarianceMatrix, EntryDistribution, MatrixError, StreamId,
};
use crate::partitions::Partition;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("matrix is not Hermitian (relative defect {0:e})")]
    NotHermitian(f64),
    #[error("eigenvalue iteration did not converge")]
    SolverFailure,
    #[error("invalid histogram range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("need at least 2 replicas, got {0}")]
    TooFewReplicas(usize),
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Hermiticity threshold on the relative defect.
const HERMITIAN_TOL: f64 = 1e-10;

/// Ascending eigenvalues of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

fn decompose(
    w: &CovarianceMatrix,
) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>, SpectraError> {
    let defect = w.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(SpectraError::NotHermitian(defect));
    }
    SymmetricEigen::try_new(w.entries().clone(), f64::EPSILON, 0).ok_or(SpectraError::SolverFailure)
}

pub fn eigenvalues(w: &CovarianceMatrix) -> Result<Spectrum, SpectraError> {
    Ok(Spectrum::new(
        decompose(w)?.eigenvalues.iter().copied().collect(),
    ))
}

/// Eigenvalues with unit eigenvectors as columns, in the solver's order.
pub fn eigenpairs(w: &CovarianceMatrix) -> Result<(Vec<f64>, DMatrix<Complex64>), SpectraError> {
    let e = decompose(w)?;
    Ok((e.eigenvalues.iter().copied().collect(), e.eigenvectors))
}

/// `(1/n) Σ x_i^k`.
pub fn empirical_moment(s: &Spectrum, k: u32) -> f64 {
    if s.values.is_empty() {
        return f64::NAN;
    }
    s.values.iter().map(|x| x.powi(k as i32)).sum::<f64>() / s.dim() as f64
}

/// A distribution function that distances can be evaluated against.
pub trait Cdf {
    /// `F(x)`, right-continuous.
    fn cdf(&self, x: f64) -> f64;
    /// `F(x-)`.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
    /// Points where `F` jumps or changes slope; between consecutive ones it
    /// is constant or linear.
    fn breakpoints(&self) -> Vec<f64>;
}

/// Step CDF putting mass `1/n` on each of `n` sorted values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    /// Pools several spectra into one distribution.
    pub fn pooled<'a, I: IntoIterator<Item = &'a Spectrum>>(spectra: I) -> Self {
        Self::from_values(
            spectra
                .into_iter()
                .flat_map(|s| s.values.iter().copied())
                .collect(),
        )
    }

    pub fn total(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distinct support points with multiplicities.
    pub fn atoms(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((x, m)) if *x == v => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// `∫ x^k dF`.
    pub fn moment(&self, k: u32) -> f64 {
        self.atoms()
            .iter()
            .map(|&(x, m)| m as f64 * x.powi(k as i32))
            .sum::<f64>()
            / self.total() as f64
    }
}

pub fn empirical_cdf(s: &Spectrum) -> EmpiricalDistribution {
    EmpiricalDistribution::from_values(s.values.clone())
}

impl Cdf for EmpiricalDistribution {
    fn cdf(&self, x: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.partition_point(|&v| v <= x) as f64 / self.total() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.partition_point(|&v| v < x) as f64 / self.total() as f64
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.atoms().into_iter().map(|(x, _)| x).collect()
    }
}

impl Cdf for PiecewiseLinearCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        // only the first node can carry a jump
        if x <= self.x[0] {
            0.0
        } else {
            self.eval(x)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.x.clone()
    }
}

/// A continuous CDF given by a function, linearized between `points`.
pub struct TabulatedCdf {
    inner: PiecewiseLinearCdf,
}

impl TabulatedCdf {
    pub fn new<F: Fn(f64) -> f64>(f: F, mut points: Vec<f64>) -> Self {
        points.sort_by(f64::total_cmp);
        points.dedup();
        let values = points.iter().map(|&x| f(x)).collect();
        Self {
            inner: PiecewiseLinearCdf::new(points, values),
        }
    }
}

impl Cdf for TabulatedCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        self.inner.cdf_left(x)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// Largest violation of `G(x) ≤ F(x + ε) + ε` and `F(x - ε) - ε ≤ G(x)`
/// over all `x`, minus `ε`. Both sides are monotone and piecewise linear
/// between breakpoints, so the extremes sit at breakpoints of `G` or at
/// shifted breakpoints of `F`, approached from either side.
fn levy_violation<F: Cdf + ?Sized, G: Cdf + ?Sized>(
    f: &F,
    g: &G,
    fp: &[f64],
    gp: &[f64],
    eps: f64,
) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let mut check = |x: f64| {
        let upper_r = g.cdf(x) - f.cdf(x + eps);
        let upper_l = g.cdf_left(x) - f.cdf_left(x + eps);
        let lower_r = f.cdf(x - eps) - g.cdf(x);
        let lower_l = f.cdf_left(x - eps) - g.cdf_left(x);
        worst = worst.max(upper_r).max(upper_l).max(lower_r).max(lower_l);
    };
    for &x in gp {
        check(x);
    }
    for &p in fp {
        check(p - eps);
        check(p + eps);
    }
    worst - eps
}

/// Lévy distance `inf{ε > 0 : F(x-ε) - ε ≤ G(x) ≤ F(x+ε) + ε ∀x}`, by
/// bisection to `1e-9`.
pub fn levy_distance<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G) -> f64 {
    let fp = f.breakpoints();
    let gp = g.breakpoints();
    if levy_violation(f, g, &fp, &gp, 0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if levy_violation(f, g, &fp, &gp, mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sup_x |F(x) - G(x)|`, including one-sided limits.
pub fn ks_distance<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G) -> f64 {
    let mut pts = f.breakpoints();
    pts.extend(g.breakpoints());
    pts.iter()
        .map(|&x| {
            (f.cdf(x) - g.cdf(x))
                .abs()
                .max((f.cdf_left(x) - g.cdf_left(x)).abs())
        })
        .fold(0.0, f64::max)
}

/// Normalized histogram. `density[i] = counts[i] / (total · width)`, where
/// `total` includes values outside the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub total: usize,
    pub underflow: usize,
    pub overflow: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }
}

/// Bins `values` on `[lo, hi]`; the right end belongs to the last bin. An
/// empty input gives all-zero counts with `total = 0`.
pub fn histogram(
    values: &[f64],
    bins: usize,
    range: (f64, f64),
) -> Result<Histogram, SpectraError> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(SpectraError::NoBins);
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(SpectraError::InvalidRange { lo, hi });
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0u64; bins];
    let (mut underflow, mut overflow) = (0, 0);
    for &v in values {
        if v < lo {
            underflow += 1;
        } else if v > hi {
            overflow += 1;
        } else {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let total = values.len();
    let density = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if total == 0 {
                0.0
            } else {
                c as f64 / (total as f64 * (edges[i + 1] - edges[i]))
            }
        })
        .collect();
    Ok(Histogram {
        edges,
        counts,
        density,
        total,
        underflow,
        overflow,
    })
}

/// A Monte Carlo ensemble: `replicas` independent draws of `W = X X*/scale`
/// with `X` shaped by `shape`. Replica `i` uses stream `i` of `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub shape: Partition,
    pub scale: usize,
    pub dist: EntryDistribution,
    pub replicas: usize,
    pub seed: u64,
}

impl Ensemble {
    /// The block-shaped case: `shape = N·base`, normalized by `N`.
    pub fn dilated(
        base: &Partition,
        n: usize,
        dist: EntryDistribution,
        replicas: usize,
        seed: u64,
    ) -> Result<Self, SpectraError> {
        Ok(Self {
            shape: base.dilate(n).map_err(MatrixError::from)?,
            scale: n,
            dist,
            replicas,
            seed,
        })
    }

    pub fn spectrum(&self, replica: usize) -> Result<Spectrum, SpectraError> {
        let x = sample_shaped(
            &self.shape,
            &self.dist,
            StreamId::new(self.seed, replica as u64),
        )?;
        eigenvalues(&covariance(&x, self.scale)?)
    }

    /// All spectra in replica order, on `threads` workers (rayon's default
    /// pool when `None`). The result does not depend on `threads`.
    pub fn spectra(&self, threads: Option<usize>) -> Result<Vec<Spectrum>, SpectraError> {
        let work = || {
            (0..self.replicas)
                .into_par_iter()
                .map(|i| self.spectrum(i))
                .collect::<Result<Vec<_>, _>>()
        };
        match threads {
            None => work(),
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| SpectraError::ThreadPool(e.to_string()))?
                .install(work),
        }
    }
}

/// Per-order sample mean and unbiased variance of `m_{k,N}` across replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentStats {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub replicas: usize,
}

impl MomentStats {
    /// Standard error of the mean of order `k`.
    pub fn std_error(&self, k: usize) -> f64 {
        (self.variance[k] / self.replicas as f64).sqrt()
    }
}

pub fn moment_stats(spectra: &[Spectrum], k_max: u32) -> Result<MomentStats, SpectraError> {
    let m = spectra.len();
    if m < 2 {
        return Err(SpectraError::TooFewReplicas(m));
    }
    let mut mean = Vec::new();
    let mut variance = Vec::new();
    for k in 0..=k_max {
        let xs: Vec<f64> = spectra.iter().map(|s| empirical_moment(s, k)).collect();
        let mu = xs.iter().sum::<f64>() / m as f64;
        let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
        mean.push(mu);
        variance.push(var);
    }
    Ok(MomentStats {
        mean,
        variance,
        replicas: m,
    })
}

/// Moments of the block-shaped ensemble `N·λ`, normalized by `N`.
pub fn ensemble_moments(
    base: &Partition,
    n: usize,
    dist: EntryDistribution,
    k_max: u32,
    replicas: usize,
    seed: u64,
) -> Result<MomentStats, SpectraError> {
    if replicas < 2 {
        return Err(SpectraError::TooFewReplicas(replicas));
    }
    let e = Ensemble::dilated(base, n, dist, replicas, seed)?;
    moment_stats(&e.spectra(None)?, k_max)
}
