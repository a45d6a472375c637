//! Random matrices supported on a Young diagram, and `W = X X* / N`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partitions::{Partition, PartitionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("the shape has no boxes")]
    EmptyPartition,
    #[error("index {index} is out of range (indices start at 1, dilation {dilation})")]
    IndexOutOfRange { index: usize, dilation: usize },
    #[error("dilation must be at least 1, got {0}")]
    InvalidDilation(usize),
    #[error("cutoff must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("{kind} entries truncated at {cutoff} have zero variance")]
    DegenerateTruncation { kind: EntryKind, cutoff: f64 },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Base law of the matrix entries. Every kind has mean 0 and `E|X|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    /// Real and imaginary parts independent `N(0, 1/2)`.
    ComplexGaussian,
    RealGaussian,
    /// `±1` with equal probability.
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    CenteredUniform,
}

impl EntryKind {
    pub const ALL: [EntryKind; 4] = [
        EntryKind::ComplexGaussian,
        EntryKind::RealGaussian,
        EntryKind::Rademacher,
        EntryKind::CenteredUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntryKind::ComplexGaussian => "complex-gaussian",
            EntryKind::RealGaussian => "real-gaussian",
            EntryKind::Rademacher => "rademacher",
            EntryKind::CenteredUniform => "centered-uniform",
        }
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> Complex64 {
        match self {
            EntryKind::ComplexGaussian => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            EntryKind::RealGaussian => Complex64::new(StandardNormal.sample(rng), 0.0),
            EntryKind::Rademacher => {
                Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
            }
            EntryKind::CenteredUniform => {
                let s = 3f64.sqrt();
                Complex64::new(rng.random_range(-s..s), 0.0)
            }
        }
    }

    /// `E|X|² 1{|X| < c}`. All kinds are symmetric, so the truncated mean
    /// vanishes and this is the truncated variance.
    fn truncated_second_moment(self, c: f64) -> f64 {
        match self {
            EntryKind::ComplexGaussian => {
                // |X|² is Exp(1)
                let c2 = c * c;
                -(-c2).exp_m1() - c2 * (-c2).exp()
            }
            EntryKind::RealGaussian => {
                let phi = (-0.5 * c * c).exp() / (2.0 * std::f64::consts::PI).sqrt();
                libm::erf(c / std::f64::consts::SQRT_2) - 2.0 * c * phi
            }
            EntryKind::Rademacher => {
                if c > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            EntryKind::CenteredUniform => {
                let s = 3f64.sqrt();
                let m = c.min(s);
                m * m * m / (3.0 * s)
            }
        }
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        EntryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown entry distribution '{s}'"))
    }
}

/// An entry law, optionally truncated at `|X| < C` and restandardized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryDistribution {
    pub kind: EntryKind,
    pub truncation: Option<f64>,
    /// `1/s_C`, or 1 without truncation.
    scale: f64,
}

impl EntryDistribution {
    pub fn new(kind: EntryKind) -> Self {
        Self {
            kind,
            truncation: None,
            scale: 1.0,
        }
    }

    /// `(X·1{|X| < C} - m_C) / s_C`.
    pub fn truncate_standardize(self, cutoff: f64) -> Result<Self, MatrixError> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(MatrixError::InvalidCutoff(cutoff));
        }
        let var = self.kind.truncated_second_moment(cutoff);
        if !(var > 0.0) {
            return Err(MatrixError::DegenerateTruncation {
                kind: self.kind,
                cutoff,
            });
        }
        Ok(Self {
            kind: self.kind,
            truncation: Some(cutoff),
            scale: 1.0 / var.sqrt(),
        })
    }

    /// Standard deviation `s_C` of the truncated variable (1 if untruncated).
    pub fn truncated_std(&self) -> f64 {
        1.0 / self.scale
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let x = self.kind.draw(rng);
        match self.truncation {
            None => x,
            Some(c) if x.norm() < c => x * self.scale,
            Some(_) => Complex64::new(0.0, 0.0),
        }
    }
}

impl Distribution<Complex64> for EntryDistribution {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        EntryDistribution::sample(self, rng)
    }
}

/// A substream of a master seed. Streams with distinct indices are
/// independent, and a replica's draws depend only on its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub stream: u64,
}

impl StreamId {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A complex matrix that vanishes off the boxes of its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedMatrix {
    shape: Partition,
    entries: DMatrix<Complex64>,
    stream: Option<StreamId>,
}

impl ShapedMatrix {
    /// Wraps `entries`, zeroing everything outside `shape`. The matrix must
    /// be `length × width` of the shape.
    pub fn from_entries(
        shape: Partition,
        mut entries: DMatrix<Complex64>,
    ) -> Result<Self, MatrixError> {
        if shape.is_empty() {
            return Err(MatrixError::EmptyPartition);
        }
        assert_eq!(
            entries.shape(),
            (shape.length(), shape.width()),
            "matrix does not fit the shape"
        );
        for (i, &row) in shape.parts().iter().enumerate() {
            for j in row..shape.width() {
                entries[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Self {
            shape,
            entries,
            stream: None,
        })
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn stream(&self) -> Option<StreamId> {
        self.stream
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `Σ |X_ij|²` over all entries.
    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Draws i.i.d. entries onto the boxes of `shape`, row by row, from `rng`.
pub fn sample_shaped_with<R: Rng + ?Sized>(
    shape: &Partition,
    dist: &EntryDistribution,
    rng: &mut R,
) -> Result<ShapedMatrix, MatrixError> {
    if shape.is_empty() {
        return Err(MatrixError::EmptyPartition);
    }
    let (rows, cols) = (shape.length(), shape.width());
    let mut entries = DMatrix::from_element(rows, cols, Complex64::new(0.0, 0.0));
    for (i, &row) in shape.parts().iter().enumerate() {
        for j in 0..row {
            entries[(i, j)] = dist.sample(rng);
        }
    }
    Ok(ShapedMatrix {
        shape: shape.clone(),
        entries,
        stream: None,
    })
}

/// Draws a shaped matrix from its own substream.
pub fn sample_shaped(
    shape: &Partition,
    dist: &EntryDistribution,
    stream: StreamId,
) -> Result<ShapedMatrix, MatrixError> {
    let mut m = sample_shaped_with(shape, dist, &mut stream.rng())?;
    m.stream = Some(stream);
    Ok(m)
}

/// `⌈i/N⌉` for 1-based `i`.
pub fn block_index(i: usize, dilation: usize) -> Result<usize, MatrixError> {
    if dilation < 1 {
        return Err(MatrixError::InvalidDilation(dilation));
    }
    if i < 1 {
        return Err(MatrixError::IndexOutOfRange { index: i, dilation });
    }
    Ok(i.div_ceil(dilation))
}

/// `W = X X* / N`, stored exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    scale: usize,
    entries: DMatrix<Complex64>,
}

impl CovarianceMatrix {
    /// Wraps a matrix assumed Hermitian; nothing is checked here.
    pub fn from_entries(entries: DMatrix<Complex64>, scale: usize) -> Self {
        assert!(entries.is_square(), "covariance must be square");
        Self { scale, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest `|W_ij - conj(W_ji)|` relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut big: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                big = big.max(self.entries[(i, j)].norm());
                if j >= i {
                    worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
                }
            }
        }
        if big == 0.0 {
            0.0
        } else {
            worst / big
        }
    }
}

/// `W = X X* / N` for normalization `N ≥ 1`.
pub fn covariance(x: &ShapedMatrix, scale: usize) -> Result<CovarianceMatrix, MatrixError> {
    if scale < 1 {
        return Err(MatrixError::InvalidDilation(scale));
    }
    let a = x.entries();
    let mut w = a * a.adjoint();
    w /= Complex64::new(scale as f64, 0.0);
    let n = w.nrows();
    for i in 0..n {
        w[(i, i)].im = 0.0;
        for j in 0..i {
            w[(j, i)] = w[(i, j)].conj();
        }
    }
    Ok(CovarianceMatrix { scale, entries: w })
}
