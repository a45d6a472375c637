//! Integer partitions and their Young diagrams.
//!
//! Diagrams use the English convention: row `i` (1-based, growing downwards)
//! holds `λ_i` boxes, left-justified. Box `(i, j)` belongs to the diagram iff
//! `λ_i ≥ j`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("parts are not weakly decreasing at position {index}: {prev} < {next}")]
    NotWeaklyDecreasing { index: usize, prev: i64, next: i64 },
    #[error("negative part {value} at position {index}")]
    NegativePart { index: usize, value: i64 },
    #[error("box index ({row}, {col}) out of range; indices start at 1")]
    IndexOutOfRange { row: usize, col: usize },
    #[error("dilation factor must be at least 1, got {0}")]
    InvalidDilation(usize),
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("operation needs a nonempty partition")]
    EmptyPartition,
    #[error("arithmetic overflow")]
    Overflow,
}

/// A weakly decreasing sequence of positive integers. Trailing zeros are
/// never stored, so the empty vector is the empty partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Normalizes `parts` (trailing zeros dropped) and checks that the result
    /// is a partition.
    pub fn new<I>(parts: I) -> Result<Self, PartitionError>
    where
        I: IntoIterator<Item = i64>,
    {
        let mut raw: Vec<i64> = parts.into_iter().collect();
        while raw.last() == Some(&0) {
            raw.pop();
        }
        for (index, &value) in raw.iter().enumerate() {
            if value < 0 {
                return Err(PartitionError::NegativePart { index, value });
            }
        }
        for (index, w) in raw.windows(2).enumerate() {
            if w[0] < w[1] {
                return Err(PartitionError::NotWeaklyDecreasing {
                    index: index + 1,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        let parts = raw
            .into_iter()
            .map(|p| usize::try_from(p).map_err(|_| PartitionError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// The staircase `(r, r-1, ..., 1)`.
    pub fn staircase(r: usize) -> Result<Self, PartitionError> {
        if r < 1 {
            return Err(PartitionError::InvalidOrder(r));
        }
        Ok(Self {
            parts: (1..=r).rev().collect(),
        })
    }

    /// The square `(r, ..., r)` with `r` parts.
    pub fn square(r: usize) -> Result<Self, PartitionError> {
        if r < 1 {
            return Err(PartitionError::InvalidOrder(r));
        }
        Ok(Self { parts: vec![r; r] })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of nonzero parts, `ℓ(λ)`.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// Largest part, which is also the length of the conjugate.
    pub fn width(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Sum of the parts, `|λ|`.
    pub fn weight(&self) -> usize {
        self.checked_weight()
            .expect("partition weight overflows usize")
    }

    pub fn checked_weight(&self) -> Result<usize, PartitionError> {
        self.parts
            .iter()
            .try_fold(0usize, |acc, &p| acc.checked_add(p))
            .ok_or(PartitionError::Overflow)
    }

    /// Part `i` with 1-based indexing; zero past the end.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Reflection of the diagram in the main diagonal.
    pub fn conjugate(&self) -> Self {
        let width = self.width();
        let mut out = Vec::with_capacity(width);
        for j in 1..=width {
            // parts are sorted, so the count is a prefix length
            out.push(self.parts.partition_point(|&p| p >= j));
        }
        Self { parts: out }
    }

    /// `true` iff the diagram of `self` sits inside the diagram of `other`.
    pub fn is_contained_in(&self, other: &Self) -> bool {
        self.parts.len() <= other.parts.len()
            && self.parts.iter().zip(&other.parts).all(|(a, b)| a <= b)
    }

    /// Box membership with 1-based `(row, col)`.
    pub fn has_box(&self, row: usize, col: usize) -> Result<bool, PartitionError> {
        if row < 1 || col < 1 {
            return Err(PartitionError::IndexOutOfRange { row, col });
        }
        Ok(self.part(row) >= col)
    }

    /// Replaces each box by an `n × n` grid of boxes.
    pub fn dilate(&self, n: usize) -> Result<Self, PartitionError> {
        if n < 1 {
            return Err(PartitionError::InvalidDilation(n));
        }
        let len = self
            .parts
            .len()
            .checked_mul(n)
            .ok_or(PartitionError::Overflow)?;
        let mut parts = Vec::with_capacity(len);
        for &p in &self.parts {
            let scaled = p.checked_mul(n).ok_or(PartitionError::Overflow)?;
            parts.extend(std::iter::repeat(scaled).take(n));
        }
        let out = Self { parts };
        out.checked_weight()?;
        Ok(out)
    }

    /// `|Nλ| / (N ℓ(Nλ))`, the expected normalized trace of `W_N`.
    pub fn balance_ratio(&self, n: usize) -> Result<Ratio<u64>, PartitionError> {
        if self.is_empty() {
            return Err(PartitionError::EmptyPartition);
        }
        let dilated = self.dilate(n)?;
        let num = u64::try_from(dilated.checked_weight()?).map_err(|_| PartitionError::Overflow)?;
        let den = (n as u64)
            .checked_mul(dilated.length() as u64)
            .ok_or(PartitionError::Overflow)?;
        Ok(Ratio::new(num, den))
    }

    /// Rows of box glyphs, one line per part.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for &p in &self.parts {
            for _ in 0..p {
                s.push('□');
            }
            s.push('\n');
        }
        s
    }
}

impl TryFrom<Vec<i64>> for Partition {
    type Error = PartitionError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
