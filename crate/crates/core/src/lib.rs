//! Random matrices shaped by Young diagrams.
//!
//! A partition `λ` masks an i.i.d. matrix `X`; the spectrum of `W = X X*/N`
//! for the dilated staircase `N·(r, r-1, …, 1)` converges to a law whose
//! moments are generalized Catalan numbers divided by `r`. This crate samples
//! such matrices, computes their spectra, and evaluates the limit law by
//! exact moments, its Stieltjes series, a Beta-product sampler and its
//! density.

// quadrature tables keep their published digits; `!(x > 0.0)` also rejects NaN
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod limitlaw;
pub mod matrix_lab;
pub mod partitions;
pub mod quadrature;
pub mod spectra;

pub use combinatorics::{
    catalan, count_r_plane_trees, dh_moment, dh_scaled_gen_catalan, enumerate_plane_trees,
    fuss_catalan, gen_catalan, limit_moment, CombinatoricsError, PlaneTree, RPlaneTree,
};
pub use limitlaw::{DensityGrid, LawError, LimitLaw, PiecewiseLinearCdf};
pub use matrix_lab::{
    covariance, sample_shaped, CovarianceMatrix, EntryDistribution, EntryKind, MatrixError,
    ShapedMatrix, StreamId,
};
pub use partitions::{Partition, PartitionError};
pub use spectra::{
    eigenvalues, empirical_cdf, empirical_moment, histogram, ks_distance, levy_distance, Cdf,
    EmpiricalDistribution, Histogram, MomentStats, SpectraError, Spectrum,
};
