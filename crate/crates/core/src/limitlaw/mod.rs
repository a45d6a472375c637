//! The limiting spectral law of block-shaped ensembles.
//!
//! For order `r` the law lives on `[0, L(r)]` with `L(r) = (r+1)^{r+1} / r^r`
//! and has moments `binom((r+1)k, k) / (k+1)`. It factors as a uniform
//! variable on `[0, L(r)]` times `r` independent Beta variables with
//! parameters `(j/(r+1), j/(r(r+1)))`, `j = 1..r`. Everything numerical in
//! this module is built on that factorization.

mod density;
mod dh;
mod edge;
mod moments;
mod sampler;
mod stieltjes;

pub use density::{
    cdf_grid, density, density_grid, density_mp, density_r2, graded_abscissae, mp_cdf, DensityGrid,
    DensityValue, PiecewiseLinearCdf,
};
pub use dh::{dh_cdf, dh_density, dh_density_param, DH_EDGE};
pub use edge::{edge_exponent_fit, edge_window_grid, Edge, EdgeFit, MIN_FIT_POINTS};
pub use moments::{beta_product_moment, contour_moment, ContourMoment};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
pub use sampler::{beta_product_sample, sample_gamma_ln, BetaProductSampler};
pub use stieltjes::{
    inversion_density, stieltjes, stieltjes_closed_form, stieltjes_hypergeometric, StieltjesValue,
    DOMAIN_MARGIN,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("point {0} lies outside the open support")]
    OutsideSupport(f64),
    #[error("argument {0} is outside the domain of this evaluator")]
    OutsideDomain(String),
    #[error("series or refinement did not converge: {0}")]
    NoConvergence(String),
    #[error("requested tolerance {requested:e} not met (estimated error {achieved:e})")]
    ToleranceNotMet { requested: f64, achieved: f64 },
    #[error("only {found} grid points fall inside the fit window (need {needed})")]
    InsufficientPoints { found: usize, needed: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `F⟨r⟩` together with its support edge.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitLaw {
    r: usize,
    edge: BigRational,
    edge_f64: f64,
}

impl LimitLaw {
    pub fn new(r: usize) -> Result<Self, LawError> {
        let edge = support_edge(r)?;
        let edge_f64 = edge.to_f64().expect("edge is finite");
        Ok(Self { r, edge, edge_f64 })
    }

    pub fn order(&self) -> usize {
        self.r
    }

    /// `L(r)` as an exact rational.
    pub fn edge_exact(&self) -> &BigRational {
        &self.edge
    }

    pub fn edge(&self) -> f64 {
        self.edge_f64
    }

    /// Beta parameters `(j/(r+1), j/(r(r+1)))` of the product representation.
    pub fn beta_parameters(&self) -> Vec<(f64, f64)> {
        beta_parameters(self.r)
    }
}

/// `L(r) = (r+1)^{r+1} / r^r`.
pub fn support_edge(r: usize) -> Result<BigRational, LawError> {
    if r < 1 {
        return Err(LawError::InvalidOrder(r));
    }
    let r_big = BigInt::from(r);
    let num = num_traits::pow(&r_big + BigInt::one(), r + 1);
    let den = num_traits::pow(r_big, r);
    Ok(BigRational::new(num, den))
}

pub(crate) fn beta_parameters(r: usize) -> Vec<(f64, f64)> {
    let rf = r as f64;
    (1..=r)
        .map(|j| {
            let jf = j as f64;
            (jf / (rf + 1.0), jf / (rf * (rf + 1.0)))
        })
        .collect()
}
