//! Result records as written to JSON.

use serde::{Deserialize, Serialize};
use shapedrm_core::limitlaw::EdgeFit;
use shapedrm_core::{EntryKind, Histogram};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub version: String,
    pub config: RunConfig,
    pub results: Results,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    /// Substreams of the master seed, by purpose.
    pub substreams: Vec<Substreams>,
    pub rng: Option<String>,
    pub wall_clock_seconds: f64,
}

/// Streams `first..first + count` of the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substreams {
    pub purpose: String,
    pub first: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Results {
    Shape(ShapeReport),
    Moments(MomentsReport),
    Trees(TreesReport),
    Simulate(SimulateReport),
    Law(LawReport),
    SampleLaw(SampleLawReport),
    Triangular(TriangularReport),
}

/// An exact rational as `"p/q"` (or `"p"`) with its nearest float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exact {
    pub exact: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub parts: Vec<usize>,
    pub dilation: usize,
    /// Diagram of the undilated partition.
    pub diagram: String,
    pub dilated_parts: Vec<usize>,
    pub length: usize,
    pub width: usize,
    pub weight: usize,
    pub conjugate: Vec<usize>,
    pub balance_ratio: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsReport {
    pub r: usize,
    pub edge: Exact,
    pub rows: Vec<MomentRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub k: usize,
    pub gen_catalan: String,
    pub moment: Exact,
    pub tree_count: Option<String>,
    pub trees_agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreesReport {
    pub r: usize,
    pub vertices: usize,
    pub count: String,
    pub gen_catalan: String,
    pub agree: bool,
}

/// Monte Carlo mean of `m_{k,N}` against a reference value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub k: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub reference: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceCdf {
    /// Distribution function integrated from the density on a graded grid.
    DensityGrid,
    /// Empirical distribution of Beta-product samples.
    BetaProductSample,
    /// Dykema–Haagerup distribution function.
    Triangular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub r: usize,
    pub dilation: usize,
    pub matrix_dim: usize,
    pub entries: EntryKind,
    pub truncation: Option<f64>,
    pub truncated_std: f64,
    pub edge: f64,
    pub moments: Vec<MomentSummary>,
    pub histogram: Histogram,
    pub reference_cdf: ReferenceCdf,
    pub levy_distance: f64,
    pub ks_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTable {
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub abs_err: Vec<f64>,
    pub cdf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub k: usize,
    pub exact: Exact,
    pub beta_product_equal: bool,
    pub contour: f64,
    pub contour_relative_error: f64,
    pub grid: f64,
    pub grid_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub r: usize,
    pub edge: Exact,
    pub tol: f64,
    pub mass: f64,
    /// Graded grid without the singular node at 0.
    pub grid: GridTable,
    pub edge_fits: Vec<EdgeFit>,
    pub moments: Vec<MomentCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleLawReport {
    pub r: usize,
    pub samples: usize,
    pub edge: f64,
    pub histogram: Histogram,
    /// Density at bin centres; absent for orders too costly to evaluate.
    pub density_at_centres: Option<Vec<f64>>,
    pub moments: Vec<MomentSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangularReport {
    pub size: usize,
    pub replicas: usize,
    pub entries: EntryKind,
    pub moments: Vec<MomentSummary>,
    pub histogram: Histogram,
    pub density_at_centres: Vec<f64>,
    /// Largest gap between the cumulative histogram and the limit
    /// distribution function over bin edges in the comparison window.
    pub window: (f64, f64),
    pub window_sup_discrepancy: f64,
    pub ks_distance: f64,
    pub levy_distance: f64,
}
