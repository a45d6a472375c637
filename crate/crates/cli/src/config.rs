//! Run configuration: parsed from flags or read from a JSON file, and echoed
//! back verbatim in every result record.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use shapedrm_core::{EntryKind, Partition};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "shapedrm",
    version,
    about = "Spectra of Young-diagram shaped random matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Read the complete run configuration from a JSON file instead of flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for replica generation. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Cli {
    /// Resolves flags or `--config` into a validated configuration.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let config = match (self.config, self.command) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let mut config: RunConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                // flags given alongside the file override its output settings
                if self.out.is_some() {
                    config.out = self.out;
                }
                if let Some(f) = self.format {
                    config.format = f;
                }
                if self.threads.is_some() {
                    config.threads = self.threads;
                }
                config
            }
            (None, Some(command)) => RunConfig {
                command,
                out: self.out,
                format: self.format.unwrap_or_default(),
                threads: self.threads,
            },
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either a subcommand or --config, not both".into(),
                ))
            }
            (None, None) => return Err(CliError::Config("no subcommand given".into())),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    /// Human-readable summary only.
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Diagram, length, weight, conjugate and balance ratio of a partition.
    Shape(ShapeArgs),
    /// Exact generalized Catalan numbers and limit moments.
    Moments(MomentsArgs),
    /// Count r-plane trees by exhaustive enumeration.
    Trees(TreesArgs),
    /// Monte Carlo run of the block-shaped ensemble.
    Simulate(SimulateArgs),
    /// Density and distribution function of the limit law.
    Law(LawArgs),
    /// Beta-product samples of the limit law against its density.
    SampleLaw(SampleLawArgs),
    /// Triangular (staircase) matrices against the Dykema–Haagerup law.
    Triangular(TriangularArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Shape(_) => "shape",
            Command::Moments(_) => "moments",
            Command::Trees(_) => "trees",
            Command::Simulate(_) => "simulate",
            Command::Law(_) => "law",
            Command::SampleLaw(_) => "sample-law",
            Command::Triangular(_) => "triangular",
        }
    }

    /// Master seed of a stochastic subcommand.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Simulate(a) => Some(a.seed),
            Command::SampleLaw(a) => Some(a.seed),
            Command::Triangular(a) => Some(a.seed),
            _ => None,
        }
    }
}

fn one() -> usize {
    1
}
fn default_kmax() -> usize {
    4
}
fn default_law_kmax() -> usize {
    6
}
fn default_dh_kmax() -> usize {
    3
}
fn default_bins() -> usize {
    50
}
fn default_grid() -> usize {
    128
}
fn default_tol() -> f64 {
    1e-7
}
fn default_sample_tol() -> f64 {
    1e-6
}
fn default_samples() -> usize {
    1_000_000
}
fn default_entries() -> EntryKind {
    EntryKind::ComplexGaussian
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ShapeArgs {
    /// Nonincreasing positive parts, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub parts: Vec<i64>,
    #[arg(long, default_value_t = one())]
    #[serde(default = "one")]
    pub dilation: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub kmax: usize,
    /// Add brute-force r-plane tree counts next to the exact values.
    #[arg(long)]
    #[serde(default)]
    pub oracle_trees: bool,
    /// Largest k for which trees are counted (default min(kmax, 6)).
    #[arg(long)]
    #[serde(default)]
    pub tree_max_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TreesArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub dilation: usize,
    #[arg(long, default_value_t = default_entries())]
    #[serde(default = "default_entries")]
    pub entries: EntryKind,
    /// Truncate entries at |X| < C and restandardize.
    #[arg(long)]
    #[serde(default)]
    pub trunc: Option<f64>,
    #[arg(long)]
    pub replicas: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = default_kmax())]
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    #[arg(long, default_value_t = default_bins())]
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Histogram range `lo,hi` (default 0 to 1.05 times the support edge).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    #[serde(default)]
    pub range: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LawArgs {
    #[arg(long)]
    pub r: usize,
    /// Panels of the graded grid.
    #[arg(long, default_value_t = default_grid())]
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[arg(long, default_value_t = default_tol())]
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[arg(long, default_value_t = default_law_kmax())]
    #[serde(default = "default_law_kmax")]
    pub kmax: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SampleLawArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long, default_value_t = default_samples())]
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = default_bins())]
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    #[serde(default)]
    pub range: Option<Vec<f64>>,
    /// Tolerance of the density evaluated at bin centres.
    #[arg(long, default_value_t = default_sample_tol())]
    #[serde(default = "default_sample_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TriangularArgs {
    #[arg(long)]
    pub size: usize,
    #[arg(long)]
    pub replicas: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = default_entries())]
    #[serde(default = "default_entries")]
    pub entries: EntryKind,
    #[arg(long, default_value_t = default_dh_kmax())]
    #[serde(default = "default_dh_kmax")]
    pub kmax: usize,
    #[arg(long, default_value_t = default_bins())]
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    #[serde(default)]
    pub range: Option<Vec<f64>>,
}

/// Documented parameter ranges.
pub mod limits {
    pub const MAX_ORDER: usize = 64;
    /// The density costs grow steeply with the order; beyond this it is
    /// impractical.
    pub const MAX_LAW_ORDER: usize = 4;
    pub const MAX_SIM_ORDER: usize = 16;
    pub const MAX_MOMENT_K: usize = 200;
    pub const MAX_TREE_VERTICES: usize = shapedrm_core::combinatorics::DEFAULT_MAX_VERTICES;
    pub const MAX_SIM_KMAX: usize = 20;
    pub const MAX_MATRIX_DIM: usize = 4000;
    pub const MAX_REPLICAS: usize = 100_000;
    pub const MAX_BINS: usize = 100_000;
    pub const MIN_GRID: usize = 16;
    pub const MAX_GRID: usize = 8192;
    pub const MAX_SAMPLES: usize = 100_000_000;
    pub const MAX_PARTS: usize = 10_000;
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn check_range(range: &Option<Vec<f64>>) -> Result<(), CliError> {
    if let Some(r) = range {
        check(r.len() == 2, || {
            format!("--range takes lo,hi; got {} values", r.len())
        })?;
        check(r[0].is_finite() && r[1].is_finite() && r[0] < r[1], || {
            format!("--range needs finite lo < hi, got {},{}", r[0], r[1])
        })?;
    }
    Ok(())
}

fn check_order(r: usize, max: usize) -> Result<(), CliError> {
    check((1..=max).contains(&r), || {
        format!("--r must be in 1..={max}, got {r}")
    })
}

fn check_count(name: &str, v: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    check((lo..=hi).contains(&v), || {
        format!("--{name} must be in {lo}..={hi}, got {v}")
    })
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    check(tol > 0.0 && tol <= 1e-2, || {
        format!("--tol must be in (0, 1e-2], got {tol}")
    })
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        use limits::*;
        if let Some(t) = self.threads {
            check_count("threads", t, 1, 1024)?;
        }
        match &self.command {
            Command::Shape(a) => {
                check_count("parts", a.parts.len(), 1, MAX_PARTS)?;
                check_count("dilation", a.dilation, 1, 1000)?;
                let p = Partition::new(a.parts.iter().copied())
                    .map_err(|e| CliError::Config(format!("--parts: {e}")))?;
                check(!p.is_empty(), || {
                    "--parts must contain a positive part".into()
                })?;
                p.dilate(a.dilation)
                    .and_then(|d| d.checked_weight())
                    .map_err(|e| CliError::Config(format!("--dilation: {e}")))?;
                check(self.format != Format::Csv, || {
                    "shape has no CSV output".into()
                })?;
            }
            Command::Moments(a) => {
                check_order(a.r, MAX_ORDER)?;
                check_count("kmax", a.kmax, 0, MAX_MOMENT_K)?;
                if let Some(m) = a.tree_max_k {
                    check(a.oracle_trees, || {
                        "--tree-max-k needs --oracle-trees".into()
                    })?;
                    check_count("tree-max-k", m, 0, MAX_TREE_VERTICES - 1)?;
                }
            }
            Command::Trees(a) => {
                check_order(a.r, MAX_ORDER)?;
                check_count("vertices", a.vertices, 1, MAX_TREE_VERTICES)?;
                check(self.format != Format::Csv, || {
                    "trees has no CSV output".into()
                })?;
            }
            Command::Simulate(a) => {
                check_order(a.r, MAX_SIM_ORDER)?;
                check_count("dilation", a.dilation, 1, MAX_MATRIX_DIM / a.r)?;
                check_count("replicas", a.replicas, 2, MAX_REPLICAS)?;
                check_count("kmax", a.kmax, 0, MAX_SIM_KMAX)?;
                check_count("bins", a.bins, 1, MAX_BINS)?;
                check_range(&a.range)?;
                if let Some(c) = a.trunc {
                    check(c.is_finite() && c > 0.0, || {
                        format!("--trunc must be positive, got {c}")
                    })?;
                }
            }
            Command::Law(a) => {
                check_order(a.r, MAX_LAW_ORDER)?;
                check_count("grid", a.grid, MIN_GRID, MAX_GRID)?;
                check_tol(a.tol)?;
                check_count("kmax", a.kmax, 0, MAX_SIM_KMAX)?;
            }
            Command::SampleLaw(a) => {
                check_order(a.r, MAX_ORDER)?;
                check_count("samples", a.samples, 1, MAX_SAMPLES)?;
                check_count("bins", a.bins, 1, MAX_BINS)?;
                check_range(&a.range)?;
                check_tol(a.tol)?;
            }
            Command::Triangular(a) => {
                check_count("size", a.size, 1, MAX_MATRIX_DIM)?;
                check_count("replicas", a.replicas, 2, MAX_REPLICAS)?;
                check_count("kmax", a.kmax, 0, MAX_SIM_KMAX)?;
                check_count("bins", a.bins, 1, MAX_BINS)?;
                check_range(&a.range)?;
            }
        }
        Ok(())
    }
}
