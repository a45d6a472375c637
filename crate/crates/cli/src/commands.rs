//! Subcommand bodies. Each returns its payload and the substreams it drew.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use shapedrm_core::combinatorics::DEFAULT_MAX_VERTICES;
use shapedrm_core::limitlaw::{
    beta_product_moment, contour_moment, density_grid, dh_cdf, dh_density, edge_exponent_fit,
    edge_window_grid, BetaProductSampler, Edge, DH_EDGE,
};
use shapedrm_core::spectra::{moment_stats, Ensemble, TabulatedCdf};
use shapedrm_core::{
    count_r_plane_trees, dh_moment, gen_catalan, histogram, ks_distance, levy_distance,
    limit_moment, DensityGrid, EmpiricalDistribution, EntryDistribution, Histogram, LimitLaw,
    Partition, Spectrum, StreamId,
};

use crate::config::{
    limits, LawArgs, MomentsArgs, SampleLawArgs, ShapeArgs, SimulateArgs, TreesArgs, TriangularArgs,
};
use crate::report::*;
use crate::CliError;

/// Stream index of the reference sample drawn by `simulate` at high order;
/// replicas use streams from 0 upward.
pub const REFERENCE_STREAM: u64 = u64::MAX;
/// Draws in that reference sample.
pub const REFERENCE_SAMPLES: usize = 200_000;
/// Samples per stream in `sample-law`.
pub const SAMPLE_CHUNK: usize = 1 << 16;
/// Highest order whose limit CDF `simulate` integrates from the density.
const GRID_CDF_MAX_ORDER: usize = 3;
/// Comparison window for the triangular histogram.
pub const TRIANGULAR_WINDOW: (f64, f64) = (0.2, 2.5);

fn exact(q: &BigRational) -> Exact {
    Exact {
        exact: q.to_string(),
        value: q.to_f64().unwrap_or(f64::NAN),
    }
}

fn in_pool<T: Send>(
    threads: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(work()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(work))
            .map_err(|e| CliError::Numerical(format!("worker pool: {e}"))),
    }
}

fn default_range(range: &Option<Vec<f64>>, edge: f64) -> (f64, f64) {
    match range {
        Some(r) => (r[0], r[1]),
        None => (0.0, 1.05 * edge),
    }
}

fn summaries(
    spectra: &[Spectrum],
    kmax: usize,
    reference: impl Fn(usize) -> f64,
) -> Result<Vec<MomentSummary>, CliError> {
    let stats = moment_stats(spectra, kmax as u32)?;
    Ok((0..=kmax)
        .map(|k| {
            let r = reference(k);
            MomentSummary {
                k,
                mean: stats.mean[k],
                variance: stats.variance[k],
                std_error: stats.std_error(k),
                reference: r,
                relative_error: (stats.mean[k] - r).abs() / r.abs(),
            }
        })
        .collect())
}

fn limit_moment_f64(r: usize, k: usize) -> f64 {
    limit_moment(r, k)
        .ok()
        .and_then(|q| q.to_f64())
        .unwrap_or(f64::NAN)
}

pub fn shape(a: &ShapeArgs) -> Result<ShapeReport, CliError> {
    let base = Partition::new(a.parts.iter().copied())
        .map_err(|e| CliError::Config(format!("--parts: {e}")))?;
    let dilated = base
        .dilate(a.dilation)
        .map_err(|e| CliError::Config(format!("--dilation: {e}")))?;
    let ratio = base
        .balance_ratio(a.dilation)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(ShapeReport {
        parts: base.parts().to_vec(),
        dilation: a.dilation,
        diagram: base.render(),
        dilated_parts: dilated.parts().to_vec(),
        length: dilated.length(),
        width: dilated.width(),
        weight: dilated.weight(),
        conjugate: dilated.conjugate().parts().to_vec(),
        balance_ratio: Exact {
            exact: ratio.to_string(),
            value: *ratio.numer() as f64 / *ratio.denom() as f64,
        },
    })
}

pub fn moments(a: &MomentsArgs) -> Result<MomentsReport, CliError> {
    let law = LimitLaw::new(a.r)?;
    let tree_max = a
        .oracle_trees
        .then(|| a.tree_max_k.unwrap_or(a.kmax.min(6)).min(a.kmax));
    let rows = (0..=a.kmax)
        .map(|k| {
            let c = gen_catalan(a.r, k)?;
            let trees = match tree_max {
                Some(m) if k <= m => Some(count_r_plane_trees(a.r, k + 1, DEFAULT_MAX_VERTICES)?),
                _ => None,
            };
            Ok(MomentRow {
                k,
                gen_catalan: c.to_string(),
                moment: exact(&limit_moment(a.r, k)?),
                trees_agree: trees.as_ref().map(|t| *t == c),
                tree_count: trees.map(|t| t.to_string()),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(MomentsReport {
        r: a.r,
        edge: exact(law.edge_exact()),
        rows,
    })
}

pub fn trees(a: &TreesArgs) -> Result<TreesReport, CliError> {
    let count = count_r_plane_trees(a.r, a.vertices, limits::MAX_TREE_VERTICES)?;
    let c = gen_catalan(a.r, a.vertices - 1)?;
    Ok(TreesReport {
        r: a.r,
        vertices: a.vertices,
        agree: count == c,
        count: count.to_string(),
        gen_catalan: c.to_string(),
    })
}

/// Pooled eigenvalues, their histogram and moment summaries.
struct Pooled {
    moments: Vec<MomentSummary>,
    empirical: EmpiricalDistribution,
    histogram: Histogram,
}

fn run_ensemble(
    ensemble: &Ensemble,
    threads: Option<usize>,
    kmax: usize,
    bins: usize,
    range: (f64, f64),
    reference: impl Fn(usize) -> f64,
) -> Result<Pooled, CliError> {
    let spectra = ensemble.spectra(threads)?;
    let moments = summaries(&spectra, kmax, reference)?;
    let empirical = EmpiricalDistribution::pooled(&spectra);
    let histogram = histogram(empirical.values(), bins, range)?;
    Ok(Pooled {
        moments,
        empirical,
        histogram,
    })
}

fn replica_streams(replicas: usize) -> Substreams {
    Substreams {
        purpose: "replicas".into(),
        first: 0,
        count: replicas as u64,
    }
}

pub fn simulate(
    a: &SimulateArgs,
    threads: Option<usize>,
) -> Result<(SimulateReport, Vec<Substreams>), CliError> {
    let law = LimitLaw::new(a.r)?;
    let mut dist = EntryDistribution::new(a.entries);
    if let Some(c) = a.trunc {
        dist = dist
            .truncate_standardize(c)
            .map_err(|e| CliError::Config(format!("--trunc: {e}")))?;
    }
    let base = Partition::staircase(a.r).map_err(|e| CliError::Config(e.to_string()))?;
    let ensemble = Ensemble::dilated(&base, a.dilation, dist, a.replicas, a.seed)?;
    let pooled = run_ensemble(
        &ensemble,
        threads,
        a.kmax,
        a.bins,
        default_range(&a.range, law.edge()),
        |k| limit_moment_f64(a.r, k),
    )?;
    let mut streams = vec![replica_streams(a.replicas)];

    let (reference_cdf, levy, ks) = if a.r <= GRID_CDF_MAX_ORDER {
        let cdf = DensityGrid::graded(a.r, 256, 1e-8)?.cdf()?;
        (
            ReferenceCdf::DensityGrid,
            levy_distance(&pooled.empirical, &cdf),
            ks_distance(&pooled.empirical, &cdf),
        )
    } else {
        let sampler = BetaProductSampler::new(a.r)?;
        let mut rng = StreamId::new(a.seed, REFERENCE_STREAM).rng();
        let draws = (0..REFERENCE_SAMPLES)
            .map(|_| rng.sample(&sampler))
            .collect();
        let reference = EmpiricalDistribution::from_values(draws);
        streams.push(Substreams {
            purpose: "reference-sample".into(),
            first: REFERENCE_STREAM,
            count: 1,
        });
        (
            ReferenceCdf::BetaProductSample,
            levy_distance(&pooled.empirical, &reference),
            ks_distance(&pooled.empirical, &reference),
        )
    };

    Ok((
        SimulateReport {
            r: a.r,
            dilation: a.dilation,
            matrix_dim: ensemble.shape.length(),
            entries: a.entries,
            truncation: a.trunc,
            truncated_std: dist.truncated_std(),
            edge: law.edge(),
            moments: pooled.moments,
            histogram: pooled.histogram,
            reference_cdf,
            levy_distance: levy,
            ks_distance: ks,
        },
        streams,
    ))
}

/// Points per edge window in the exponent fits.
const EDGE_FIT_POINTS: usize = 24;

pub fn law(a: &LawArgs) -> Result<LawReport, CliError> {
    let law = LimitLaw::new(a.r)?;
    let grid = DensityGrid::graded(a.r, a.grid, a.tol)?;
    let cdf = grid.cdf()?;
    let edge_fits = [Edge::Lower, Edge::Upper]
        .into_iter()
        .map(|edge| {
            let g = edge_window_grid(a.r, edge, EDGE_FIT_POINTS, a.tol)?;
            edge_exponent_fit(&g, edge)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let moments = (0..=a.kmax)
        .map(|k| {
            let m = limit_moment(a.r, k)?;
            let mf = m.to_f64().unwrap_or(f64::NAN);
            let contour = contour_moment(a.r, k, 64, 1e-12)?.value;
            let on_grid = grid.moment(k as u32);
            Ok(MomentCheck {
                k,
                beta_product_equal: beta_product_moment(a.r, k)? == m,
                contour,
                contour_relative_error: (contour - mf).abs() / mf,
                grid: on_grid,
                grid_relative_error: (on_grid - mf).abs() / mf,
                exact: exact(&m),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    // node 0 is the hard edge, where the density is infinite
    Ok(LawReport {
        r: a.r,
        edge: exact(law.edge_exact()),
        tol: a.tol,
        mass: grid.mass(),
        grid: GridTable {
            x: grid.x[1..].to_vec(),
            density: grid.density[1..].to_vec(),
            abs_err: grid.abs_err[1..].to_vec(),
            cdf: cdf.cdf[1..].to_vec(),
        },
        edge_fits,
        moments,
    })
}

/// Per-stream histogram counts and power sums.
struct Chunk {
    counts: Vec<u64>,
    underflow: usize,
    overflow: usize,
    sums: Vec<f64>,
    sums_sq: Vec<f64>,
}

/// Moment orders reported by `sample-law`.
const SAMPLE_KMAX: usize = 6;

pub fn sample_law(
    a: &SampleLawArgs,
    threads: Option<usize>,
) -> Result<(SampleLawReport, Vec<Substreams>), CliError> {
    let sampler = BetaProductSampler::new(a.r)?;
    let edge = sampler.edge();
    let range = default_range(&a.range, edge);
    let chunks = a.samples.div_ceil(SAMPLE_CHUNK);
    let draw_chunk = |c: usize| -> Result<Chunk, CliError> {
        let mut rng = StreamId::new(a.seed, c as u64).rng();
        let n = SAMPLE_CHUNK.min(a.samples - c * SAMPLE_CHUNK);
        let ys: Vec<f64> = (0..n).map(|_| rng.sample(&sampler)).collect();
        let h = histogram(&ys, a.bins, range)?;
        let mut sums = vec![0.0; SAMPLE_KMAX + 1];
        let mut sums_sq = vec![0.0; SAMPLE_KMAX + 1];
        for &y in &ys {
            let mut p = 1.0;
            for k in 0..=SAMPLE_KMAX {
                sums[k] += p;
                sums_sq[k] += p * p;
                p *= y;
            }
        }
        Ok(Chunk {
            counts: h.counts,
            underflow: h.underflow,
            overflow: h.overflow,
            sums,
            sums_sq,
        })
    };
    let parts = in_pool(threads, || {
        (0..chunks)
            .into_par_iter()
            .map(draw_chunk)
            .collect::<Result<Vec<_>, _>>()
    })??;

    // merge in stream order so floating sums do not depend on scheduling
    let mut hist = histogram(&[], a.bins, range)?;
    let mut sums = [0.0; SAMPLE_KMAX + 1];
    let mut sums_sq = [0.0; SAMPLE_KMAX + 1];
    for p in &parts {
        hist.counts
            .iter_mut()
            .zip(&p.counts)
            .for_each(|(c, d)| *c += d);
        hist.underflow += p.underflow;
        hist.overflow += p.overflow;
        for k in 0..=SAMPLE_KMAX {
            sums[k] += p.sums[k];
            sums_sq[k] += p.sums_sq[k];
        }
    }
    hist.total = a.samples;
    let width = (range.1 - range.0) / a.bins as f64;
    hist.density = hist
        .counts
        .iter()
        .map(|&c| c as f64 / (a.samples as f64 * width))
        .collect();

    let n = a.samples as f64;
    let moments = (0..=SAMPLE_KMAX)
        .map(|k| {
            let mean = sums[k] / n;
            let variance = if a.samples > 1 {
                ((sums_sq[k] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            let r = limit_moment_f64(a.r, k);
            MomentSummary {
                k,
                mean,
                variance,
                std_error: (variance / n).sqrt(),
                reference: r,
                relative_error: (mean - r).abs() / r,
            }
        })
        .collect();

    let density_at_centres = if a.r <= limits::MAX_LAW_ORDER {
        let centres: Vec<f64> = hist.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Some(density_grid(a.r, &centres, a.tol)?.density)
    } else {
        None
    };

    Ok((
        SampleLawReport {
            r: a.r,
            samples: a.samples,
            edge,
            histogram: hist,
            density_at_centres,
            moments,
        },
        vec![Substreams {
            purpose: "samples".into(),
            first: 0,
            count: chunks as u64,
        }],
    ))
}

/// Abscissae on which the triangular limit CDF is tabulated.
const TRIANGULAR_CDF_POINTS: usize = 2001;
/// Decades below `e` covered by log-spaced nodes of that table.
const TRIANGULAR_CDF_DECADES: usize = 16;

pub fn triangular(
    a: &TriangularArgs,
    threads: Option<usize>,
) -> Result<(TriangularReport, Vec<Substreams>), CliError> {
    let ensemble = Ensemble {
        shape: Partition::staircase(a.size).map_err(|e| CliError::Config(e.to_string()))?,
        scale: a.size,
        dist: EntryDistribution::new(a.entries),
        replicas: a.replicas,
        seed: a.seed,
    };
    let pooled = run_ensemble(
        &ensemble,
        threads,
        a.kmax,
        a.bins,
        default_range(&a.range, DH_EDGE),
        |k| dh_moment(k).to_f64().unwrap_or(f64::NAN),
    )?;
    let h = &pooled.histogram;
    let density_at_centres = h
        .edges
        .windows(2)
        .map(|w| dh_density(0.5 * (w[0] + w[1])))
        .collect();

    let (lo, hi) = TRIANGULAR_WINDOW;
    let mut below = h.underflow as u64;
    let mut window_sup: f64 = 0.0;
    for (i, &e) in h.edges.iter().enumerate() {
        if i > 0 {
            below += h.counts[i - 1];
        }
        if e >= lo && e <= hi {
            let gap = (below as f64 / h.total as f64 - dh_cdf(e)).abs();
            window_sup = window_sup.max(gap);
        }
    }

    // the limit CDF climbs on a logarithmic scale near 0, so the table adds
    // log-spaced nodes down to where eigenvalues are rounding noise
    let uniform =
        (0..TRIANGULAR_CDF_POINTS).map(|i| DH_EDGE * i as f64 / (TRIANGULAR_CDF_POINTS - 1) as f64);
    let graded =
        (1..=16 * TRIANGULAR_CDF_DECADES).map(|j| DH_EDGE * 10f64.powf(-(j as f64) / 16.0));
    let points = uniform.chain(graded).collect();
    let limit = TabulatedCdf::new(dh_cdf, points);
    Ok((
        TriangularReport {
            size: a.size,
            replicas: a.replicas,
            entries: a.entries,
            moments: pooled.moments,
            density_at_centres,
            window: TRIANGULAR_WINDOW,
            window_sup_discrepancy: window_sup,
            ks_distance: ks_distance(&pooled.empirical, &limit),
            levy_distance: levy_distance(&pooled.empirical, &limit),
            histogram: pooled.histogram,
        },
        vec![replica_streams(a.replicas)],
    ))
}
