//! Text summaries and CSV tables.

use std::fmt::Write as _;

use shapedrm_core::Histogram;

use crate::report::*;

pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,count,density";
pub const GRID_HEADER: &str = "x,density,abs_err";

pub fn histogram_csv(h: &Histogram) -> String {
    let mut s = String::from(HISTOGRAM_HEADER);
    s.push('\n');
    for (i, (&c, &d)) in h.counts.iter().zip(&h.density).enumerate() {
        let _ = writeln!(s, "{},{},{},{}", h.edges[i], h.edges[i + 1], c, d);
    }
    s
}

pub fn grid_csv(g: &GridTable) -> String {
    let mut s = String::from(GRID_HEADER);
    s.push('\n');
    for i in 0..g.x.len() {
        let _ = writeln!(s, "{},{},{}", g.x[i], g.density[i], g.abs_err[i]);
    }
    s
}

fn moments_csv(m: &MomentsReport) -> String {
    let mut s = String::from("k,gen_catalan,moment,moment_value,tree_count\n");
    for row in &m.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            row.k,
            row.gen_catalan,
            row.moment.exact,
            row.moment.value,
            row.tree_count.as_deref().unwrap_or("")
        );
    }
    s
}

/// The CSV table of a result, if it has one.
pub fn csv(results: &Results) -> Option<String> {
    match results {
        Results::Moments(m) => Some(moments_csv(m)),
        Results::Simulate(s) => Some(histogram_csv(&s.histogram)),
        Results::Law(l) => Some(grid_csv(&l.grid)),
        Results::SampleLaw(s) => Some(histogram_csv(&s.histogram)),
        Results::Triangular(t) => Some(histogram_csv(&t.histogram)),
        Results::Shape(_) | Results::Trees(_) => None,
    }
}

fn moment_lines(s: &mut String, moments: &[MomentSummary]) {
    let _ = writeln!(
        s,
        "{:>3} {:>14} {:>12} {:>14} {:>10}",
        "k", "mean", "std err", "limit", "rel err"
    );
    for m in moments {
        let _ = writeln!(
            s,
            "{:>3} {:>14.6} {:>12.3e} {:>14.6} {:>10.3e}",
            m.k, m.mean, m.std_error, m.reference, m.relative_error
        );
    }
}

pub fn text(record: &ResultRecord) -> String {
    let mut s = String::new();
    match &record.results {
        Results::Shape(r) => {
            s.push_str(&r.diagram);
            let _ = writeln!(s, "dilation      {}", r.dilation);
            let _ = writeln!(s, "length        {}", r.length);
            let _ = writeln!(s, "width         {}", r.width);
            let _ = writeln!(s, "weight        {}", r.weight);
            let _ = writeln!(s, "conjugate     {:?}", r.conjugate);
            let _ = writeln!(
                s,
                "balance ratio {} = {}",
                r.balance_ratio.exact, r.balance_ratio.value
            );
        }
        Results::Moments(r) => {
            let _ = writeln!(s, "r = {}, L(r) = {}", r.r, r.edge.exact);
            let _ = writeln!(
                s,
                "{:>3} {:>24} {:>24} {:>24}",
                "k", "C<r>_k", "m_k", "trees"
            );
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "{:>3} {:>24} {:>24} {:>24}",
                    row.k,
                    row.gen_catalan,
                    row.moment.exact,
                    row.tree_count.as_deref().unwrap_or("-")
                );
            }
        }
        Results::Trees(r) => {
            let _ = writeln!(
                s,
                "r = {}, {} vertices: {} trees (C<r>_{} = {}, {})",
                r.r,
                r.vertices,
                r.count,
                r.vertices - 1,
                r.gen_catalan,
                if r.agree { "agree" } else { "DISAGREE" }
            );
        }
        Results::Simulate(r) => {
            let _ = writeln!(
                s,
                "r = {}, N = {}, dim {}, entries {}{}",
                r.r,
                r.dilation,
                r.matrix_dim,
                r.entries,
                r.truncation
                    .map(|c| format!(" truncated at {c}"))
                    .unwrap_or_default()
            );
            moment_lines(&mut s, &r.moments);
            let _ = writeln!(
                s,
                "Lévy distance {:.6}, KS distance {:.6}",
                r.levy_distance, r.ks_distance
            );
        }
        Results::Law(r) => {
            let _ = writeln!(
                s,
                "r = {}, L(r) = {}, mass on grid {:.10}",
                r.r, r.edge.exact, r.mass
            );
            for f in &r.edge_fits {
                let _ = writeln!(
                    s,
                    "{:?} edge slope {:.4} ({} points)",
                    f.edge, f.slope, f.points
                );
            }
            let _ = writeln!(
                s,
                "{:>3} {:>20} {:>12} {:>12}",
                "k", "m_k", "contour err", "grid err"
            );
            for m in &r.moments {
                let _ = writeln!(
                    s,
                    "{:>3} {:>20} {:>12.3e} {:>12.3e}",
                    m.k, m.exact.exact, m.contour_relative_error, m.grid_relative_error
                );
            }
        }
        Results::SampleLaw(r) => {
            let _ = writeln!(s, "r = {}, {} samples", r.r, r.samples);
            moment_lines(&mut s, &r.moments);
        }
        Results::Triangular(r) => {
            let _ = writeln!(s, "staircase size {}, {} replicas", r.size, r.replicas);
            moment_lines(&mut s, &r.moments);
            let _ = writeln!(
                s,
                "sup discrepancy on [{}, {}] {:.6}, KS {:.6}, Lévy {:.6}",
                r.window.0, r.window.1, r.window_sup_discrepancy, r.ks_distance, r.levy_distance
            );
        }
    }
    let _ = writeln!(s, "({:.2} s)", record.provenance.wall_clock_seconds);
    s
}
