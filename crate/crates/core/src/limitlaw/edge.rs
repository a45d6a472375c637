//! Power-law exponents of the density at the ends of the support.

use serde::{Deserialize, Serialize};

use super::{density_grid, DensityGrid, LawError, LimitLaw};

/// Minimum number of grid points a fit window must contain.
pub const MIN_FIT_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    /// `x = 0`, distance measured as `x`.
    Lower,
    /// `x = L(r)`, distance measured as `L(r) - x`.
    Upper,
}

impl Edge {
    /// Window of distances to the edge, as fractions of `L(r)`.
    pub fn window(self) -> (f64, f64) {
        match self {
            Edge::Lower => (1e-5, 1e-2),
            Edge::Upper => (1e-4, 1e-1),
        }
    }

    fn distance(self, edge: f64, x: f64) -> f64 {
        match self {
            Edge::Lower => x,
            Edge::Upper => edge - x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeFit {
    pub edge: Edge,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares slope of `ln f` against `ln(distance to edge)` over the
/// grid points inside the edge's fixed window.
pub fn edge_exponent_fit(grid: &DensityGrid, edge: Edge) -> Result<EdgeFit, LawError> {
    let (lo, hi) = edge.window();
    // a little slack so window-end abscissae survive rounding in `L - x`
    let (lo, hi) = (lo * grid.edge * (1.0 - 1e-9), hi * grid.edge * (1.0 + 1e-9));
    let pts: Vec<(f64, f64)> = grid
        .x
        .iter()
        .zip(&grid.density)
        .filter_map(|(&x, &f)| {
            let d = edge.distance(grid.edge, x);
            (d >= lo && d <= hi && f > 0.0).then(|| (d.ln(), f.ln()))
        })
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(LawError::InsufficientPoints {
            found: pts.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(EdgeFit {
        edge,
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
    })
}

/// Density on `n` geometrically spaced points spanning the fit window of
/// `edge`.
pub fn edge_window_grid(r: usize, edge: Edge, n: usize, tol: f64) -> Result<DensityGrid, LawError> {
    let law = LimitLaw::new(r)?;
    if n < 2 {
        return Err(LawError::InvalidArgument(format!(
            "window grid of {n} points"
        )));
    }
    let l = law.edge();
    let (lo, hi) = edge.window();
    let ratio = (hi / lo).ln();
    let mut xs: Vec<f64> = (0..n)
        .map(|i| {
            let d = l * lo * (ratio * i as f64 / (n - 1) as f64).exp();
            match edge {
                Edge::Lower => d,
                Edge::Upper => l - d,
            }
        })
        .collect();
    // pin the window ends against rounding
    let clamp = |x: f64| {
        let d = edge.distance(l, x).clamp(l * lo, l * hi);
        match edge {
            Edge::Lower => d,
            Edge::Upper => l - d,
        }
    };
    xs.iter_mut().for_each(|x| *x = clamp(*x));
    xs.sort_by(f64::total_cmp);
    density_grid(r, &xs, tol)
}
