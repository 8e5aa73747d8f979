use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::numerics::lower_quantile;

/// Grid points with trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub x_grid: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Trapezoid weights for arbitrary strictly increasing points.
    pub fn from_points(x_grid: Vec<f64>) -> Result<Self> {
        if x_grid.len() < 2 || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation(
                "quadrature grid",
                "need at least two strictly increasing points",
            ));
        }
        let j = x_grid.len();
        let mut weights = vec![0.0; j];
        for k in 0..j - 1 {
            let half = 0.5 * (x_grid[k + 1] - x_grid[k]);
            weights[k] += half;
            weights[k + 1] += half;
        }
        Ok(QuadratureGrid { x_grid, weights })
    }

    pub fn uniform(lo: f64, hi: f64, j_points: usize) -> Result<Self> {
        if !(hi > lo) || j_points < 2 {
            return Err(Error::validation(
                "quadrature grid",
                format!("bad range [{lo}, {hi}] with {j_points} points"),
            ));
        }
        let step = (hi - lo) / (j_points - 1) as f64;
        let mut pts: Vec<f64> = (0..j_points).map(|k| lo + step * k as f64).collect();
        pts[j_points - 1] = hi;
        Self::from_points(pts)
    }

    pub fn len(&self) -> usize {
        self.x_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_grid.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.x_grid[self.len() - 1] - self.x_grid[0]
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Uniform grid over the pooled `x` samples from the 0.1% to the 99.9%
/// quantile, widened on each side by `pad_fraction` of that range.
pub fn make_grid(
    sample_set: &SampleSet,
    j_points: usize,
    pad_fraction: f64,
) -> Result<QuadratureGrid> {
    if j_points < 11 {
        return Err(Error::validation(
            "grid",
            format!("j_points must be at least 11, got {j_points}"),
        ));
    }
    if !(pad_fraction >= 0.0 && pad_fraction.is_finite()) {
        return Err(Error::validation(
            "grid",
            format!("pad_fraction must be nonnegative, got {pad_fraction}"),
        ));
    }
    let mut pooled = sample_set.pooled_x();
    pooled.sort_by(f64::total_cmp);
    if pooled.is_empty() || pooled[0] == pooled[pooled.len() - 1] {
        return Err(Error::validation(
            "grid",
            "need at least two distinct x values",
        ));
    }
    let mut lo = lower_quantile(&pooled, 0.001);
    let mut hi = lower_quantile(&pooled, 0.999);
    if lo == hi {
        // Almost all mass on one atom: fall back to the full range.
        lo = pooled[0];
        hi = pooled[pooled.len() - 1];
    }
    let pad = pad_fraction * (hi - lo);
    QuadratureGrid::uniform(lo - pad, hi + pad, j_points)
}
