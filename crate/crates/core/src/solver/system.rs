//! Discretized integral operator and the antiderivative of a grid function.

use nalgebra::{DMatrix, DVector};

use super::grid::QuadratureGrid;
use crate::error::{Error, Result};
use crate::estimation::KernelMatrix;

/// `A[i][j] = K(z_i, x_j) w_j`, so that `(A θ)_i ≈ ∫ K(z_i, x) θ(x) dx`.
pub fn assemble_system(kernel: &KernelMatrix, grid: &QuadratureGrid) -> Result<DMatrix<f64>> {
    if kernel.x_grid != grid.x_grid {
        return Err(Error::validation(
            "system",
            "kernel grid differs from quadrature grid",
        ));
    }
    let mut a = kernel.entries.clone();
    for (j, w) in grid.weights.iter().enumerate() {
        a.column_mut(j).scale_mut(*w);
    }
    Ok(a)
}

/// Predicted right-hand side `A θ`.
pub fn forward_apply(a: &DMatrix<f64>, theta: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != a.ncols() {
        return Err(Error::Dimension {
            context: "forward_apply",
            expected: a.ncols(),
            found: theta.len(),
        });
    }
    Ok((a * DVector::from_column_slice(theta))
        .iter()
        .copied()
        .collect())
}

/// `λ(x_j) = a - ∫_{x_j}^{x_max} θ(t) dt` by the trapezoid rule. Mass of `θ`
/// beyond the grid is taken to be zero.
pub fn antiderivative(theta: &[f64], grid: &QuadratureGrid, a: f64) -> Vec<f64> {
    let j = grid.len();
    let mut out = vec![a; j];
    for k in (0..j.saturating_sub(1)).rev() {
        let h = grid.x_grid[k + 1] - grid.x_grid[k];
        out[k] = out[k + 1] - 0.5 * h * (theta[k] + theta[k + 1]);
    }
    out
}

/// Piecewise-linear evaluation of a grid function, held constant beyond the
/// end points.
pub fn interpolate(grid: &QuadratureGrid, values: &[f64], x: f64) -> f64 {
    let xs = &grid.x_grid;
    let j = xs.len();
    if x <= xs[0] {
        return values[0];
    }
    if x >= xs[j - 1] {
        return values[j - 1];
    }
    let k = xs.partition_point(|&g| g <= x) - 1;
    let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    values[k] + t * (values[k + 1] - values[k])
}
