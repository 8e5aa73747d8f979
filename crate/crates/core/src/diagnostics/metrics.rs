//! Accuracy of a recovered effect and the two forward identities.

use super::report::ConsistencyCheck;
use crate::error::{Error, Result};
use crate::estimation::RhsVector;
use crate::model::SampleSet;
use crate::numerics::mean_stderr;
use crate::solver::{antiderivative, forward_apply, interpolate, QuadratureGrid};
use nalgebra::DMatrix;

/// Componentwise tolerance, in noise-scale units, of the forward checks.
pub const CONSISTENCY_TOL: f64 = 3.0;

/// Index range covering the central `fraction` of a grid of `len` points.
pub fn central_range(len: usize, fraction: f64) -> Result<std::ops::RangeInclusive<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::validation(
            "central_fraction",
            format!("must lie in (0, 1], got {fraction}"),
        ));
    }
    if len < 2 {
        return Err(Error::validation(
            "central_fraction",
            "grid needs at least two points",
        ));
    }
    let cut = ((len - 1) as f64 * (1.0 - fraction) / 2.0).round() as usize;
    Ok(cut..=len - 1 - cut)
}

/// Relative L2 (trapezoid-weighted) and relative L∞ error of `theta_hat`
/// over the central `central_fraction` of the grid.
pub fn error_metrics(
    theta_hat: &[f64],
    theta_true: &[f64],
    grid: &QuadratureGrid,
    central_fraction: f64,
) -> Result<(f64, f64)> {
    for (context, len) in [
        ("theta_hat", theta_hat.len()),
        ("theta_true", theta_true.len()),
    ] {
        if len != grid.len() {
            return Err(Error::Dimension {
                context,
                expected: grid.len(),
                found: len,
            });
        }
    }
    let range = central_range(grid.len(), central_fraction)?;
    let sub = QuadratureGrid::from_points(grid.x_grid[range.clone()].to_vec())?;
    let (mut num, mut den, mut inf_num, mut inf_den) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (w, k) in sub.weights.iter().zip(range) {
        let e = theta_hat[k] - theta_true[k];
        num += w * e * e;
        den += w * theta_true[k] * theta_true[k];
        inf_num = inf_num.max(e.abs());
        inf_den = inf_den.max(theta_true[k].abs());
    }
    let ratio = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a / b };
    Ok((ratio(num.sqrt(), den.sqrt()), ratio(inf_num, inf_den)))
}

/// Compares `A θ` with the estimated right-hand side, level by level.
pub fn forward_consistency(
    a: &DMatrix<f64>,
    theta: &[f64],
    rhs: &RhsVector,
) -> Result<ConsistencyCheck> {
    let predicted = forward_apply(a, theta)?;
    if predicted.len() != rhs.values.len() {
        return Err(Error::Dimension {
            context: "forward_consistency",
            expected: predicted.len(),
            found: rhs.values.len(),
        });
    }
    Ok(ConsistencyCheck::new(
        rhs.z_levels.clone(),
        predicted,
        rhs.values.clone(),
        rhs.noise_scale.clone(),
        CONSISTENCY_TOL,
    ))
}

/// Integration-by-parts check: with `Λ` the antiderivative of `θ`, the group
/// mean of `Λ(X)` at level `z` minus that at the baseline equals `(A θ)_z`.
/// The noise scale of each level is the root-sum-square of the two group
/// standard errors of `Λ(X)`.
pub fn antiderivative_identity(
    sample_set: &SampleSet,
    grid: &QuadratureGrid,
    a: &DMatrix<f64>,
    theta: &[f64],
) -> Result<ConsistencyCheck> {
    let predicted = forward_apply(a, theta)?;
    let lam = antiderivative(theta, grid, 0.0);
    let stats = |xs: &[f64]| {
        let vals: Vec<f64> = xs.iter().map(|&x| interpolate(grid, &lam, x)).collect();
        mean_stderr(&vals)
    };
    let (m0, s0) = stats(&sample_set.baseline()?.x);
    let levels: Vec<_> = sample_set.non_baseline().collect();
    if levels.len() != predicted.len() {
        return Err(Error::Dimension {
            context: "antiderivative_identity",
            expected: predicted.len(),
            found: levels.len(),
        });
    }
    let mut observed = Vec::with_capacity(levels.len());
    let mut noise = Vec::with_capacity(levels.len());
    for g in &levels {
        let (m, s) = stats(&g.x);
        observed.push(m - m0);
        noise.push(s.hypot(s0));
    }
    Ok(ConsistencyCheck::new(
        levels.iter().map(|g| g.z).collect(),
        predicted,
        observed,
        noise,
        CONSISTENCY_TOL,
    ))
}
