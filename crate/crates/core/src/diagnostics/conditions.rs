//! Probes of the bounded-density, uncorrelatedness and completeness conditions.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::report::ConditionReport;
use crate::error::{Error, Result};
use crate::model::{check_condition5, Degeneracy, Scenario};
use crate::rng::{substream, Stream};

pub const DENSITY_BINS: usize = 100;
/// Maximum allowed ratio of the sup statistic under bin doubling.
pub const DENSITY_STABILITY: f64 = 2.0;
/// A single value repeated in at least this share of draws marks an atom.
pub const ATOM_SHARE: f64 = 0.01;
pub const RANK_TOL: f64 = 1e-6;
/// Largest singular value at or below this counts as an all-zero design.
pub const ZERO_DESIGN_TOL: f64 = 1e-10;

fn max_tie_share(sorted: &[f64]) -> f64 {
    let mut best = 1;
    let mut run = 1;
    for w in sorted.windows(2) {
        run = if w[1] == w[0] { run + 1 } else { 1 };
        best = best.max(run);
    }
    best as f64 / sorted.len() as f64
}

fn sup_histogram_density(levels: &[Vec<f64>], lo: f64, hi: f64, bins: usize) -> f64 {
    let width = (hi - lo) / bins as f64;
    levels
        .iter()
        .map(|xs| {
            let mut counts = vec![0usize; bins];
            for &x in xs {
                let k = (((x - lo) / width) as usize).min(bins - 1);
                counts[k] += 1;
            }
            let top = counts.into_iter().max().unwrap_or(0);
            top as f64 / (xs.len() as f64 * width)
        })
        .fold(0.0, f64::max)
}

/// Histogram bound on `sup_{x,z} p_z(x)` from `n` draws of `X(z)` per level.
///
/// Statistics: `sup_density` on [`DENSITY_BINS`] bins over the pooled range,
/// `sup_density_doubled` on twice as many, their `bin_ratio`, and the count of
/// `atomic_levels`. Passes when the statistic is finite, no level has an atom
/// and the ratio stays below [`DENSITY_STABILITY`].
pub fn density_sup_estimate(scenario: &Scenario, n: usize, seed: u64) -> Result<ConditionReport> {
    scenario.validate()?;
    if n < 2 {
        return Err(Error::validation(
            "sample size",
            "density estimate needs n >= 2",
        ));
    }
    let levels: Vec<Vec<f64>> = scenario
        .z_levels
        .iter()
        .enumerate()
        .map(|(li, &z)| {
            let mut xs: Vec<f64> = (0..n as u64)
                .into_par_iter()
                .map(|r| {
                    let unit =
                        scenario.draw_unit(&mut substream(seed, Stream::Density, li as u64, r));
                    scenario.x_of(z, &unit)
                })
                .collect();
            xs.sort_by(f64::total_cmp);
            xs
        })
        .collect();

    let mut report = ConditionReport::new(3);
    let atomic: Vec<f64> = scenario
        .z_levels
        .iter()
        .zip(&levels)
        .filter(|(_, xs)| max_tie_share(xs) >= ATOM_SHARE)
        .map(|(&z, _)| z)
        .collect();
    report.stat("atomic_levels", atomic.len() as f64);

    let lo = levels.iter().map(|xs| xs[0]).fold(f64::INFINITY, f64::min);
    let hi = levels
        .iter()
        .map(|xs| xs[xs.len() - 1])
        .fold(f64::NEG_INFINITY, f64::max);
    let (sup, sup2) = if hi > lo {
        (
            sup_histogram_density(&levels, lo, hi, DENSITY_BINS),
            sup_histogram_density(&levels, lo, hi, 2 * DENSITY_BINS),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let ratio = sup2 / sup;
    report
        .stat("sup_density", sup)
        .stat("sup_density_doubled", sup2)
        .stat("bin_ratio", ratio);

    report.pass = atomic.is_empty() && sup.is_finite() && ratio < DENSITY_STABILITY;
    report.details = if !atomic.is_empty() {
        format!("atomic X(z) at z = {atomic:?}: density unbounded")
    } else if !report.pass {
        format!("histogram sup not stable under bin doubling (ratio {ratio:.3})")
    } else {
        format!("sup density ≈ {sup:.4}, stable under bin doubling")
    };
    Ok(report)
}

/// Indices of `k` levels spread evenly over `0..len`.
fn spread(len: usize, k: usize) -> Vec<usize> {
    if len <= k {
        return (0..len).collect();
    }
    (0..k)
        .map(|i| (i * (len - 1) + (k - 1) / 2) / (k - 1))
        .collect()
}

/// Runs the correlation probe on every `(x, z)` cell with `x` from
/// `x_grid_coarse` and five instrument levels spread over the scenario's
/// levels. Passes when every `|corr| <= 3 stderr`.
pub fn condition5_grid(
    scenario: &Scenario,
    x_grid_coarse: &[f64],
    n: usize,
    seed: u64,
) -> Result<ConditionReport> {
    scenario.validate()?;
    if x_grid_coarse.is_empty() {
        return Err(Error::validation(
            "condition-5 grid",
            "need at least one x value",
        ));
    }
    let zs: Vec<f64> = spread(scenario.z_levels.len(), 5)
        .into_iter()
        .map(|i| scenario.z_levels[i])
        .collect();
    let mut worst_score: f64 = 0.0;
    let mut worst_corr: f64 = 0.0;
    let mut violations = Vec::new();
    let mut degenerate = 0;
    for &z in &zs {
        for &x in x_grid_coarse {
            let cell = check_condition5(scenario, x, z, n, seed)?;
            if cell.degeneracy != Degeneracy::None {
                degenerate += 1;
            }
            let score = if cell.correlation == 0.0 {
                0.0
            } else {
                cell.correlation.abs() / cell.stderr
            };
            worst_score = worst_score.max(score);
            worst_corr = worst_corr.max(cell.correlation.abs());
            if !cell.consistent_with_zero() {
                violations.push((x, z, cell.correlation));
            }
        }
    }
    let mut report = ConditionReport::new(5);
    report
        .stat("cells", (zs.len() * x_grid_coarse.len()) as f64)
        .stat("degenerate_cells", degenerate as f64)
        .stat("max_abs_corr", worst_corr)
        .stat("max_abs_score", worst_score)
        .stat("violations", violations.len() as f64);
    report.pass = violations.is_empty();
    report.details = if report.pass {
        format!("all cells within 3 stderr of zero (max score {worst_score:.2})")
    } else {
        let (x, z, c) = violations[0];
        format!(
            "{} cell(s) correlated, e.g. x = {x}, z = {z}: corr {c:.4}",
            violations.len()
        )
    };
    Ok(report)
}

/// Spectrum of the design matrix. Completeness cannot be decided from finite
/// data, so this fails only on an all-zero design or numerical rank below 2.
pub fn completeness_spectrum(a: &DMatrix<f64>) -> ConditionReport {
    let mut sv: Vec<f64> = if a.is_empty() {
        Vec::new()
    } else {
        a.clone().singular_values().iter().copied().collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    let s1 = sv.first().copied().unwrap_or(0.0);
    let kept: Vec<f64> = sv
        .iter()
        .copied()
        .filter(|&s| s > RANK_TOL * s1 && s > 0.0)
        .collect();
    let rank = if s1 <= ZERO_DESIGN_TOL { 0 } else { kept.len() };
    let cond = if rank == 0 {
        f64::INFINITY
    } else {
        s1 / kept[rank - 1]
    };

    let mut report = ConditionReport::new(6);
    report
        .stat("rank", rank as f64)
        .stat("condition_number", cond)
        .stat("sigma_max", s1)
        .stat("levels", a.nrows() as f64);
    for (k, s) in sv.iter().enumerate().take(10) {
        report.stat(&format!("sigma_{:02}", k + 1), *s);
    }
    report.pass = rank >= 2;
    report.details = if s1 <= ZERO_DESIGN_TOL {
        "no instrument: design matrix is numerically zero".into()
    } else if rank < 2 {
        format!("insufficient levels: numerical rank {rank}")
    } else {
        format!("numerical rank {rank}, condition number {cond:.3e}")
    };
    report
}
