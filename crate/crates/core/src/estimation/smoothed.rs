//! Gaussian-smoothed conditional mean
//! `μσ(z) = E ∫ φσ(x - X(z)) Y(x) dx`.
//!
//! Each subject's integral is computed with the 41-node Gauss–Hermite rule in
//! the standardized variable `(x - X(z)) / σ`. The same subjects are used for
//! every `σ` and for the unsmoothed mean, so differences across a `σ` ladder
//! measure bias rather than Monte-Carlo noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Scenario, Unit};
use crate::numerics::{gauss_hermite_41, mean_stderr};
use crate::rng::{substream, Stream};

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

fn draw_units(scenario: &Scenario, z: f64, n: usize, seed: u64) -> Result<Vec<Unit>> {
    if n == 0 {
        return Err(Error::validation("sample size", "need n >= 1"));
    }
    scenario.validate()?;
    let level = z.to_bits();
    Ok((0..n as u64)
        .into_par_iter()
        .map(|r| scenario.draw_unit(&mut substream(seed, Stream::Smoothing, level, r)))
        .collect())
}

fn smoothed_outcome(scenario: &Scenario, x: f64, unit: &Unit, sigma: f64) -> f64 {
    let (nodes, weights) = gauss_hermite_41();
    nodes
        .iter()
        .zip(weights)
        .map(|(t, w)| w * scenario.y_of(x + sigma * t, unit))
        .sum()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(
            "sigma",
            format!("must be positive, got {sigma}"),
        ))
    }
}

/// Monte-Carlo estimate of `μσ(z)` from `n` subjects.
pub fn smoothed_mu(scenario: &Scenario, z: f64, sigma: f64, n: usize, seed: u64) -> Result<f64> {
    check_sigma(sigma)?;
    let units = draw_units(scenario, z, n, seed)?;
    let vals: Vec<f64> = units
        .par_iter()
        .map(|u| smoothed_outcome(scenario, scenario.x_of(z, u), u, sigma))
        .collect();
    Ok(mean_stderr(&vals).0)
}

/// Plain Monte-Carlo `μ(z) = E f(g(z, V), U)` on the same subjects that
/// [`smoothed_mu`] uses for the same seed.
pub fn direct_mu(scenario: &Scenario, z: f64, n: usize, seed: u64) -> Result<MeanEstimate> {
    let units = draw_units(scenario, z, n, seed)?;
    let vals: Vec<f64> = units
        .par_iter()
        .map(|u| scenario.y_of(scenario.x_of(z, u), u))
        .collect();
    let (mean, stderr) = mean_stderr(&vals);
    Ok(MeanEstimate { mean, stderr })
}

/// `μσ(z) - μ(z)` for each `σ`, averaged subject by subject on common draws.
pub fn smoothing_gap(
    scenario: &Scenario,
    z: f64,
    sigmas: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<MeanEstimate>> {
    for &s in sigmas {
        check_sigma(s)?;
    }
    let units = draw_units(scenario, z, n, seed)?;
    Ok(sigmas
        .iter()
        .map(|&sigma| {
            let diffs: Vec<f64> = units
                .par_iter()
                .map(|u| {
                    let x = scenario.x_of(z, u);
                    smoothed_outcome(scenario, x, u, sigma) - scenario.y_of(x, u)
                })
                .collect();
            let (mean, stderr) = mean_stderr(&diffs);
            MeanEstimate { mean, stderr }
        })
        .collect())
}
