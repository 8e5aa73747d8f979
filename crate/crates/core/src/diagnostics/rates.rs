//! Convergence-rate experiments over a bandwidth ladder.

use rayon::prelude::*;

use super::report::RateCheck;
use crate::error::{Error, Result};
use crate::estimation::{direct_mu, smoothing_gap};
use crate::model::{true_theta, Scenario};
use crate::numerics::{log_log_slope, mean_stderr, normal_cdf};
use crate::rng::{substream, Stream};

pub const SIGMA_SLOPE_BAND: (f64, f64) = (1.7, 2.3);
pub const PHI_SLOPE_FLOOR: f64 = 0.4;
/// Gaps at or below this multiple of the outcome scale count as zero.
pub const EXACT_TOL: f64 = 1e-12;

fn check_ladder(sigmas: &[f64]) -> Result<()> {
    if sigmas.len() < 3 {
        return Err(Error::validation(
            "sigma ladder",
            format!("need at least 3 bandwidths, got {}", sigmas.len()),
        ));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::validation(
            "sigma ladder",
            format!("bandwidths must be positive, got {s}"),
        ));
    }
    Ok(())
}

fn finish(
    sigmas: &[f64],
    gaps: Vec<f64>,
    stderrs: Vec<f64>,
    scale: f64,
    accept: impl Fn(f64) -> bool,
) -> RateCheck {
    let exact_match = gaps.iter().all(|g| g.abs() <= EXACT_TOL * scale);
    let slope = if exact_match {
        None
    } else {
        let abs: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
        Some(log_log_slope(sigmas, &abs))
    };
    let pass = exact_match || slope.is_some_and(|s| s.is_finite() && accept(s));
    RateCheck {
        sigmas: sigmas.to_vec(),
        gaps,
        stderrs,
        slope,
        exact_match,
        pass,
    }
}

/// Log-log slope of `|μσ(z) - μ(z)|` against `σ`, on common random numbers.
/// Passes when the slope lies in [`SIGMA_SLOPE_BAND`].
pub fn rate_check_sigma(
    scenario: &Scenario,
    z: f64,
    sigma_ladder: &[f64],
    n: usize,
    seed: u64,
) -> Result<RateCheck> {
    check_ladder(sigma_ladder)?;
    let est = smoothing_gap(scenario, z, sigma_ladder, n, seed)?;
    let scale = 1.0 + direct_mu(scenario, z, n, seed)?.mean.abs();
    Ok(finish(
        sigma_ladder,
        est.iter().map(|e| e.mean).collect(),
        est.iter().map(|e| e.stderr).collect(),
        scale,
        |s| s >= SIGMA_SLOPE_BAND.0 && s <= SIGMA_SLOPE_BAND.1,
    ))
}

/// Log-log slope of `|E Φ((x - X(z))/σ) Y'(x) - P(X(z) <= x) θ(x)|` against
/// `σ`, where `Y'` is the analytic potential-outcome derivative and `θ` the
/// analytic effect. Each subject contributes `Φ((x - X)/σ) Y'(x) - I(X <= x) θ(x)`.
/// Passes when the slope is at least [`PHI_SLOPE_FLOOR`].
pub fn rate_check_phi(
    scenario: &Scenario,
    x: f64,
    z: f64,
    sigma_ladder: &[f64],
    n: usize,
    seed: u64,
) -> Result<RateCheck> {
    check_ladder(sigma_ladder)?;
    scenario.validate()?;
    if n < 2 {
        return Err(Error::validation("sample size", "rate check needs n >= 2"));
    }
    let theta = true_theta(scenario, x);
    let draws: Vec<(f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let unit = scenario.draw_unit(&mut substream(seed, Stream::PhiRate, z.to_bits(), r));
            (scenario.x_of(z, &unit), scenario.y1_of(x, &unit))
        })
        .collect();
    let mut gaps = Vec::with_capacity(sigma_ladder.len());
    let mut stderrs = Vec::with_capacity(sigma_ladder.len());
    for &sigma in sigma_ladder {
        let d: Vec<f64> = draws
            .par_iter()
            .map(|&(xz, y1)| {
                let ind = if xz <= x { 1.0 } else { 0.0 };
                normal_cdf((x - xz) / sigma) * y1 - ind * theta
            })
            .collect();
        let (m, se) = mean_stderr(&d);
        gaps.push(m);
        stderrs.push(se);
    }
    let scale = 1.0 + theta.abs();
    Ok(finish(sigma_ladder, gaps, stderrs, scale, |s| {
        s >= PHI_SLOPE_FLOOR
    }))
}
