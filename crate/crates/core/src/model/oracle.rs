//! Ground truth for `θ(x) = E ∂f/∂x (x, U)` and the uncorrelatedness probe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::numerics::mean_stderr;
use crate::rng::{substream, Stream};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Analytic causal effect `E(U1) h'(x)` of the shipped outcome family.
pub fn true_theta(scenario: &Scenario, x: f64) -> f64 {
    scenario.u1_dist.mean() * scenario.h.d1(x)
}

/// Brute-force estimate of `θ(x)`: average over `n` draws of `U` of the
/// central difference of `f(·, U)` at `x`. Returns `(estimate, stderr)`.
pub fn oracle_theta_mc(
    scenario: &Scenario,
    x: f64,
    n: usize,
    seed: u64,
    fd_step: f64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::validation("sample size", "oracle needs n >= 1"));
    }
    if !(fd_step > 0.0) {
        return Err(Error::validation(
            "fd_step",
            format!("must be positive, got {fd_step}"),
        ));
    }
    let diffs: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let unit = scenario.draw_unit(&mut substream(seed, Stream::ThetaOracle, 0, r));
            (scenario.y_of(x + fd_step, &unit) - scenario.y_of(x - fd_step, &unit))
                / (2.0 * fd_step)
        })
        .collect();
    Ok(mean_stderr(&diffs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    None,
    /// `I(X(z) <= x)` took a single value.
    ConstantIndicator,
    /// `Y'(x)` took a single value.
    ConstantEffect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition5Estimate {
    pub x: f64,
    pub z: f64,
    pub correlation: f64,
    pub stderr: f64,
    pub degeneracy: Degeneracy,
}

impl Condition5Estimate {
    /// `|corr| <= 3 stderr`; degenerate cells have correlation exactly zero.
    pub fn consistent_with_zero(&self) -> bool {
        self.correlation.abs() <= 3.0 * self.stderr
    }
}

/// Sample correlation between `I(g(z, V) <= x)` and `∂f/∂x (x, U)` over `n`
/// joint draws of `(U, V)`.
pub fn check_condition5(
    scenario: &Scenario,
    x: f64,
    z: f64,
    n: usize,
    seed: u64,
) -> Result<Condition5Estimate> {
    let level = scenario
        .z_levels
        .iter()
        .position(|&l| l == z)
        .ok_or_else(|| Error::UnknownLevel {
            z,
            available: scenario.z_levels.clone(),
        })?;
    if n < 3 {
        return Err(Error::validation(
            "sample size",
            "condition-5 check needs n >= 3",
        ));
    }
    // Draws are keyed by level only, so cells at the same z share them.
    let pairs: Vec<(f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let unit =
                scenario.draw_unit(&mut substream(seed, Stream::Condition5, level as u64, r));
            let indicator = if scenario.x_of(z, &unit) <= x {
                1.0
            } else {
                0.0
            };
            (indicator, scenario.y1_of(x, &unit))
        })
        .collect();
    let nf = n as f64;
    let (mi, me) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (i, e)| (a + i / nf, b + e / nf));
    let (mut sii, mut see, mut sie) = (0.0, 0.0, 0.0);
    for (i, e) in &pairs {
        let (di, de) = (i - mi, e - me);
        sii += di * di;
        see += de * de;
        sie += di * de;
    }
    let constant = |pick: fn(&(f64, f64)) -> f64| pairs.iter().all(|p| pick(p) == pick(&pairs[0]));
    let degeneracy = if constant(|p| p.0) {
        Degeneracy::ConstantIndicator
    } else if constant(|p| p.1) {
        Degeneracy::ConstantEffect
    } else {
        Degeneracy::None
    };
    let (correlation, stderr) = match degeneracy {
        Degeneracy::None => {
            let r = (sie / (sii * see).sqrt()).clamp(-1.0, 1.0);
            (r, ((1.0 - r * r) / (nf - 2.0)).sqrt())
        }
        _ => (0.0, 0.0),
    };
    Ok(Condition5Estimate {
        x,
        z,
        correlation,
        stderr,
        degeneracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::scenario::DistSpec;

    #[test]
    fn theta_of_s1_at_origin_is_one() {
        assert_eq!(true_theta(&Scenario::s1(), 0.0), 1.0);
        let t1 = true_theta(&Scenario::s1(), 1.0);
        assert!((t1 - (1.0 - 1f64.tanh().powi(2))).abs() < 1e-15);
        assert!((t1 - 0.41997).abs() < 1e-5);
    }

    #[test]
    fn theta_vanishes_without_effect_and_in_tails() {
        let mut s = Scenario::s1();
        assert!(true_theta(&s, 30.0).abs() < 1e-20);
        assert!(true_theta(&s, -30.0).abs() < 1e-20);
        s.u1_dist = DistSpec::point_mass(0.0);
        for x in [-3.0, 0.0, 2.0] {
            assert_eq!(true_theta(&s, x), 0.0);
        }
    }

    #[test]
    fn oracle_with_zero_effect_is_exactly_zero() {
        let mut s = Scenario::s1();
        s.u1_dist = DistSpec::point_mass(0.0);
        assert_eq!(
            oracle_theta_mc(&s, 0.3, 1000, 1, DEFAULT_FD_STEP).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn oracle_rejects_bad_arguments() {
        let s = Scenario::s1();
        assert!(oracle_theta_mc(&s, 0.0, 0, 1, DEFAULT_FD_STEP).is_err());
        assert!(oracle_theta_mc(&s, 0.0, 10, 1, 0.0).is_err());
    }

    #[test]
    fn oracle_agrees_with_analytic_theta_at_origin() {
        let s = Scenario::s1();
        let (est, se) = oracle_theta_mc(&s, 0.0, 1_000_000, 11, DEFAULT_FD_STEP).unwrap();
        assert!((est - 1.0).abs() <= 3.0 * se, "{est} ± {se}");
    }

    #[test]
    fn point_mass_u1_is_flagged_constant() {
        let mut s = Scenario::s1();
        s.u1_dist = DistSpec::point_mass(1.0);
        let c = check_condition5(&s, 0.0, 1.0, 1000, 2).unwrap();
        assert_eq!(c.degeneracy, Degeneracy::ConstantEffect);
        assert_eq!(c.correlation, 0.0);
        assert!(c.consistent_with_zero());
    }

    #[test]
    fn far_threshold_gives_constant_indicator() {
        let c = check_condition5(&Scenario::s1(), 100.0, 1.0, 1000, 2).unwrap();
        assert_eq!(c.degeneracy, Degeneracy::ConstantIndicator);
        assert_eq!(c.correlation, 0.0);
    }

    #[test]
    fn strong_coupling_is_detected() {
        let mut s = Scenario::s1();
        s.u1_v_coupling = 0.9;
        let c = check_condition5(&s, 0.0, 1.0, 100_000, 4).unwrap();
        assert!(c.correlation.abs() > 5.0 * c.stderr, "{c:?}");
    }

    #[test]
    fn unknown_level_is_an_error() {
        assert!(matches!(
            check_condition5(&Scenario::s1(), 0.0, 0.3, 100, 1),
            Err(Error::UnknownLevel { .. })
        ));
    }
}
