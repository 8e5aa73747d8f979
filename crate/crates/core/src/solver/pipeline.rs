use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::grid::{make_grid, QuadratureGrid};
use super::system::assemble_system;
use super::tikhonov::{LambdaChoice, LambdaMethod, Penalty, RegularizedSolution, TikhonovProblem};
use crate::error::{Error, Result};
use crate::estimation::{build_kernel, build_rhs, KernelMatrix, RhsVector};
use crate::model::SampleSet;

/// A fixed regularization strength or an automatic selection rule.
///
/// Serialized as a number or as `"auto:discrepancy"` / `"auto:l-curve"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LambdaSpec", into = "LambdaSpec")]
pub enum LambdaRule {
    Fixed(f64),
    Auto(LambdaMethod),
}

impl Default for LambdaRule {
    fn default() -> Self {
        LambdaRule::Auto(LambdaMethod::Discrepancy)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LambdaSpec {
    Fixed(f64),
    Named(String),
}

impl TryFrom<LambdaSpec> for LambdaRule {
    type Error = Error;

    fn try_from(raw: LambdaSpec) -> Result<Self> {
        match raw {
            LambdaSpec::Fixed(v) if v >= 0.0 && v.is_finite() => Ok(LambdaRule::Fixed(v)),
            LambdaSpec::Fixed(v) => Err(Error::validation(
                "lambda",
                format!("must be nonnegative, got {v}"),
            )),
            LambdaSpec::Named(s) => s.parse(),
        }
    }
}

impl From<LambdaRule> for LambdaSpec {
    fn from(rule: LambdaRule) -> Self {
        match rule {
            LambdaRule::Fixed(v) => LambdaSpec::Fixed(v),
            auto => LambdaSpec::Named(auto.to_string()),
        }
    }
}

impl FromStr for LambdaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto:discrepancy" => Ok(LambdaRule::Auto(LambdaMethod::Discrepancy)),
            "auto:l-curve" => Ok(LambdaRule::Auto(LambdaMethod::LCurve)),
            other => match other.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Ok(LambdaRule::Fixed(v)),
                _ => Err(Error::validation(
                    "lambda",
                    format!("expected a nonnegative number, \"auto:discrepancy\" or \"auto:l-curve\", got {other:?}"),
                )),
            },
        }
    }
}

impl fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaRule::Fixed(v) => write!(f, "{v}"),
            LambdaRule::Auto(LambdaMethod::Discrepancy) => f.write_str("auto:discrepancy"),
            LambdaRule::Auto(LambdaMethod::LCurve) => f.write_str("auto:l-curve"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "GridSpec::default_points")]
    pub j_points: usize,
    #[serde(default = "GridSpec::default_pad")]
    pub pad_fraction: f64,
}

impl GridSpec {
    fn default_points() -> usize {
        201
    }

    fn default_pad() -> f64 {
        0.1
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            j_points: Self::default_points(),
            pad_fraction: Self::default_pad(),
        }
    }
}

/// A solved system together with its factorization.
#[derive(Debug, Clone)]
pub struct Solved {
    pub grid: QuadratureGrid,
    pub design: DMatrix<f64>,
    pub solution: RegularizedSolution,
    pub choice: Option<LambdaChoice>,
    pub problem: TikhonovProblem,
}

impl Solved {
    /// Standard deviation of each `θ̂(x_j)` induced by the right-hand-side noise.
    pub fn propagated_noise(&self, noise_scale: &[f64]) -> Result<Vec<f64>> {
        self.problem
            .propagated_noise(self.solution.lambda, noise_scale)
    }
}

/// Assembles and solves the system defined by a kernel and a right-hand side.
pub fn solve_system(
    kernel: &KernelMatrix,
    rhs: &RhsVector,
    penalty: Penalty,
    rule: LambdaRule,
) -> Result<Solved> {
    if kernel.z_levels != rhs.z_levels {
        return Err(Error::validation(
            "system",
            "kernel and right-hand side have different z levels",
        ));
    }
    if kernel.baseline_z != rhs.baseline_z {
        return Err(Error::validation(
            "system",
            "kernel and right-hand side have different baselines",
        ));
    }
    let grid = QuadratureGrid::from_points(kernel.x_grid.clone())?;
    let design = assemble_system(kernel, &grid)?;
    let problem = TikhonovProblem::new(design.clone(), &rhs.values, penalty)?;
    let (lambda, choice) = match rule {
        LambdaRule::Fixed(v) => (v, None),
        LambdaRule::Auto(method) => {
            let c = problem.select_lambda(&rhs.noise_scale, method)?;
            (c.lambda, Some(c))
        }
    };
    let solution = problem.solve(lambda)?;
    Ok(Solved {
        grid,
        design,
        solution,
        choice,
        problem,
    })
}

/// Everything produced on the way from samples to `θ̂`.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub kernel: KernelMatrix,
    pub rhs: RhsVector,
    pub solved: Solved,
}

pub fn recover(
    sample_set: &SampleSet,
    grid: GridSpec,
    penalty: Penalty,
    rule: LambdaRule,
) -> Result<Recovery> {
    let g = make_grid(sample_set, grid.j_points, grid.pad_fraction)?;
    let kernel = build_kernel(sample_set, &g.x_grid)?;
    let rhs = build_rhs(sample_set)?;
    let solved = solve_system(&kernel, &rhs, penalty, rule)?;
    Ok(Recovery {
        kernel,
        rhs,
        solved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_rule_parses_and_round_trips() {
        assert_eq!(
            "auto:l-curve".parse::<LambdaRule>().unwrap(),
            LambdaRule::Auto(LambdaMethod::LCurve)
        );
        assert_eq!(
            "0.25".parse::<LambdaRule>().unwrap(),
            LambdaRule::Fixed(0.25)
        );
        assert!("-1".parse::<LambdaRule>().is_err());
        assert!("auto:gcv".parse::<LambdaRule>().is_err());
        for rule in [
            LambdaRule::Fixed(1e-3),
            LambdaRule::Auto(LambdaMethod::Discrepancy),
        ] {
            let json = serde_json::to_string(&rule).unwrap();
            assert_eq!(serde_json::from_str::<LambdaRule>(&json).unwrap(), rule);
        }
        assert_eq!(
            serde_json::to_string(&LambdaRule::default()).unwrap(),
            "\"auto:discrepancy\""
        );
        assert!(serde_json::from_str::<LambdaRule>("-0.5").is_err());
    }

    #[test]
    fn grid_spec_defaults() {
        let g: GridSpec = serde_json::from_str("{}").unwrap();
        assert_eq!(g, GridSpec::default());
        assert_eq!(g.j_points, 201);
    }
}
