//! Structural scenarios `Y = U1 h(X) + U2`, `X = g(Z, V)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::smooth::SmoothFunctionSpec;
use crate::error::{Error, Result};
use crate::numerics::normal_cdf;

/// A univariate noise distribution.
///
/// Draws are made by transforming a standard-normal score, which is what lets
/// the coupling between `U1` and `V1` be expressed as a Gaussian copula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum DistSpec {
    Normal { mean: f64, sd: f64 },
    PointMass { value: f64 },
    Uniform { low: f64, high: f64 },
}

impl DistSpec {
    pub fn normal(mean: f64, sd: f64) -> Self {
        DistSpec::Normal { mean, sd }
    }

    pub fn point_mass(value: f64) -> Self {
        DistSpec::PointMass { value }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistSpec::Normal { mean, .. } => mean,
            DistSpec::PointMass { value } => value,
            DistSpec::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            DistSpec::Normal { sd, .. } => sd == 0.0,
            DistSpec::PointMass { .. } => true,
            DistSpec::Uniform { low, high } => low == high,
        }
    }

    /// Maps a standard-normal score to a draw from this distribution.
    pub fn from_score(&self, e: f64) -> f64 {
        match *self {
            DistSpec::Normal { mean, sd } => mean + sd * e,
            DistSpec::PointMass { value } => value,
            DistSpec::Uniform { low, high } => low + (high - low) * normal_cdf(e),
        }
    }

    fn validate(&self, role: &str) -> Result<()> {
        let ok = match *self {
            DistSpec::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd >= 0.0,
            DistSpec::PointMass { value } => value.is_finite(),
            DistSpec::Uniform { low, high } => low.is_finite() && high.is_finite() && low <= high,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(
                "distribution",
                format!("{role}: bad parameters {self:?}"),
            ))
        }
    }
}

/// How the instrument moves the treatment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GFamily {
    /// `X = s(z + v)` with `s(t) = t + c sin(t)`, `|c| < 1`.
    ShiftedInvertible { c: f64 },
    /// `X = 1 + v1 z + v2 z^2`.
    QuadraticRandomCoef,
}

impl GFamily {
    pub fn v_dim(&self) -> usize {
        match self {
            GFamily::ShiftedInvertible { .. } => 1,
            GFamily::QuadraticRandomCoef => 2,
        }
    }

    pub fn apply(&self, z: f64, v: &[f64; 2]) -> f64 {
        match *self {
            GFamily::ShiftedInvertible { c } => {
                let t = z + v[0];
                t + c * t.sin()
            }
            GFamily::QuadraticRandomCoef => 1.0 + v[0] * z + v[1] * z * z,
        }
    }
}

/// One subject's unobserved causes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub u1: f64,
    pub u2: f64,
    /// Unused trailing components are zero.
    pub v: [f64; 2],
}

/// A fully specified structural model with ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub h: SmoothFunctionSpec,
    pub u1_dist: DistSpec,
    pub u2_dist: DistSpec,
    pub g_family: GFamily,
    pub v_dists: Vec<DistSpec>,
    pub z_levels: Vec<f64>,
    #[serde(default)]
    pub baseline_z: f64,
    /// Gaussian-copula correlation between `U1` and `V1`; zero means independent.
    #[serde(default)]
    pub u1_v_coupling: f64,
}

impl Scenario {
    /// The reference scenario: `h = tanh`, `U1 ~ N(1, 0.5)`, `U2 ~ N(0, 1)`,
    /// `X = s(z + V)` with `c = 0.5`, `V ~ N(0, 1)`, nine levels on [-2, 2].
    pub fn s1() -> Self {
        Scenario {
            id: "S1".to_string(),
            h: SmoothFunctionSpec::tanh(1.0, 1.0),
            u1_dist: DistSpec::normal(1.0, 0.5),
            u2_dist: DistSpec::normal(0.0, 1.0),
            g_family: GFamily::ShiftedInvertible { c: 0.5 },
            v_dists: vec![DistSpec::normal(0.0, 1.0)],
            z_levels: (0..9).map(|k| -2.0 + 0.5 * k as f64).collect(),
            baseline_z: 0.0,
            u1_v_coupling: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.h.validate()?;
        self.u1_dist.validate("u1_dist")?;
        self.u2_dist.validate("u2_dist")?;
        if let GFamily::ShiftedInvertible { c } = self.g_family {
            if !(c.abs() < 1.0) {
                return Err(Error::validation(
                    "scenario",
                    format!("shifted-invertible g requires |c| < 1 so that s is invertible, got c = {c}"),
                ));
            }
        }
        if self.v_dists.len() != self.g_family.v_dim() {
            return Err(Error::validation(
                "scenario",
                format!(
                    "g family {:?} needs {} V distributions, got {}",
                    self.g_family,
                    self.g_family.v_dim(),
                    self.v_dists.len()
                ),
            ));
        }
        for (i, d) in self.v_dists.iter().enumerate() {
            d.validate(&format!("v_dists[{i}]"))?;
        }
        if self.z_levels.is_empty() || self.z_levels.iter().any(|z| !z.is_finite()) {
            return Err(Error::validation(
                "scenario",
                "z_levels must be a nonempty list of finite values",
            ));
        }
        if self.z_levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation(
                "scenario",
                "z_levels must be strictly increasing",
            ));
        }
        let baseline_count = self
            .z_levels
            .iter()
            .filter(|&&z| z == self.baseline_z)
            .count();
        if baseline_count != 1 {
            return Err(Error::validation(
                "scenario",
                format!(
                    "z_levels must contain baseline_z = {} exactly once",
                    self.baseline_z
                ),
            ));
        }
        if !(self.u1_v_coupling.abs() <= 1.0) {
            return Err(Error::validation(
                "scenario",
                format!(
                    "u1_v_coupling must lie in [-1, 1], got {}",
                    self.u1_v_coupling
                ),
            ));
        }
        Ok(())
    }

    /// Draws `(U, V)` for one subject. Always consumes four standard normals
    /// in a fixed order so the layout of a substream never depends on the
    /// distributions chosen.
    pub fn draw_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Unit {
        let e_v1: f64 = rng.sample(StandardNormal);
        let e_v2: f64 = rng.sample(StandardNormal);
        let e_u1: f64 = rng.sample(StandardNormal);
        let e_u2: f64 = rng.sample(StandardNormal);
        let rho = self.u1_v_coupling;
        let score_u1 = rho * e_v1 + (1.0 - rho * rho).sqrt() * e_u1;
        let v1 = self.v_dists[0].from_score(e_v1);
        let v2 = self.v_dists.get(1).map_or(0.0, |d| d.from_score(e_v2));
        Unit {
            u1: self.u1_dist.from_score(score_u1),
            u2: self.u2_dist.from_score(e_u2),
            v: [v1, v2],
        }
    }

    /// `X(z) = g(z, V)`.
    pub fn x_of(&self, z: f64, unit: &Unit) -> f64 {
        self.g_family.apply(z, &unit.v)
    }

    /// `Y(x) = f(x, U)`.
    pub fn y_of(&self, x: f64, unit: &Unit) -> f64 {
        unit.u1 * self.h.value(x) + unit.u2
    }

    /// `Y'(x) = ∂f/∂x (x, U)`.
    pub fn y1_of(&self, x: f64, unit: &Unit) -> f64 {
        unit.u1 * self.h.d1(x)
    }

    pub fn potential_outcomes(&self, unit: Unit) -> PotentialOutcomeDraw<'_> {
        PotentialOutcomeDraw {
            scenario: self,
            unit,
        }
    }
}

/// The potential-outcome curve `x ↦ f(x, u)` of one subject.
#[derive(Debug, Clone, Copy)]
pub struct PotentialOutcomeDraw<'a> {
    scenario: &'a Scenario,
    pub unit: Unit,
}

impl PotentialOutcomeDraw<'_> {
    pub fn y_of(&self, x: f64) -> f64 {
        self.scenario.y_of(x, &self.unit)
    }

    pub fn y1_of(&self, x: f64) -> f64 {
        self.scenario.y1_of(x, &self.unit)
    }
}
