//! Structural scenarios, simulation, and ground truth for the causal effect.

mod oracle;
mod sample;
mod scenario;
mod smooth;

pub use oracle::{
    check_condition5, oracle_theta_mc, true_theta, Condition5Estimate, Degeneracy, DEFAULT_FD_STEP,
};
pub use sample::{draw_sample_set, LevelGroup, SampleMeta, SampleSet};
pub use scenario::{DistSpec, GFamily, PotentialOutcomeDraw, Scenario, Unit};
pub use smooth::{Shape, SmoothFunctionSpec, Spline, SplineTable};
