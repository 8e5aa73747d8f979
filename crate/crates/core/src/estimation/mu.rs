use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::SampleSet;
use crate::numerics::mean_stderr;

/// Conditional mean `μ(z) = E(Y | Z = z)` estimated by a group mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub z: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn estimate_mu(sample_set: &SampleSet, z: f64) -> Result<MuEstimate> {
    let group = sample_set.group(z)?;
    let (mean, stderr) = mean_stderr(&group.y);
    Ok(MuEstimate {
        z,
        mean,
        stderr,
        n: group.len(),
    })
}
