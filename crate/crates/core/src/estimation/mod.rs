//! Empirical ingredients of the integral equation: conditional CDFs, the
//! kernel, conditional means and the Gaussian-smoothed mean.

mod ecdf;
mod kernel;
mod mu;
mod smoothed;

pub use ecdf::{empirical_cdf, EmpiricalCdf};
pub use kernel::{
    build_kernel, build_rhs, kernel_row, KernelMatrix, MatrixMeta, Provenance, RhsVector,
};
pub use mu::{estimate_mu, MuEstimate};
pub use smoothed::{direct_mu, smoothed_mu, smoothing_gap, MeanEstimate};
