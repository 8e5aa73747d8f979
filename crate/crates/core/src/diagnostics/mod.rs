//! Empirical probes of the identification conditions, rate experiments and
//! accuracy metrics.

mod conditions;
mod metrics;
mod rates;
mod report;

pub use conditions::{
    completeness_spectrum, condition5_grid, density_sup_estimate, ATOM_SHARE, DENSITY_BINS,
    DENSITY_STABILITY, RANK_TOL, ZERO_DESIGN_TOL,
};
pub use metrics::{
    antiderivative_identity, central_range, error_metrics, forward_consistency, CONSISTENCY_TOL,
};
pub use rates::{rate_check_phi, rate_check_sigma, EXACT_TOL, PHI_SLOPE_FLOOR, SIGMA_SLOPE_BAND};
pub use report::{write_summary_csv, ConditionReport, ConsistencyCheck, RateCheck};
