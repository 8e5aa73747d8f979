//! Discretization of the integral equation and its regularized solution.

mod grid;
mod pipeline;
mod system;
mod tikhonov;

pub use grid::{make_grid, QuadratureGrid};
pub use pipeline::{recover, solve_system, GridSpec, LambdaRule, Recovery, Solved};
pub use system::{antiderivative, assemble_system, forward_apply, interpolate};
pub use tikhonov::{
    select_lambda, solve_tikhonov, LambdaChoice, LambdaMethod, Penalty, RegularizedSolution,
    TikhonovProblem, LADDER_FLOOR, LADDER_LEN, TRUNCATION_TOL,
};
