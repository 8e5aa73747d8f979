//! Nonparametric identification of the average causal derivative
//! `θ(x) = E ∂f/∂x (x, U)` in the instrumental-variable model
//! `Y = f(X, U)`, `X = g(Z, V)`.
//!
//! With `K(z, x) = P(X <= x | Z = z0) - P(X <= x | Z = z)` and
//! `μ(z) = E(Y | Z = z)`, the effect solves the first-kind integral equation
//!
//! ```text
//! ∫ K(z, x) θ(x) dx = μ(z) - μ(z0)
//! ```
//!
//! The crate estimates both sides from data ([`estimation`]), discretizes and
//! solves the equation with Tikhonov regularization ([`solver`]), and checks
//! the assumptions and convergence rates behind it ([`diagnostics`]) against
//! simulated ground truth ([`model`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
