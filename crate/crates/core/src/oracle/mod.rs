//! Brute-force verifiers that do not rely on the closed forms: a dynamic
//! program for the adaptive problem and a linear solve for the static one.

mod dp;
pub mod hermite;
pub mod interp;
pub mod minimize;
mod static_system;

pub use dp::{dp_conditional_utility, dp_solve, DpConfig, DpSolution};
pub use static_system::{solve_static_system, static_jacobian, static_residual, static_utility_check};
