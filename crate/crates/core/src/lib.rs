//! Optimal exponential-utility trading when the price follows a Gaussian
//! AR(1) process.
//!
//! * [`model`]: the price recursion and path simulation.
//! * [`analytic`]: closed-form strategies, conditional and stationary
//!   expected utilities, and the large-horizon asymptote.
//! * [`quadratic`]: terminal wealth as a Gaussian quadratic form, the
//!   multivariate Gaussian integral and the matrix identities behind it.
//! * [`montecarlo`]: reproducible parallel estimation of expected utility.
//! * [`oracle`]: dynamic-programming and linear-system verifiers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
mod error;
pub mod model;
pub mod montecarlo;
mod numeric;
pub mod oracle;
pub mod quadratic;

pub use analytic::LogUtility;
pub use error::{Error, Result};
pub use model::{evolve_path, stationary_sigma, Horizon, ModelParams, PathBundle};
pub use montecarlo::{estimate_utility, InitialLaw, StrategySpec, UtilityEstimate};
pub use nalgebra::{DMatrix, DVector};
pub use oracle::{DpConfig, DpSolution};
pub use quadratic::QuadraticDecomposition;
