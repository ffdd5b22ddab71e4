//! Terminal wealth as a Gaussian quadratic form.
//!
//! Trading an arbitrary `phi` in the first period and the adaptive optimum
//! afterwards gives a terminal wealth
//!
//! ```text
//! Q_T(phi, x0, eps) = eps^T (A_T - I/2) eps + b(phi, x0)^T eps + c(phi, x0)
//! ```
//!
//! with a symmetric positive definite `A_T` that depends only on the model.
//! This module builds `A_T`, `b` and `c`, evaluates `E[exp(-Q_T)]` in closed
//! form, and exposes the algebraic identities satisfied by `A_T` as residual
//! checks.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::analytic::{log_gamma_beta, position_unchecked, theta_unchecked, LogUtility};
use crate::error::{invalid, Error, Result};
use crate::model::{check_horizon, evolve_path, ModelParams};
use crate::numeric::{power_table, CompensatedSum};

/// `D_i = sum_{j=i}^{T-1} theta_{j+1} alpha^{2(j-i)}` for `i = 1..=T`
/// (index 0 unused, `D_T = 0`).
fn tail_sums(horizon: usize, params: &ModelParams) -> Vec<f64> {
    let a2 = params.alpha() * params.alpha();
    let mut d = vec![0.0; horizon + 1];
    for i in (1..horizon).rev() {
        d[i] = theta_unchecked(i + 1, horizon, params.beta()) + a2 * d[i + 1];
    }
    d
}

/// The matrix `A_T`.
///
/// The lower triangle is filled from the entry formulas and mirrored, so the
/// result is exactly symmetric and `a_TT = 1/2`.
pub fn build_a(horizon: usize, params: &ModelParams) -> Result<DMatrix<f64>> {
    check_horizon(horizon)?;
    let t_max = horizon;
    let beta = params.beta();
    let b2 = beta * beta;
    let pow = power_table(params.alpha(), t_max);
    let d = tail_sums(t_max, params);

    let mut a = DMatrix::zeros(t_max, t_max);
    for i in 1..=t_max {
        for k in 1..=i {
            let v = if i == t_max {
                if k == t_max {
                    0.5
                } else {
                    0.5 * beta * pow[t_max - k - 1]
                }
            } else if k == i {
                0.5 + b2 * d[i]
            } else {
                // sum_j theta_{j+1} alpha^{2j-i-k} = alpha^{i-k} D_i
                0.5 * beta * theta_unchecked(i, t_max, beta) * pow[i - k - 1] + b2 * pow[i - k] * d[i]
            };
            a[(i - 1, k - 1)] = v;
            a[(k - 1, i - 1)] = v;
        }
    }
    Ok(a)
}

/// The linear coefficient vector `b(phi, x0)`.
///
/// For `T = 1` the only entry is `phi * sigma`.
pub fn build_b(phi: f64, x0: f64, horizon: usize, params: &ModelParams) -> Result<DVector<f64>> {
    check_horizon(horizon)?;
    let t_max = horizon;
    let (beta, sigma) = (params.beta(), params.sigma());
    let pow = power_table(params.alpha(), 2 * t_max);
    let lin = beta * x0 / sigma;
    let quad = 2.0 * beta * beta * x0 / sigma;

    let mut b = DVector::zeros(t_max);
    for i in 1..=t_max {
        let tail: CompensatedSum = (i..t_max)
            .map(|j| theta_unchecked(j + 1, t_max, beta) * pow[2 * j - i])
            .collect();
        let mut v = quad * tail.value();
        if i == 1 {
            v += phi * sigma;
        } else {
            v += lin * theta_unchecked(i, t_max, beta) * pow[i - 1];
        }
        b[i - 1] = v;
    }
    Ok(b)
}

/// `b` rebuilt from the first column of `A_T`:
/// `(sigma phi - alpha z / sigma) e_1 + (2 alpha z / sigma) A_T(:, 1)`.
pub fn build_b_from_first_column(phi: f64, z: f64, a: &DMatrix<f64>, params: &ModelParams) -> DVector<f64> {
    let (alpha, sigma) = (params.alpha(), params.sigma());
    let mut b = a.column(0).into_owned() * (2.0 * alpha * z / sigma);
    b[0] += sigma * phi - alpha * z / sigma;
    b
}

/// The constant term `c(phi, x0)`.
pub fn build_c(phi: f64, x0: f64, horizon: usize, params: &ModelParams) -> Result<f64> {
    check_horizon(horizon)?;
    let beta = params.beta();
    let pow = power_table(params.alpha(), 2 * horizon);
    let tail: CompensatedSum = (2..=horizon)
        .map(|j| theta_unchecked(j, horizon, beta) * pow[2 * j - 2])
        .collect();
    Ok(phi * beta * x0 + beta * beta * x0 * x0 / params.variance() * tail.value())
}

/// `(A_T, b, c)` for one choice of first-period position and initial price.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticDecomposition {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
    pub horizon: usize,
    pub params: ModelParams,
}

impl QuadraticDecomposition {
    pub fn new(phi: f64, x0: f64, horizon: usize, params: &ModelParams) -> Result<Self> {
        Ok(Self {
            a: build_a(horizon, params)?,
            b: build_b(phi, x0, horizon, params)?,
            c: build_c(phi, x0, horizon, params)?,
            horizon,
            params: *params,
        })
    }

    /// `eps^T (A - I/2) eps + b^T eps + c`.
    pub fn evaluate(&self, innovations: &[f64]) -> Result<f64> {
        if innovations.len() != self.horizon {
            return invalid(format!(
                "expected {} innovations, got {}",
                self.horizon,
                innovations.len()
            ));
        }
        let eps = DVector::from_column_slice(innovations);
        let quad = eps.dot(&(&self.a * &eps)) - 0.5 * eps.norm_squared();
        Ok(quad + self.b.dot(&eps) + self.c)
    }
}

/// Terminal wealth from simulating the path: position `phi` in period one,
/// the adaptive optimum `phi_j^T(X_{j-1})` afterwards.
pub fn eval_q_direct(
    phi: f64,
    x0: f64,
    innovations: &[f64],
    horizon: usize,
    params: &ModelParams,
) -> Result<f64> {
    check_horizon(horizon)?;
    if innovations.len() != horizon {
        return invalid(format!(
            "expected {horizon} innovations, got {}",
            innovations.len()
        ));
    }
    let path = evolve_path(params, x0, innovations)?;
    let x = path.prices();
    let mut wealth = phi * (x[1] - x[0]);
    for j in 2..=horizon {
        wealth += position_unchecked(j, horizon, x[j - 1], params) * (x[j] - x[j - 1]);
    }
    Ok(wealth)
}

fn factor(a: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if !a.is_square() {
        return invalid("matrix is not square");
    }
    let scale = a.amax().max(1.0);
    for i in 0..a.nrows() {
        for k in 0..i {
            if (a[(i, k)] - a[(k, i)]).abs() > 1e-12 * scale {
                return invalid(format!("matrix is not symmetric at ({i}, {k})"));
            }
        }
    }
    Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite)
}

fn log_det_from_factor(chol: &Cholesky<f64, Dyn>) -> f64 {
    chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum()
}

/// Log of `(2 pi)^{-n/2} int exp(-x^T A x - b^T x) dx`, which equals
/// `-(1/2) ln(2^n det A) + b^T A^{-1} b / 4`.
pub fn gaussian_integral(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<f64> {
    if a.nrows() != b.len() {
        return invalid("matrix and vector dimensions differ");
    }
    let chol = factor(a)?;
    let n = a.nrows() as f64;
    let quad = b.dot(&chol.solve(b));
    Ok(-0.5 * (n * std::f64::consts::LN_2 + log_det_from_factor(&chol)) + 0.25 * quad)
}

/// `f(phi, z) = b^T A^{-1} b / 4 - c`, the part of the log expected utility
/// that depends on the first-period position.
pub fn first_step_exponent(phi: f64, z: f64, horizon: usize, params: &ModelParams) -> Result<f64> {
    let q = QuadraticDecomposition::new(phi, z, horizon, params)?;
    let chol = factor(&q.a)?;
    Ok(0.25 * q.b.dot(&chol.solve(&q.b)) - q.c)
}

/// `-E[exp(-Q_T(phi, X_0, eps)) | X_0 = z]`, the expected utility of trading
/// `phi` now and optimally afterwards.
pub fn expected_utility_first_step(
    phi: f64,
    z: f64,
    horizon: usize,
    params: &ModelParams,
) -> Result<LogUtility> {
    let q = QuadraticDecomposition::new(phi, z, horizon, params)?;
    let log_integral = gaussian_integral(&q.a, &q.b)?;
    Ok(LogUtility::from_log_magnitude(log_integral - q.c))
}

/// Root of `d f / d phi`, found numerically.
///
/// `b` depends on `phi` only through `b_1 = phi sigma + ...` and `c` is
/// linear in `phi`, so the derivative
/// `sigma (A^{-1} b)_1 / 2 - beta z` is affine in `phi`; two evaluations pin
/// it down.
pub fn optimal_first_position(z: f64, horizon: usize, params: &ModelParams) -> Result<f64> {
    let a = build_a(horizon, params)?;
    let chol = factor(&a)?;
    let sigma = params.sigma();
    let derivative = |phi: f64| -> Result<f64> {
        let b = build_b(phi, z, horizon, params)?;
        Ok(0.5 * sigma * chol.solve(&b)[0] - params.beta() * z)
    };
    let d0 = derivative(0.0)?;
    let d1 = derivative(1.0)?;
    let slope = d1 - d0;
    if !(slope > 0.0) {
        return Err(Error::DegenerateSystem(format!(
            "first-step exponent is not strictly convex (slope {slope})"
        )));
    }
    Ok(-d0 / slope)
}

/// Residual of `a_{1n} - beta sum_{i>=2} a_{in} = 0` for a given matrix,
/// maximised over columns `n >= 2`.
///
/// Each residual is divided by `max(1, |a_{1n}| + |beta| sum |a_{in}|)`: the
/// identity cancels terms that grow like `alpha^{2T}` when `|alpha| > 1`, and
/// only their relative cancellation is meaningful in floating point.
pub fn sum_of_rows_residual(a: &DMatrix<f64>, beta: f64) -> f64 {
    let t_max = a.nrows();
    (1..t_max)
        .map(|n| {
            let col = a.column(n);
            let tail: CompensatedSum = col.iter().skip(1).copied().collect();
            let scale: f64 = col[0].abs() + beta.abs() * col.iter().skip(1).map(|v| v.abs()).sum::<f64>();
            (col[0] - beta * tail.value()).abs() / scale.max(1.0)
        })
        .fold(0.0, f64::max)
}

pub fn check_sum_of_rows(horizon: usize, params: &ModelParams) -> Result<f64> {
    if horizon < 2 {
        return invalid("sum-of-rows identity needs T >= 2");
    }
    Ok(sum_of_rows_residual(&build_a(horizon, params)?, params.beta()))
}

/// Largest entry difference between `A_T` with its first row and column
/// removed and `A_{T-1}`.
pub fn check_minor_identity(horizon: usize, params: &ModelParams) -> Result<f64> {
    if horizon < 2 {
        return invalid("minor identity needs T >= 2");
    }
    let full = build_a(horizon, params)?;
    let minor = full.remove_row(0).remove_column(0);
    let smaller = build_a(horizon - 1, params)?;
    Ok((minor - smaller).amax())
}

/// Closed-form `ln det A_T = -T ln 2 + ln gamma_beta(T)`.
pub fn log_det_a(horizon: usize, params: &ModelParams) -> Result<f64> {
    Ok(-(horizon as f64) * std::f64::consts::LN_2 + log_gamma_beta(horizon, params.beta())?)
}

/// `ln det` from the Cholesky factor of an arbitrary symmetric matrix.
pub fn cholesky_log_det(a: &DMatrix<f64>) -> Result<f64> {
    Ok(log_det_from_factor(&factor(a)?))
}

/// `ln det A_T` by the row reduction `det A_k = pivot_k det A_{k-1}`, where
/// `pivot_k = a_11 - beta sum_{i>=2} a_{i1}` is read off the entries of the
/// numerically built `A_k`.
pub fn log_det_recursive(horizon: usize, params: &ModelParams) -> Result<f64> {
    check_horizon(horizon)?;
    let beta = params.beta();
    let mut total = CompensatedSum::default();
    for k in 1..=horizon {
        let a = build_a(k, params)?;
        let col = a.column(0);
        let rest: CompensatedSum = col.iter().skip(1).copied().collect();
        let pivot = col[0] - beta * rest.value();
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        total.add(pivot.ln());
    }
    Ok(total.value())
}

/// Closed-form `(A_T^{-1})_{11} = 2 / (1 + beta^2 (T - 1))`.
pub fn inverse_corner(horizon: usize, beta: f64) -> Result<f64> {
    check_horizon(horizon)?;
    Ok(2.0 / (1.0 + beta * beta * (horizon as f64 - 1.0)))
}

/// `(A^{-1})_{11}` by Cholesky solve against `e_1`.
pub fn numeric_inverse_corner(a: &DMatrix<f64>) -> Result<f64> {
    let chol = factor(a)?;
    let mut e1 = DVector::zeros(a.nrows());
    e1[0] = 1.0;
    Ok(chol.solve(&e1)[0])
}
