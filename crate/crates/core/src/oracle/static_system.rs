//! First-order conditions of the problem restricted to `X_0`-measurable
//! positions.
//!
//! With deterministic positions `eta` the wealth is `c(eta) + b(eta)^T eps`
//! where `c(eta) = beta X_0 sum_j eta_j alpha^{j-1}` and `b = J eta` for the
//! upper-triangular `J` with `J_kk = sigma` and
//! `J_lk = sigma beta alpha^{k-l-1}` for `l < k`. The expected utility is
//! `-exp(g(eta))`, `g = -c + |b|^2 / 2`, and `grad g = 0` is the linear system
//! `J^T J eta = beta X_0 (alpha^{k-1})_k`.

use nalgebra::{DMatrix, DVector};

use crate::analytic::LogUtility;
use crate::error::{invalid, Error, Result};
use crate::model::{check_horizon, ModelParams};
use crate::numeric::{power_table, CompensatedSum};

/// Jacobian of `b` with respect to `eta`.
pub fn static_jacobian(horizon: usize, params: &ModelParams) -> Result<DMatrix<f64>> {
    check_horizon(horizon)?;
    let (beta, sigma) = (params.beta(), params.sigma());
    let pow = power_table(params.alpha(), horizon);
    Ok(DMatrix::from_fn(horizon, horizon, |l, k| match l.cmp(&k) {
        std::cmp::Ordering::Equal => sigma,
        std::cmp::Ordering::Less => sigma * beta * pow[k - l - 1],
        std::cmp::Ordering::Greater => 0.0,
    }))
}

fn rhs(x0: f64, horizon: usize, params: &ModelParams) -> DVector<f64> {
    let pow = power_table(params.alpha(), horizon);
    DVector::from_fn(horizon, |k, _| params.beta() * x0 * pow[k])
}

/// Solves `grad g(eta) = 0`.
///
/// The normal matrix `J^T J` is never formed: its condition number is the
/// square of `J`'s, which for `alpha > 1` costs several digits.
pub fn solve_static_system(x0: f64, horizon: usize, params: &ModelParams) -> Result<Vec<f64>> {
    if !x0.is_finite() {
        return invalid("initial price must be finite");
    }
    let j = static_jacobian(horizon, params)?;
    let r = rhs(x0, horizon, params);
    let y = j
        .tr_solve_upper_triangular(&r)
        .ok_or_else(|| Error::DegenerateSystem("J^T y = r is singular".into()))?;
    let eta = j
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::DegenerateSystem("J eta = y is singular".into()))?;
    if eta.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSystem("solution is not finite".into()));
    }
    Ok(eta.as_slice().to_vec())
}

/// Largest residual of the first-order conditions written out term by term,
///
/// ```text
/// beta sum_{l<k} eta_l alpha^{k-l-1}
///   + beta^2 sum_{l<k} sum_{j>l} eta_j alpha^{j+k-2l-2}
///   + eta_k + beta sum_{j>k} eta_j alpha^{j-k-1} = X_0 beta alpha^{k-1} / sigma^2,
/// ```
///
/// each divided by `max(1, sum of |terms|)`.
pub fn static_residual(eta: &[f64], x0: f64, params: &ModelParams) -> Result<f64> {
    let horizon = eta.len();
    check_horizon(horizon)?;
    let beta = params.beta();
    let pow = power_table(params.alpha(), 2 * horizon);
    let mut worst: f64 = 0.0;
    for k in 1..=horizon {
        let mut sum = CompensatedSum::default();
        let mut scale = 0.0;
        let mut add = |v: f64| {
            sum.add(v);
            scale += v.abs();
        };
        for l in 1..k {
            add(beta * eta[l - 1] * pow[k - l - 1]);
            for j in l + 1..=horizon {
                add(beta * beta * eta[j - 1] * pow[j + k - 2 * l - 2]);
            }
        }
        add(eta[k - 1]);
        for j in k + 1..=horizon {
            add(beta * eta[j - 1] * pow[j - k - 1]);
        }
        add(-x0 * beta * pow[k - 1] / params.variance());
        worst = worst.max((sum.value()).abs() / scale.max(1.0));
    }
    Ok(worst)
}

/// `-exp(g(eta_hat))` at the solved static optimum.
///
/// Fails if the optimal loadings `b_hat = J eta_hat` are not all equal to
/// `beta X_0 / sigma`.
pub fn static_utility_check(x0: f64, horizon: usize, params: &ModelParams) -> Result<LogUtility> {
    let eta = solve_static_system(x0, horizon, params)?;
    let j = static_jacobian(horizon, params)?;
    let eta_v = DVector::from_column_slice(&eta);
    let b_hat = &j * &eta_v;
    let target = params.beta() * x0 / params.sigma();
    let tol = 1e-10 * target.abs().max(1.0);
    if let Some((k, v)) = b_hat.iter().enumerate().find(|(_, v)| (*v - target).abs() > tol) {
        return Err(Error::VerificationFailed(format!(
            "b_hat[{}] = {v}, expected {target}",
            k + 1
        )));
    }
    let pow = power_table(params.alpha(), horizon);
    let c: CompensatedSum = eta.iter().zip(&pow).map(|(e, p)| e * p).collect();
    let g = -params.beta() * x0 * c.value() + 0.5 * b_hat.norm_squared();
    Ok(LogUtility::from_log_magnitude(g))
}
