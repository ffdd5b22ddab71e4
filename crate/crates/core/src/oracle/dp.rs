//! Backward induction for the adaptive problem on a state grid.
//!
//! With `W_T = 1` and
//!
//! ```text
//! W_{t-1}(x) = min_phi E[exp(-phi (beta x + sigma eps)) W_t(alpha x + sigma eps)]
//! ```
//!
//! the optimal expected utility from state `x` at time `t` is `-W_t(x)`.
//! `ln W_t` is tabulated on a uniform grid and interpolated with local
//! cubics. Each one-step expectation is a Gauss-Hermite sum recentred at the
//! mode of its integrand, and each minimisation is a Brent search on a
//! bracket around the closed-form position. The closed form only seeds the
//! bracket; the objective is strictly convex in `phi`, so the search
//! converges to the same minimiser from any bracket that contains it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hermite::GaussHermite;
use super::interp::UniformCubic;
use super::minimize::brent;
use crate::analytic::{position_unchecked, LogUtility};
use crate::error::{invalid, Error, Result};
use crate::model::{check_horizon, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpConfig {
    /// Odd, at least 65; the grid is symmetric and contains 0.
    pub grid_points: usize,
    /// Grid halfwidth in units of the price scale (stationary standard
    /// deviation, or `sigma sqrt(T)` when `|alpha| >= 1`).
    pub grid_halfwidth_sigmas: f64,
    /// Largest `|z|` that will be queried; widens the grid to cover it.
    pub state_margin: f64,
    pub quadrature_nodes: usize,
    pub minimizer_tolerance: f64,
}

impl Default for DpConfig {
    fn default() -> Self {
        Self {
            grid_points: 257,
            grid_halfwidth_sigmas: 5.0,
            state_margin: 2.0,
            quadrature_nodes: 64,
            minimizer_tolerance: 1e-10,
        }
    }
}

impl DpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 65 || self.grid_points.is_multiple_of(2) {
            return invalid(format!(
                "grid_points must be odd and >= 65, got {}",
                self.grid_points
            ));
        }
        if self.quadrature_nodes < 16 {
            return invalid(format!(
                "quadrature_nodes must be >= 16, got {}",
                self.quadrature_nodes
            ));
        }
        if !(self.minimizer_tolerance > 0.0) {
            return invalid("minimizer_tolerance must be positive");
        }
        if !(self.grid_halfwidth_sigmas > 0.0 && self.grid_halfwidth_sigmas.is_finite()) {
            return invalid("grid_halfwidth_sigmas must be positive");
        }
        if !(self.state_margin >= 0.0 && self.state_margin.is_finite()) {
            return invalid("state_margin must be non-negative");
        }
        Ok(())
    }

    /// `max(k * scale, margin + k * sigma sqrt(T))`.
    pub fn halfwidth(&self, horizon: usize, params: &ModelParams) -> f64 {
        let diffusive = params.sigma() * (horizon as f64).sqrt();
        let scale = if params.is_stable() {
            params.sigma() / (1.0 - params.alpha() * params.alpha()).sqrt()
        } else {
            diffusive
        };
        (self.grid_halfwidth_sigmas * scale).max(self.state_margin + self.grid_halfwidth_sigmas * diffusive)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    horizon: usize,
    params: ModelParams,
    config: DpConfig,
    grid: Vec<f64>,
    /// `positions[t - 1][i]`: optimal `phi_t` when `X_{t-1} = grid[i]`.
    positions: Vec<Vec<f64>>,
    /// `log_values[t]`: `ln W_t` on the grid, `t = 0..=T`.
    log_values: Vec<UniformCubic>,
    fitted_coefficients: Vec<f64>,
    rule: GaussHermite,
}

impl DpSolution {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &DpConfig {
        &self.config
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Optimal positions for period `t` (1-based) over the grid.
    pub fn positions(&self, t: usize) -> &[f64] {
        &self.positions[t - 1]
    }

    /// `ln W_t` over the grid, `t = 0..=T`.
    pub fn log_values(&self, t: usize) -> &[f64] {
        self.log_values[t].values()
    }

    /// `W_t` over the grid.
    pub fn values(&self, t: usize) -> Vec<f64> {
        self.log_values(t).iter().map(|v| v.exp()).collect()
    }

    /// Least-squares slope of position against state, per period.
    pub fn fitted_coefficients(&self) -> &[f64] {
        &self.fitted_coefficients
    }

    /// `ln E[exp(-phi (X_t - X_{t-1})) W_t(X_t) | X_{t-1} = x]`.
    pub fn step_objective(&self, t: usize, x: f64, phi: f64) -> f64 {
        step_log_expectation(&self.params, &self.rule, &self.log_values[t], x, phi)
    }
}

/// `ln E[exp(psi)]` over `eps ~ N(0, 1)` for
/// `psi(eps) = -phi (beta x + sigma eps) + L(alpha x + sigma eps)`.
///
/// The Gauss-Hermite rule is applied after centring at the mode of
/// `-eps^2 / 2 + psi(eps)` and scaling by its curvature, so that integrands
/// far from the origin are integrated as accurately as central ones.
fn step_log_expectation(
    params: &ModelParams,
    rule: &GaussHermite,
    next_log_value: &UniformCubic,
    x: f64,
    phi: f64,
) -> f64 {
    let (alpha, beta, sigma) = (params.alpha(), params.beta(), params.sigma());
    let exponent = |eps: f64| {
        let (l, dl, ddl) = next_log_value.eval(alpha * x + sigma * eps);
        let value = -0.5 * eps * eps - phi * (beta * x + sigma * eps) + l;
        let slope = -eps - phi * sigma + sigma * dl;
        let curvature = -1.0 + sigma * sigma * ddl;
        (value, slope, curvature)
    };

    let mut mode = 0.0;
    let mut spread = 1.0;
    for _ in 0..20 {
        let (_, slope, curvature) = exponent(mode);
        let k = -curvature;
        if !(k > 1e-3) || !k.is_finite() {
            break;
        }
        spread = 1.0 / k.sqrt();
        let step = slope / k;
        mode += step;
        if step.abs() <= 1e-12 * (1.0 + mode.abs()) {
            break;
        }
    }
    if !mode.is_finite() {
        mode = 0.0;
        spread = 1.0;
    }

    // (1/sqrt(2 pi)) int e^{h(eps)} d eps with eps = mode + sqrt(2) spread v
    let scale = std::f64::consts::SQRT_2 * spread;
    let terms: Vec<f64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&v, &w)| w.ln() + v * v + exponent(mode + scale * v).0)
        .collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    peak + sum.ln() + spread.ln() - 0.5 * std::f64::consts::PI.ln()
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    sxy / sxx
}

/// Solves the `T`-period problem by backward induction.
pub fn dp_solve(horizon: usize, params: &ModelParams, config: &DpConfig) -> Result<DpSolution> {
    check_horizon(horizon)?;
    config.validate()?;
    let rule = GaussHermite::new(config.quadrature_nodes)?;

    let halfwidth = config.halfwidth(horizon, params);
    let n = config.grid_points;
    let step = 2.0 * halfwidth / (n - 1) as f64;
    let half = (n / 2) as isize;
    let grid: Vec<f64> = (0..n as isize).map(|i| (i - half) as f64 * step).collect();

    let mut log_values = vec![UniformCubic::new(-halfwidth, step, vec![0.0; n]); horizon + 1];
    let mut positions = vec![Vec::new(); horizon];

    for t in (1..=horizon).rev() {
        let next = &log_values[t];
        let solved: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&x| {
                let guess = position_unchecked(t, horizon, x, params);
                let width = (2.0 * guess.abs()).max(1.0);
                let m = brent(
                    |phi| step_log_expectation(params, &rule, next, x, phi),
                    guess - width,
                    guess + width,
                    config.minimizer_tolerance,
                );
                (m.x, m.value)
            })
            .collect();
        if let Some(bad) = solved.iter().position(|(p, v)| !p.is_finite() || !v.is_finite()) {
            return Err(Error::NumericOverflow(format!(
                "non-finite value at t = {t}, x = {}; reduce the grid halfwidth or |beta|",
                grid[bad]
            )));
        }
        let (pos, vals): (Vec<f64>, Vec<f64>) = solved.into_iter().unzip();
        positions[t - 1] = pos;
        log_values[t - 1] = UniformCubic::new(-halfwidth, step, vals);
    }

    let fitted_coefficients = positions.iter().map(|p| least_squares_slope(&grid, p)).collect();
    Ok(DpSolution {
        horizon,
        params: *params,
        config: *config,
        grid,
        positions,
        log_values,
        fitted_coefficients,
        rule,
    })
}

/// `-W_0(z)`, the optimal expected utility from `X_0 = z`.
pub fn dp_conditional_utility(solution: &DpSolution, z: f64) -> Result<LogUtility> {
    let w0 = &solution.log_values[0];
    if !(z >= w0.lower() && z <= w0.upper()) {
        return Err(Error::OutOfRange {
            value: z,
            lower: w0.lower(),
            upper: w0.upper(),
        });
    }
    Ok(LogUtility::from_log_magnitude(w0.value(z)))
}
