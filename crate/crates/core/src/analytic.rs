//! Closed-form optimal strategies and expected utilities.
//!
//! Positions are `phi_t = (beta z / sigma^2) * theta_t^T` with
//! `theta_t^T = 1 - (T - t) beta`. The adaptive investor evaluates them at
//! `z = X_{t-1}`, the static one at `z = X_0`. Utilities are strictly negative
//! and are carried as [`LogUtility`] because `gamma_beta(T)` grows like a
//! factorial.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::model::{check_horizon, ModelParams};
use crate::numeric::CompensatedSum;

/// An expected utility `-exp(log_magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogUtility {
    pub log_magnitude: f64,
}

impl LogUtility {
    pub fn from_log_magnitude(log_magnitude: f64) -> Self {
        Self { log_magnitude }
    }

    /// Wraps a strictly negative utility value.
    pub fn from_value(value: f64) -> Result<Self> {
        if !(value < 0.0) {
            return invalid(format!("utility must be negative, got {value}"));
        }
        Ok(Self {
            log_magnitude: (-value).ln(),
        })
    }

    /// Linear value; underflows to `-0.0` or overflows to `-inf` for extreme
    /// magnitudes.
    pub fn value(&self) -> f64 {
        -self.log_magnitude.exp()
    }

    /// Utility ordering: a smaller magnitude is the better (larger) utility.
    pub fn at_least(&self, other: &LogUtility) -> bool {
        self.log_magnitude <= other.log_magnitude
    }
}

fn check_period(t: usize, horizon: usize) -> Result<()> {
    check_horizon(horizon)?;
    if t == 0 || t > horizon {
        return invalid(format!("period {t} outside 1..={horizon}"));
    }
    Ok(())
}

#[inline]
pub(crate) fn theta_unchecked(t: usize, horizon: usize, beta: f64) -> f64 {
    1.0 - (horizon - t) as f64 * beta
}

/// Strategy coefficient `theta_t^T = 1 - (T - t) beta`.
pub fn theta(t: usize, horizon: usize, beta: f64) -> Result<f64> {
    check_period(t, horizon)?;
    Ok(theta_unchecked(t, horizon, beta))
}

/// Optimal position at period `t` given the state `z`.
///
/// Fed with `z = X_{t-1}` this is the strategy that uses the whole price
/// history.
pub fn adaptive_position(t: usize, horizon: usize, z: f64, params: &ModelParams) -> Result<f64> {
    check_period(t, horizon)?;
    Ok(position_unchecked(t, horizon, z, params))
}

#[inline]
pub(crate) fn position_unchecked(t: usize, horizon: usize, z: f64, params: &ModelParams) -> f64 {
    params.beta() * z / params.variance() * theta_unchecked(t, horizon, params.beta())
}

/// Optimal position at period `t` for an investor who only observes `X_0`.
pub fn static_position(t: usize, horizon: usize, x0: f64, params: &ModelParams) -> Result<f64> {
    adaptive_position(t, horizon, x0, params)
}

/// `ln gamma_beta(T) = sum_{i=0}^{T-1} ln(1 + beta^2 i)`.
///
/// Evaluated as a product so that `beta = 0` needs no special case.
pub fn log_gamma_beta(horizon: usize, beta: f64) -> Result<f64> {
    check_horizon(horizon)?;
    let b2 = beta * beta;
    let sum: CompensatedSum = (1..horizon).map(|i| (b2 * i as f64).ln_1p()).collect();
    Ok(sum.value())
}

/// Maximal expected utility given `X_0 = z` when the past is used.
pub fn cond_eu_adaptive(z: f64, horizon: usize, params: &ModelParams) -> Result<LogUtility> {
    let lg = log_gamma_beta(horizon, params.beta())?;
    Ok(LogUtility::from_log_magnitude(
        -0.5 * lg + static_exponent(z, horizon, params),
    ))
}

/// Maximal expected utility given `X_0 = z` when only `X_0` is used.
pub fn cond_eu_static(z: f64, horizon: usize, params: &ModelParams) -> Result<LogUtility> {
    check_horizon(horizon)?;
    Ok(LogUtility::from_log_magnitude(static_exponent(
        z, horizon, params,
    )))
}

fn static_exponent(z: f64, horizon: usize, params: &ModelParams) -> f64 {
    let b = params.beta();
    -(b * b * z * z * horizon as f64) / (2.0 * params.variance())
}

fn check_stable(beta: f64) -> Result<()> {
    if beta > -2.0 && beta < 0.0 {
        Ok(())
    } else {
        Err(Error::StabilityViolation { beta })
    }
}

/// `(1/2) ln((beta + 2) / (2 - (T - 1) beta))`, shared by both stationary
/// utilities.
fn stationary_log_factor(beta: f64, horizon: usize) -> f64 {
    0.5 * ((beta + 2.0).ln() - (2.0 - (horizon as f64 - 1.0) * beta).ln())
}

/// Unconditional maximal utility with past information, `X_0 ~ N(0, 1)` and
/// `sigma^2 = 1 - alpha^2`.
pub fn stationary_eu_adaptive(beta: f64, horizon: usize) -> Result<LogUtility> {
    check_stable(beta)?;
    let lg = log_gamma_beta(horizon, beta)?;
    Ok(LogUtility::from_log_magnitude(
        stationary_log_factor(beta, horizon) - 0.5 * lg,
    ))
}

/// Unconditional maximal utility without past information.
pub fn stationary_eu_static(beta: f64, horizon: usize) -> Result<LogUtility> {
    check_stable(beta)?;
    check_horizon(horizon)?;
    Ok(LogUtility::from_log_magnitude(stationary_log_factor(
        beta, horizon,
    )))
}

/// Logarithm of the Stirling-type asymptote `h_beta(T)` of `gamma_beta(T)`.
///
/// Writing `gamma_beta(T) = beta^{2T} Gamma(T + 1/beta^2) / Gamma(1/beta^2)`
/// and applying Stirling to the numerator gives
///
/// ```text
/// h = (beta^2)^{1 - 1/beta^2} sqrt(2 pi y) ((1 + (T-1) beta^2) / e)^y / Gamma(1/beta^2)
/// ```
///
/// with `y = T - 1 + 1/beta^2`. The `Gamma(1/beta^2)` term divides; with it
/// as a factor instead the ratio tends to `Gamma(1/beta^2)^{-2}`, not 1.
pub fn log_h_beta(horizon: usize, beta: f64) -> Result<f64> {
    check_horizon(horizon)?;
    if beta == 0.0 {
        return Ok(0.0);
    }
    let b2 = beta * beta;
    let inv = 1.0 / b2;
    let y = horizon as f64 - 1.0 + inv;
    Ok(-ln_gamma(inv)
        + (1.0 - inv) * b2.ln()
        + 0.5 * (2.0 * std::f64::consts::PI * y).ln()
        + y * ((b2 * (horizon as f64 - 1.0)).ln_1p() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(beta: f64, sigma: f64) -> ModelParams {
        ModelParams::from_beta(beta, sigma).unwrap()
    }

    #[test]
    fn theta_examples() {
        for horizon in 1..6 {
            assert_eq!(theta(horizon, horizon, 0.37).unwrap(), 1.0);
        }
        assert_eq!(theta(1, 3, -0.5).unwrap(), 2.0);
        assert_relative_eq!(theta(2, 5, 0.1).unwrap(), 0.7, max_relative = 1e-15);
        assert!(theta(0, 3, 0.1).is_err());
        assert!(theta(4, 3, 0.1).is_err());
        assert!(theta(1, 0, 0.1).is_err());
    }

    #[test]
    fn position_examples() {
        assert_eq!(adaptive_position(2, 4, 0.0, &params(-0.5, 1.0)).unwrap(), 0.0);
        assert_eq!(adaptive_position(1, 3, 2.0, &params(-0.5, 1.0)).unwrap(), -2.0);
        assert_eq!(adaptive_position(1, 1, 1.0, &params(1.0, 2.0)).unwrap(), 0.25);
        assert!(adaptive_position(5, 4, 1.0, &params(1.0, 2.0)).is_err());

        assert_eq!(static_position(3, 3, 1.0, &params(-0.5, 1.0)).unwrap(), -0.5);
        assert_eq!(static_position(1, 3, 1.0, &params(-0.5, 1.0)).unwrap(), -1.0);
        for t in 1..=4 {
            assert_eq!(static_position(t, 4, 0.0, &params(0.3, 1.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn log_gamma_examples() {
        for horizon in [1, 2, 10, 1000] {
            assert_eq!(log_gamma_beta(horizon, 0.0).unwrap(), 0.0);
            assert_eq!(log_gamma_beta(1, 0.7 * horizon as f64).unwrap(), 0.0);
        }
        assert_relative_eq!(log_gamma_beta(3, 1.0).unwrap(), 6f64.ln(), max_relative = 1e-15);
        assert!(log_gamma_beta(0, 1.0).is_err());
    }

    #[test]
    fn conditional_utility_examples() {
        for (z, horizon) in [(0.0, 1), (1.5, 4), (-3.0, 9)] {
            assert_eq!(
                cond_eu_adaptive(z, horizon, &params(0.0, 1.0)).unwrap().value(),
                -1.0
            );
            assert_eq!(
                cond_eu_static(z, horizon, &params(0.0, 1.0)).unwrap().value(),
                -1.0
            );
        }
        let v = cond_eu_adaptive(0.0, 3, &params(1.0, 1.0)).unwrap().value();
        assert_relative_eq!(v, -1.0 / 6f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(v, -0.4082483, epsilon = 1e-7);

        let a = cond_eu_adaptive(1.0, 1, &params(-0.5, 1.0)).unwrap();
        let s = cond_eu_static(1.0, 1, &params(-0.5, 1.0)).unwrap();
        assert_relative_eq!(a.value(), -(-0.125f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(a.value(), -0.8824969, epsilon = 1e-7);
        assert_eq!(a, s);

        let s = cond_eu_static(2.0, 4, &params(-0.5, 1.0)).unwrap().value();
        assert_relative_eq!(s, -(-2.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn stationary_examples() {
        let v = stationary_eu_adaptive(-0.5, 2).unwrap().value();
        assert_relative_eq!(v, -0.48f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(v, -0.6928203, epsilon = 1e-7);
        // T = 1: gamma = 1 and (T - 1) beta = 0, so both equal -sqrt(1.5 / 2)
        let a1 = stationary_eu_adaptive(-0.5, 1).unwrap().value();
        let s1 = stationary_eu_static(-0.5, 1).unwrap().value();
        assert_relative_eq!(a1, -0.75f64.sqrt(), max_relative = 1e-15);
        assert_eq!(a1, s1);
        let near_zero = stationary_eu_adaptive(-1e-12, 1).unwrap().value();
        assert_relative_eq!(near_zero, -1.0, epsilon = 1e-12);

        let s = stationary_eu_static(-0.5, 2).unwrap().value();
        assert_relative_eq!(s, -0.6f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(s, -0.7745967, epsilon = 1e-7);
        assert_relative_eq!(
            stationary_eu_static(-1.0, 3).unwrap().value(),
            -0.5,
            max_relative = 1e-15
        );

        for beta in [0.0, -2.0, 0.5, -2.5] {
            assert!(matches!(
                stationary_eu_adaptive(beta, 2),
                Err(Error::StabilityViolation { .. })
            ));
            assert!(stationary_eu_static(beta, 2).is_err());
        }
    }

    #[test]
    fn asymptote_examples() {
        for horizon in [1, 7, 1_000_000] {
            assert_eq!(log_h_beta(horizon, 0.0).unwrap(), 0.0);
        }
        let ratio = (log_gamma_beta(1000, 1.0).unwrap() - log_h_beta(1000, 1.0).unwrap()).exp();
        assert!((0.999..=1.001).contains(&ratio), "{ratio}");
        let ratio = (log_gamma_beta(1, 1.0).unwrap() - log_h_beta(1, 1.0).unwrap()).exp();
        let expected = std::f64::consts::E / (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(ratio, expected, max_relative = 1e-12);
        assert_relative_eq!(ratio, 1.0844, epsilon = 1e-4);
    }

    #[test]
    fn theta_shift_identity() {
        for horizon in 2..40 {
            for t in 2..=horizon {
                for &beta in &[-1.9, -0.5, 0.0, 0.3, 1.7] {
                    assert_eq!(
                        theta(t, horizon, beta).unwrap(),
                        theta(t - 1, horizon - 1, beta).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_continuous_at_zero() {
        let g = log_gamma_beta(100, 1e-6).unwrap().exp();
        assert!((g - 1.0).abs() < 1e-8);
    }

    #[test]
    fn product_matches_gamma_function_ratio() {
        for &beta in &[0.5f64, 1.0, 2.0] {
            let b2 = beta * beta;
            for horizon in 1..=20 {
                let oracle =
                    horizon as f64 * b2.ln() + ln_gamma(1.0 / b2 + horizon as f64) - ln_gamma(1.0 / b2);
                let got = log_gamma_beta(horizon, beta).unwrap();
                assert!((got - oracle).abs() < 1e-9, "beta={beta} T={horizon}");
            }
        }
    }

    #[test]
    fn stationary_utilities_improve_with_memory() {
        for horizon in [2usize, 5, 10] {
            let grid: Vec<f64> = (1..=19).map(|k| -0.1 * k as f64).collect();
            for w in grid.windows(2) {
                // w[1] has the larger |beta|
                for f in [stationary_eu_adaptive, stationary_eu_static] {
                    let smaller = f(w[0], horizon).unwrap();
                    let larger = f(w[1], horizon).unwrap();
                    assert!(larger.value() > smaller.value(), "T={horizon} beta={}", w[1]);
                }
            }
        }
    }

    #[test]
    fn asymptote_at_large_horizons() {
        for &beta in &[0.5, 1.0, 2.0] {
            let r = log_gamma_beta(10_000, beta).unwrap() - log_h_beta(10_000, beta).unwrap();
            assert!((r.exp() - 1.0).abs() < 1e-3, "beta={beta}");
        }
        // the relative error decays like 1/T and stays finite far out
        for &beta in &[0.5, 1.0, 2.0] {
            let r = log_gamma_beta(1_000_000, beta).unwrap() - log_h_beta(1_000_000, beta).unwrap();
            assert!(r.is_finite() && r.abs() < 1e-5, "beta={beta}");
        }
    }

    proptest! {
        #[test]
        fn theta_power_sum_identity(
            horizon in 1usize..=30,
            m_frac in 0.0f64..1.0,
            n_frac in 0.0f64..1.0,
            alpha in -2.0f64..2.0,
        ) {
            let m = 1 + (m_frac * horizon as f64) as usize % horizon;
            let n = m + (n_frac * (horizon - m + 1) as f64) as usize % (horizon - m + 1);
            let beta = alpha - 1.0;
            let mut lhs = CompensatedSum::default();
            let mut scale = 0.0;
            for i in m..=n {
                let term = theta(i, horizon, beta).unwrap() * alpha.powi(i as i32);
                lhs.add(term);
                scale += term.abs();
            }
            let rhs = (horizon + 1 - m) as f64 * alpha.powi(m as i32)
                - (horizon - n) as f64 * alpha.powi(n as i32 + 1);
            prop_assert!((lhs.value() - rhs).abs() <= 1e-9 * scale.max(rhs.abs()).max(1e-300));
        }

        #[test]
        fn adaptive_dominates_static(
            beta in -2.5f64..2.5,
            sigma in 0.2f64..3.0,
            z in -4.0f64..4.0,
            horizon in 1usize..200,
        ) {
            let p = params(beta, sigma);
            let a = cond_eu_adaptive(z, horizon, &p).unwrap();
            let s = cond_eu_static(z, horizon, &p).unwrap();
            prop_assert!(a.at_least(&s));
            if horizon >= 2 && p.beta() != 0.0 {
                prop_assert!(a.log_magnitude < s.log_magnitude);
            }
        }
    }
}
