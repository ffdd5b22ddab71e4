//! Monte Carlo estimation of `E[-exp(-L_T)]`.
//!
//! Path `i` draws its randomness from a ChaCha8 stream keyed by `(seed, i)`,
//! so estimates are bit-identical for any rayon thread count. Chunks of
//! paths are reduced in parallel and merged in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::position_unchecked;
use crate::error::{invalid, Error, Result};
use crate::model::{check_horizon, evolve_path, stationary_sigma, ModelParams, PathBundle};

const CHUNK: usize = 4096;

/// Position rule applied at each period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StrategySpec {
    /// `phi_t = (beta / sigma^2) theta_t^T X_{t-1}`.
    AdaptiveOptimal,
    /// `phi_t = (beta / sigma^2) theta_t^T X_0`.
    StaticOptimal,
    Zero,
    /// `phi_t = c_t X_{t-1}`.
    LinearCoefficients(Vec<f64>),
}

impl StrategySpec {
    pub fn validate(&self, horizon: usize) -> Result<()> {
        match self {
            StrategySpec::LinearCoefficients(c) if c.len() != horizon => {
                invalid(format!("{} linear coefficients for horizon {horizon}", c.len()))
            }
            StrategySpec::LinearCoefficients(c) if c.iter().any(|v| !v.is_finite()) => {
                invalid("linear coefficients must be finite")
            }
            _ => Ok(()),
        }
    }

    /// Position at period `t` (1-based) after observing `x_prev = X_{t-1}`.
    #[inline]
    pub fn position(&self, t: usize, horizon: usize, x_prev: f64, x0: f64, params: &ModelParams) -> f64 {
        match self {
            StrategySpec::AdaptiveOptimal => position_unchecked(t, horizon, x_prev, params),
            StrategySpec::StaticOptimal => position_unchecked(t, horizon, x0, params),
            StrategySpec::Zero => 0.0,
            StrategySpec::LinearCoefficients(c) => c[t - 1] * x_prev,
        }
    }
}

/// Law of the initial price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialLaw {
    Fixed(f64),
    /// `X_0 ~ N(0, 1)`; needs a stable model with `sigma^2 = 1 - alpha^2`.
    StationaryStandardNormal,
}

impl InitialLaw {
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        match *self {
            InitialLaw::Fixed(z) if !z.is_finite() => invalid("initial price must be finite"),
            InitialLaw::Fixed(_) => Ok(()),
            InitialLaw::StationaryStandardNormal => {
                let sigma = stationary_sigma(params.beta())?;
                if (sigma - params.sigma()).abs() > 1e-12 * sigma {
                    return invalid(format!(
                        "stationary law needs sigma = {sigma}, got {}",
                        params.sigma()
                    ));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityEstimate {
    /// Sample mean of `-exp(-L_T)`.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

impl UtilityEstimate {
    /// `(mean - target) / stderr`; zero when both the error and the spread
    /// vanish, infinite when only the spread does.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.mean - target;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// `sum_t phi_t (X_t - X_{t-1})` along a realised path.
pub fn terminal_wealth(path: &PathBundle, strategy: &StrategySpec, params: &ModelParams) -> Result<f64> {
    let horizon = path.horizon();
    strategy.validate(horizon)?;
    let x = path.prices();
    Ok((1..=horizon)
        .map(|t| strategy.position(t, horizon, x[t - 1], x[0], params) * (x[t] - x[t - 1]))
        .sum())
}

fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_x0(law: InitialLaw, rng: &mut ChaCha8Rng) -> f64 {
    match law {
        InitialLaw::Fixed(z) => z,
        InitialLaw::StationaryStandardNormal => rng.sample(StandardNormal),
    }
}

/// Path number `index` of the stream identified by `seed`. Identical to the
/// paths consumed by [`estimate_utility`].
pub fn sample_path(
    law: InitialLaw,
    horizon: usize,
    params: &ModelParams,
    seed: u64,
    index: u64,
) -> Result<PathBundle> {
    check_horizon(horizon)?;
    law.validate(params)?;
    let mut rng = path_rng(seed, index);
    let x0 = draw_x0(law, &mut rng);
    let eps: Vec<f64> = (0..horizon).map(|_| rng.sample(StandardNormal)).collect();
    evolve_path(params, x0, &eps)
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }
}

/// Estimates `E[-exp(-L_T)]` for `strategy` from `n` independent paths.
pub fn estimate_utility(
    strategy: &StrategySpec,
    law: InitialLaw,
    horizon: usize,
    params: &ModelParams,
    n: usize,
    seed: u64,
) -> Result<UtilityEstimate> {
    check_horizon(horizon)?;
    if n < 2 {
        return invalid("at least two paths are needed for a standard error");
    }
    strategy.validate(horizon)?;
    law.validate(params)?;

    let (alpha, sigma) = (params.alpha(), params.sigma());
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = path_rng(seed, i as u64);
                let x0 = draw_x0(law, &mut rng);
                let mut x = x0;
                let mut wealth = 0.0;
                for t in 1..=horizon {
                    let eps: f64 = rng.sample(StandardNormal);
                    let next = alpha * x + sigma * eps;
                    wealth += strategy.position(t, horizon, x, x0, params) * (next - x);
                    x = next;
                }
                m.push(-(-wealth).exp());
            }
            m
        })
        .collect();
    let total = partial.into_iter().fold(Moments::default(), Moments::merge);

    if !total.mean.is_finite() || !total.m2.is_finite() {
        return Err(Error::NumericOverflow(
            "utility samples overflowed; the strategy is too aggressive for exp(-L)".into(),
        ));
    }
    let variance = total.m2 / (n as f64 - 1.0);
    Ok(UtilityEstimate {
        mean: total.mean,
        stderr: (variance / n as f64).sqrt(),
        n,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{cond_eu_adaptive, stationary_eu_static};

    fn params(beta: f64, sigma: f64) -> ModelParams {
        ModelParams::from_beta(beta, sigma).unwrap()
    }

    #[test]
    fn zero_strategy_wealth() {
        let p = params(-0.5, 1.0);
        let path = evolve_path(&p, 1.0, &[0.3, -2.0, 1.0]).unwrap();
        assert_eq!(terminal_wealth(&path, &StrategySpec::Zero, &p).unwrap(), 0.0);
    }

    #[test]
    fn single_period_wealth_by_hand() {
        let p = params(-0.5, 1.0);
        let path = evolve_path(&p, 1.0, &[0.0]).unwrap();
        let w = terminal_wealth(&path, &StrategySpec::AdaptiveOptimal, &p).unwrap();
        assert_eq!(w, 0.25);
    }

    #[test]
    fn adaptive_equals_its_linear_coefficients() {
        let p = params(-0.7, 1.3);
        let horizon = 6;
        let coeffs: Vec<f64> = (1..=horizon)
            .map(|t| p.beta() * (1.0 - (horizon - t) as f64 * p.beta()) / p.variance())
            .collect();
        for idx in 0..20 {
            let path = sample_path(InitialLaw::Fixed(0.8), horizon, &p, 3, idx).unwrap();
            let a = terminal_wealth(&path, &StrategySpec::AdaptiveOptimal, &p).unwrap();
            let l = terminal_wealth(&path, &StrategySpec::LinearCoefficients(coeffs.clone()), &p).unwrap();
            assert!((a - l).abs() <= 1e-13 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn coefficient_length_checked() {
        let p = params(-0.5, 1.0);
        let path = evolve_path(&p, 1.0, &[0.0, 0.0]).unwrap();
        let s = StrategySpec::LinearCoefficients(vec![1.0]);
        assert!(terminal_wealth(&path, &s, &p).is_err());
        assert!(estimate_utility(&s, InitialLaw::Fixed(0.0), 2, &p, 10, 0).is_err());
    }

    #[test]
    fn zero_strategy_is_exact() {
        let p = ModelParams::stationary(-0.5).unwrap();
        for law in [InitialLaw::Fixed(1.3), InitialLaw::StationaryStandardNormal] {
            for horizon in [1, 4] {
                let e = estimate_utility(&StrategySpec::Zero, law, horizon, &p, 10_000, 9).unwrap();
                assert_eq!(e.mean, -1.0);
                assert_eq!(e.stderr, 0.0);
            }
        }
    }

    #[test]
    fn stationary_law_requires_stable_normalised_model() {
        let e = estimate_utility(
            &StrategySpec::Zero,
            InitialLaw::StationaryStandardNormal,
            2,
            &params(0.5, 1.0),
            10,
            0,
        );
        assert!(matches!(e, Err(Error::StabilityViolation { .. })));
        let e = estimate_utility(
            &StrategySpec::Zero,
            InitialLaw::StationaryStandardNormal,
            2,
            &params(-0.5, 1.0),
            10,
            0,
        );
        assert!(matches!(e, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sample_path_matches_estimator_stream() {
        let p = params(-0.4, 0.9);
        let horizon = 3;
        let strategy = StrategySpec::AdaptiveOptimal;
        let n = 5;
        let samples: Vec<f64> = (0..n as u64)
            .map(|i| {
                let path = sample_path(InitialLaw::Fixed(1.0), horizon, &p, 11, i).unwrap();
                -(-terminal_wealth(&path, &strategy, &p).unwrap()).exp()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let e = estimate_utility(&strategy, InitialLaw::Fixed(1.0), horizon, &p, n, 11).unwrap();
        assert!((e.mean - mean).abs() < 1e-15);
    }

    #[test]
    fn estimates_are_thread_count_independent() {
        let p = params(-0.5, 1.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    estimate_utility(
                        &StrategySpec::AdaptiveOptimal,
                        InitialLaw::Fixed(1.0),
                        5,
                        &p,
                        50_000,
                        42,
                    )
                    .unwrap()
                })
        };
        let one = run(1);
        assert_eq!(one, run(8));
        assert_eq!(one, run(3));
    }

    #[test]
    fn adaptive_estimate_near_closed_form() {
        let p = params(-0.5, 1.0);
        let e = estimate_utility(
            &StrategySpec::AdaptiveOptimal,
            InitialLaw::Fixed(1.0),
            2,
            &p,
            200_000,
            1,
        )
        .unwrap();
        let target = cond_eu_adaptive(1.0, 2, &p).unwrap().value();
        assert!(e.z_score(target).abs() < 4.0, "{e:?} vs {target}");
    }

    #[test]
    fn static_stationary_estimate_near_closed_form() {
        let p = ModelParams::stationary(-0.5).unwrap();
        let e = estimate_utility(
            &StrategySpec::StaticOptimal,
            InitialLaw::StationaryStandardNormal,
            2,
            &p,
            200_000,
            5,
        )
        .unwrap();
        let target = stationary_eu_static(-0.5, 2).unwrap().value();
        assert!(e.z_score(target).abs() < 4.0, "{e:?} vs {target}");
    }

    #[test]
    fn z_score_edge_cases() {
        let e = UtilityEstimate {
            mean: -1.0,
            stderr: 0.0,
            n: 2,
            seed: 0,
        };
        assert_eq!(e.z_score(-1.0), 0.0);
        assert_eq!(e.z_score(-0.5), f64::NEG_INFINITY);
    }
}
