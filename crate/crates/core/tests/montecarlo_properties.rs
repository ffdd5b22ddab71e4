use ar1_core::analytic::theta;
use ar1_core::montecarlo::{sample_path, terminal_wealth};
use ar1_core::{estimate_utility, InitialLaw, ModelParams, StrategySpec, UtilityEstimate};

fn combined(a: &UtilityEstimate, b: &UtilityEstimate) -> f64 {
    (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
}

// Common random numbers: every estimate below reuses seed 5, so the paths are
// shared across strategies.
#[test]
fn memory_beats_no_memory_beats_no_trading() {
    for &beta in &[-1.0, -0.5] {
        let params = ModelParams::from_beta(beta, 1.0).unwrap();
        for horizon in [2usize, 5, 10] {
            let run = |s: &StrategySpec| {
                estimate_utility(s, InitialLaw::Fixed(1.0), horizon, &params, 200_000, 5).unwrap()
            };
            let adaptive = run(&StrategySpec::AdaptiveOptimal);
            let fixed = run(&StrategySpec::StaticOptimal);
            let zero = run(&StrategySpec::Zero);
            assert_eq!((zero.mean, zero.stderr), (-1.0, 0.0));
            assert!(
                adaptive.mean >= fixed.mean - 3.0 * combined(&adaptive, &fixed),
                "beta={beta} T={horizon}: {adaptive:?} vs {fixed:?}"
            );
            assert!(
                fixed.mean >= zero.mean - 3.0 * fixed.stderr,
                "beta={beta} T={horizon}"
            );
        }
    }
}

// The exact utilities (Gaussian integrals of the quadratic wealth) are
// -0.20894 at the optimum, -0.22044 at -0.1 and -0.21655 at +0.1: gaps of
// 0.0115 and 0.0076, below the ~0.016 width of the unpaired 3-sigma band at
// 10^6 paths. All three utilities also have infinite variance here.
#[test]
#[ignore = "true gap is smaller than the unpaired 3-sigma band at 1e6 paths; see paired_perturbation_is_worse"]
fn perturbed_coefficients_are_worse() {
    let (beta, horizon) = (-0.5, 5);
    let params = ModelParams::from_beta(beta, 1.0).unwrap();
    let optimal = optimal_coefficients(beta, horizon);
    let run = |s: &StrategySpec| {
        estimate_utility(s, InitialLaw::Fixed(1.0), horizon, &params, 1_000_000, 9).unwrap()
    };
    let best = run(&StrategySpec::AdaptiveOptimal);
    for bump in [-0.1, 0.1] {
        let coeffs = optimal.iter().map(|c| c + bump).collect();
        let worse = run(&StrategySpec::LinearCoefficients(coeffs));
        assert!(
            best.mean - worse.mean > 3.0 * combined(&best, &worse),
            "bump={bump}: {best:?} vs {worse:?}"
        );
    }
}

/// Optimal coefficients `beta theta_t^T / sigma^2` for `sigma = 1`.
fn optimal_coefficients(beta: f64, horizon: usize) -> Vec<f64> {
    (1..=horizon)
        .map(|t| beta * theta(t, horizon, beta).unwrap())
        .collect()
}

// Same comparison on per-path differences of utility (common random numbers),
// at T = 2 where exp(-L) has finite variance for all three strategies, so the
// standard error means something. Exact gaps are 0.0098 (-0.1) and 0.0086
// (+0.1). At T = 5 the paired estimate is also dominated by rare paths.
#[test]
fn paired_perturbation_is_worse() {
    let (beta, horizon, n) = (-0.5, 2, 1_000_000u64);
    let params = ModelParams::from_beta(beta, 1.0).unwrap();
    let optimal = optimal_coefficients(beta, horizon);
    for bump in [-0.1, 0.1] {
        let perturbed = StrategySpec::LinearCoefficients(optimal.iter().map(|c| c + bump).collect());
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for i in 0..n {
            let path = sample_path(InitialLaw::Fixed(1.0), horizon, &params, 9, i).unwrap();
            let u = |s: &StrategySpec| -(-terminal_wealth(&path, s, &params).unwrap()).exp();
            let d = u(&StrategySpec::AdaptiveOptimal) - u(&perturbed);
            sum += d;
            sum_sq += d * d;
        }
        let nf = n as f64;
        let mean = sum / nf;
        let stderr = ((sum_sq / nf - mean * mean) / (nf - 1.0)).sqrt();
        assert!(mean > 3.0 * stderr, "bump={bump}: gap {mean} stderr {stderr}");
    }
}
