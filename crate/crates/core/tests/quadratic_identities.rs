use ar1_core::analytic::{adaptive_position, cond_eu_adaptive};
use ar1_core::quadratic::{
    build_a, check_minor_identity, check_sum_of_rows, cholesky_log_det, eval_q_direct,
    expected_utility_first_step, inverse_corner, log_det_a, log_det_recursive, numeric_inverse_corner,
    optimal_first_position, QuadraticDecomposition,
};
use ar1_core::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const ALPHAS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[test]
fn quadratic_form_matches_simulated_wealth() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let horizon = rng.random_range(1..=8usize);
        let params = ModelParams::new(rng.random_range(-1.5..=1.5), rng.random_range(0.5..=2.0)).unwrap();
        let phi: f64 = rng.random_range(-3.0..3.0);
        let x0: f64 = rng.random_range(-3.0..3.0);
        let eps: Vec<f64> = (0..horizon).map(|_| rng.sample(StandardNormal)).collect();

        let direct = eval_q_direct(phi, x0, &eps, horizon, &params).unwrap();
        let form = QuadraticDecomposition::new(phi, x0, horizon, &params)
            .unwrap()
            .evaluate(&eps)
            .unwrap();
        assert!(
            (direct - form).abs() < 1e-9 * (1.0 + direct.abs()),
            "T={horizon} alpha={} direct={direct} form={form}",
            params.alpha()
        );
    }
}

#[test]
fn row_and_minor_identities() {
    for &alpha in ALPHAS.iter().chain(&[-1.5, 1.5]) {
        let params = ModelParams::new(alpha, 1.0).unwrap();
        for horizon in 2..=50 {
            assert!(
                check_sum_of_rows(horizon, &params).unwrap() < 1e-10,
                "alpha={alpha} T={horizon}"
            );
            assert_eq!(
                check_minor_identity(horizon, &params).unwrap(),
                0.0,
                "alpha={alpha} T={horizon}"
            );
        }
    }
}

#[test]
fn determinant_three_ways() {
    for &alpha in &ALPHAS {
        for &sigma in &[0.5, 1.0, 2.0] {
            let params = ModelParams::new(alpha, sigma).unwrap();
            for horizon in 1..=50 {
                let closed = log_det_a(horizon, &params).unwrap();
                let chol = cholesky_log_det(&build_a(horizon, &params).unwrap()).unwrap();
                let recursive = log_det_recursive(horizon, &params).unwrap();
                assert!(
                    (closed - chol).abs() < 1e-9,
                    "alpha={alpha} T={horizon}: {closed} vs {chol}"
                );
                assert!((closed - recursive).abs() < 1e-9, "alpha={alpha} T={horizon}");
            }
        }
    }
}

#[test]
fn inverse_corner_matches_numeric_inverse() {
    for &alpha in &ALPHAS {
        let params = ModelParams::new(alpha, 1.0).unwrap();
        for horizon in 1..=50 {
            let closed = inverse_corner(horizon, params.beta()).unwrap();
            let numeric = numeric_inverse_corner(&build_a(horizon, &params).unwrap()).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-9 * closed.abs(),
                "alpha={alpha} T={horizon}"
            );
        }
    }
}

#[test]
fn first_step_chain_reproduces_closed_form() {
    for &beta in &[-1.0, -0.5, 0.3, 1.0] {
        for &sigma in &[0.5, 1.0, 2.0] {
            let params = ModelParams::from_beta(beta, sigma).unwrap();
            // with alpha = 2 the exponent cancels terms of size alpha^{2T}
            // and A has condition ~alpha^{4T}; beyond T = 8 the 1e-9 checks
            // hit the floor of double precision
            let max_horizon = if params.alpha().abs() <= 1.0 { 12 } else { 8 };
            for horizon in 1..=max_horizon {
                for &z in &[-1.5, 0.0, 0.8] {
                    let phi = optimal_first_position(z, horizon, &params).unwrap();
                    let analytic = adaptive_position(1, horizon, z, &params).unwrap();
                    assert!(
                        (phi - analytic).abs() < 1e-9 * analytic.abs().max(1.0),
                        "beta={beta} sigma={sigma} T={horizon} z={z}: {phi} vs {analytic}"
                    );
                    let at_opt = expected_utility_first_step(phi, z, horizon, &params).unwrap();
                    let closed = cond_eu_adaptive(z, horizon, &params).unwrap();
                    assert!(
                        (at_opt.log_magnitude - closed.log_magnitude).abs() < 1e-9,
                        "beta={beta} sigma={sigma} T={horizon} z={z}: {} vs {}",
                        at_opt.log_magnitude,
                        closed.log_magnitude
                    );
                    for bump in [-0.3, -0.01, 0.01, 0.3] {
                        let off = expected_utility_first_step(phi + bump, z, horizon, &params).unwrap();
                        assert!(at_opt.at_least(&off));
                    }
                }
            }
        }
    }
}
