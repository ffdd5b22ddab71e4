//! The identity suite: every check compares two independent computations and
//! reports the worst residual over its cases.

use ar1_core::analytic::{cond_eu_adaptive, cond_eu_static, static_position};
use ar1_core::oracle::{
    dp_conditional_utility, dp_solve, solve_static_system, static_residual, static_utility_check, DpConfig,
};
use ar1_core::quadratic::{
    build_a, check_minor_identity, cholesky_log_det, eval_q_direct, inverse_corner, log_det_a,
    log_det_recursive, numeric_inverse_corner, sum_of_rows_residual, QuadraticDecomposition,
};
use ar1_core::{DMatrix, Horizon, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Failure, Outcome};
use crate::args::VerifyArgs;
use crate::output::Table;

const DEFAULT_ALPHAS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
const DEFAULT_BETAS: [f64; 5] = [-1.0, -0.5, -0.1, 0.1, 0.5];
const DEFAULT_SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];
const DP_MAX_HORIZON: usize = 6;
const STATIC_MAX_HORIZON: usize = 20;
const QF_MAX_HORIZON: usize = 8;
const QF_INSTANCES: usize = 1000;
const FAULT: f64 = 1e-3;

struct Scope {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    sigmas: Vec<f64>,
    /// Fixed parameters for the quadratic-form instances; random if `None`.
    qf_params: Option<ModelParams>,
    horizon: usize,
    inject_fault: bool,
    dp: DpConfig,
    seed: u64,
}

type Residuals = ar1_core::Result<Vec<f64>>;

/// Largest residual; NaN if any residual is NaN.
fn worst(residuals: &[f64]) -> f64 {
    residuals.iter().fold(0.0, |m: f64, &r| {
        if r.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(r)
        }
    })
}

fn matrix(horizon: usize, params: &ModelParams, fault: bool) -> ar1_core::Result<DMatrix<f64>> {
    let mut a = build_a(horizon, params)?;
    if fault {
        a[(horizon - 1, horizon - 1)] += FAULT;
    }
    Ok(a)
}

fn relative(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        (got - want).abs() / want.abs()
    }
}

impl Scope {
    fn matrix_params(&self) -> impl Iterator<Item = ModelParams> + '_ {
        self.alphas
            .iter()
            .map(|&a| ModelParams::new(a, 1.0).expect("finite alpha"))
    }

    fn model_params(&self) -> ar1_core::Result<Vec<ModelParams>> {
        let mut out = Vec::new();
        for &beta in &self.betas {
            for &sigma in &self.sigmas {
                out.push(ModelParams::from_beta(beta, sigma)?);
            }
        }
        Ok(out)
    }

    fn sum_of_rows(&self) -> Residuals {
        let mut r = Vec::new();
        for p in self.matrix_params() {
            for t in 2..=self.horizon {
                r.push(sum_of_rows_residual(&matrix(t, &p, self.inject_fault)?, p.beta()));
            }
        }
        Ok(r)
    }

    fn minor(&self) -> Residuals {
        let mut r = Vec::new();
        for p in self.matrix_params() {
            for t in 2..=self.horizon {
                r.push(check_minor_identity(t, &p)?);
            }
        }
        Ok(r)
    }

    fn det_cholesky(&self) -> Residuals {
        let mut r = Vec::new();
        for p in self.matrix_params() {
            for t in 1..=self.horizon {
                let chol = cholesky_log_det(&matrix(t, &p, self.inject_fault)?)?;
                r.push((chol - log_det_a(t, &p)?).abs());
            }
        }
        Ok(r)
    }

    fn det_recursion(&self) -> Residuals {
        let mut r = Vec::new();
        for p in self.matrix_params() {
            for t in 1..=self.horizon {
                r.push((log_det_recursive(t, &p)? - log_det_a(t, &p)?).abs());
            }
        }
        Ok(r)
    }

    fn corner(&self) -> Residuals {
        let mut r = Vec::new();
        for p in self.matrix_params() {
            for t in 1..=self.horizon {
                let numeric = numeric_inverse_corner(&matrix(t, &p, self.inject_fault)?)?;
                r.push(relative(numeric, inverse_corner(t, p.beta())?));
            }
        }
        Ok(r)
    }

    fn quadratic_form(&self) -> Residuals {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let max_t = self.horizon.min(QF_MAX_HORIZON);
        (0..QF_INSTANCES)
            .map(|_| {
                let horizon = rng.random_range(1..=max_t);
                let params = match self.qf_params {
                    Some(p) => p,
                    None => ModelParams::new(rng.random_range(-1.5..=1.5), rng.random_range(0.5..=2.0))?,
                };
                let phi: f64 = rng.random_range(-3.0..3.0);
                let x0: f64 = rng.random_range(-3.0..3.0);
                let eps: Vec<f64> = (0..horizon).map(|_| rng.sample(StandardNormal)).collect();
                let direct = eval_q_direct(phi, x0, &eps, horizon, &params)?;
                let form = QuadraticDecomposition::new(phi, x0, horizon, &params)?.evaluate(&eps)?;
                Ok((direct - form).abs() / (1.0 + direct.abs()))
            })
            .collect()
    }

    /// Coefficient and value residuals of the dynamic program.
    fn dynamic_program(&self) -> ar1_core::Result<(Vec<f64>, Vec<f64>)> {
        let (mut coeffs, mut values) = (Vec::new(), Vec::new());
        for p in self.model_params()? {
            for horizon in 1..=self.horizon.min(DP_MAX_HORIZON) {
                let sol = dp_solve(horizon, &p, &self.dp)?;
                for (i, &got) in sol.fitted_coefficients().iter().enumerate() {
                    let want = static_position(i + 1, horizon, 1.0, &p)?;
                    // a vanishing theta is measured against beta / sigma^2
                    let scale = if want == 0.0 {
                        p.beta().abs() / p.variance()
                    } else {
                        want.abs()
                    };
                    coeffs.push(if scale == 0.0 {
                        got.abs()
                    } else {
                        (got - want).abs() / scale
                    });
                }
                for z in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                    let dp = dp_conditional_utility(&sol, z)?.log_magnitude;
                    let closed = cond_eu_adaptive(z, horizon, &p)?.log_magnitude;
                    values.push(relative(dp, closed));
                }
            }
        }
        Ok((coeffs, values))
    }

    /// Solution error, first-order residual and utility error of the static
    /// system.
    fn static_system(&self) -> ar1_core::Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let (mut solution, mut residual, mut utility) = (Vec::new(), Vec::new(), Vec::new());
        let x0 = 1.0;
        for p in self.model_params()? {
            for horizon in 1..=self.horizon.min(STATIC_MAX_HORIZON) {
                let eta = solve_static_system(x0, horizon, &p)?;
                for (i, e) in eta.iter().enumerate() {
                    solution.push((e - static_position(i + 1, horizon, x0, &p)?).abs());
                }
                residual.push(static_residual(&eta, x0, &p)?);
                let solved = static_utility_check(x0, horizon, &p)?.log_magnitude;
                utility.push((solved - cond_eu_static(x0, horizon, &p)?.log_magnitude).abs());
            }
        }
        Ok((solution, residual, utility))
    }
}

struct Row {
    name: &'static str,
    cases: usize,
    max_residual: Option<f64>,
    tolerance: f64,
    status: &'static str,
}

fn row(name: &'static str, tolerance: f64, residuals: Residuals) -> Row {
    match residuals {
        Ok(r) => {
            let m = worst(&r);
            Row {
                name,
                cases: r.len(),
                max_residual: Some(m),
                tolerance,
                status: if m <= tolerance { "pass" } else { "fail" },
            }
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            Row {
                name,
                cases: 0,
                max_residual: None,
                tolerance,
                status: "error",
            }
        }
    }
}

fn split<T>(r: &ar1_core::Result<T>, pick: impl Fn(&T) -> &Vec<f64>) -> Residuals {
    match r {
        Ok(v) => Ok(pick(v).clone()),
        Err(e) => Err(e.clone()),
    }
}

fn dump(args: &VerifyArgs, params: &ModelParams) -> Outcome {
    let horizon = Horizon::new(args.horizon)?.get();
    let a = matrix(horizon, params, args.inject_fault)?;
    let mut table = Table::new("verify", &["i", "k", "value"]);
    table.meta("params", super::params_meta(params));
    table.meta("horizon", horizon);
    for i in 0..horizon {
        for k in 0..horizon {
            table.push(vec![(i + 1).into(), (k + 1).into(), a[(i, k)].into()]);
        }
    }
    table.write(&args.output)?;
    Ok(())
}

pub fn run(args: &VerifyArgs) -> Outcome {
    let single = match (args.coefficient.alpha, args.coefficient.beta) {
        (Some(alpha), _) => Some(ModelParams::new(alpha, args.sigma)?),
        (None, Some(beta)) => Some(ModelParams::from_beta(beta, args.sigma)?),
        (None, None) => None,
    };
    if args.dump_matrix {
        let params = single.ok_or_else(|| Failure::Input("--dump-matrix needs --alpha or --beta".into()))?;
        return dump(args, &params);
    }
    let horizon = Horizon::new(args.horizon)?.get();
    let dp = DpConfig {
        grid_points: args.grid_points,
        quadrature_nodes: args.quad_nodes,
        ..DpConfig::default()
    };
    dp.validate()?;

    let scope = match single {
        Some(p) => Scope {
            alphas: vec![p.alpha()],
            betas: vec![p.beta()],
            sigmas: vec![p.sigma()],
            qf_params: Some(p),
            horizon,
            inject_fault: args.inject_fault,
            dp,
            seed: args.seed,
        },
        None => Scope {
            alphas: DEFAULT_ALPHAS.to_vec(),
            betas: DEFAULT_BETAS.to_vec(),
            sigmas: DEFAULT_SIGMAS.to_vec(),
            qf_params: None,
            horizon,
            inject_fault: args.inject_fault,
            dp,
            seed: args.seed,
        },
    };

    let dp_result = scope.dynamic_program();
    let static_result = scope.static_system();
    let rows = [
        row("sum_of_rows", 1e-10, scope.sum_of_rows()),
        row("minor_identity", 0.0, scope.minor()),
        row("log_det_cholesky", 1e-9, scope.det_cholesky()),
        row("log_det_recursion", 1e-9, scope.det_recursion()),
        row("inverse_corner", 1e-9, scope.corner()),
        row("quadratic_form", 1e-9, scope.quadratic_form()),
        row("dp_coefficients", 1e-4, split(&dp_result, |r| &r.0)),
        row("dp_utility", 1e-5, split(&dp_result, |r| &r.1)),
        row("static_solution", 1e-10, split(&static_result, |r| &r.0)),
        row("static_residual", 1e-10, split(&static_result, |r| &r.1)),
        row("static_utility", 1e-10, split(&static_result, |r| &r.2)),
    ];

    let mut table = Table::new(
        "verify",
        &["check", "cases", "max_residual", "tolerance", "status"],
    );
    if let Some(p) = single {
        table.meta("params", super::params_meta(&p));
    }
    table.meta("horizon", horizon);
    table.meta("seed", args.seed);
    table.meta("grid_points", args.grid_points);
    table.meta("quad_nodes", args.quad_nodes);
    let mut ok = true;
    for r in &rows {
        ok &= r.status == "pass";
        table.push(vec![
            r.name.into(),
            r.cases.into(),
            r.max_residual.into(),
            r.tolerance.into(),
            r.status.into(),
        ]);
    }
    table.write(&args.output)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
