use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ar1",
    version,
    about = "Optimal exponential-utility trading when the price is a Gaussian AR(1) process",
    long_about = "Optimal exponential-utility trading when the price is a Gaussian AR(1) \
                  process X_{t+1} = alpha X_t + sigma eps_{t+1}, beta = alpha - 1.\n\n\
                  Every command writes a table (CSV with a header row, or JSON with a `meta` \
                  header and `rows`). Floats in CSV carry 17 significant digits. Output \
                  depends only on the arguments, never on the thread count.\n\n\
                  Exit codes: 0 success, 1 usage or input error, 2 verification failure."
)]
pub struct Cli {
    /// Worker threads (default: all cores, or RAYON_NUM_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate price paths and the wealth of a strategy.
    ///
    /// Columns: path_id, t, x, position, wealth, sigma. Row t = 0 holds X_0
    /// with position and wealth 0; row t holds X_t, the position held over
    /// (t-1, t] and the cumulative wealth.
    Simulate(SimulateArgs),
    /// Compare the closed-form expected utility with a Monte Carlo estimate.
    ///
    /// Columns: strategy, law, alpha, beta, sigma, horizon, closed_form_eu,
    /// mc_mean, mc_stderr, n, seed, z_score. Strategies without a closed form
    /// (coeffs=...) leave closed_form_eu and z_score empty.
    Evaluate(EvaluateArgs),
    /// Run the identity suite and exit with status 2 if any check fails.
    ///
    /// Columns: check, cases, max_residual, tolerance, status. Without
    /// --alpha/--beta a default parameter sweep is used. With --dump-matrix
    /// the matrix A_T is written instead (columns i, k, value; 1-based).
    Verify(VerifyArgs),
    /// Tabulate gamma_beta(T) against its Stirling asymptote.
    ///
    /// Columns: beta, horizon, log_gamma, log_h, ratio. Horizons follow a
    /// 1-2-5 grid up to --max-horizon.
    Asymptotics(AsymptoticsArgs),
    /// Stationary expected utilities with and without memory.
    ///
    /// Columns: beta, horizon, eu_adaptive, eu_static, ratio, where
    /// ratio = eu_static / eu_adaptive = gamma_beta(T)^{1/2}.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Coefficient {
    /// Autoregressive coefficient alpha.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Mean-reversion speed beta = alpha - 1.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct OptionalCoefficient {
    /// Autoregressive coefficient alpha.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Mean-reversion speed beta = alpha - 1.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Law {
    /// Start every path at this price.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    /// Draw X_0 ~ N(0, 1) and set sigma = sqrt(1 - alpha^2) (needs -2 < beta < 0).
    #[arg(long, conflicts_with = "sigma")]
    pub stationary: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `adaptive`, `static`, `zero` or `coeffs=<file>`.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyArg {
    Adaptive,
    Static,
    Zero,
    Coefficients(PathBuf),
}

impl std::str::FromStr for StrategyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adaptive" => Ok(Self::Adaptive),
            "static" => Ok(Self::Static),
            "zero" => Ok(Self::Zero),
            _ => match s.strip_prefix("coeffs=") {
                Some(path) if !path.is_empty() => Ok(Self::Coefficients(path.into())),
                _ => Err(format!(
                    "unknown strategy `{s}`; expected adaptive, static, zero or coeffs=<file>"
                )),
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub coefficient: Coefficient,
    /// Innovation scale.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub horizon: usize,
    #[command(flatten)]
    pub law: Law,
    /// adaptive, static, zero or coeffs=<file> (one coefficient per line;
    /// position c_t X_{t-1}).
    #[arg(long, default_value = "adaptive")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub coefficient: Coefficient,
    /// Innovation scale.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub horizon: usize,
    #[command(flatten)]
    pub law: Law,
    /// adaptive, static, zero or coeffs=<file>.
    #[arg(long, default_value = "adaptive")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub coefficient: OptionalCoefficient,
    /// Innovation scale (single-parameter mode).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Largest horizon for the matrix checks; the dynamic program uses at
    /// most 6 and the static system at most 20.
    #[arg(long, default_value_t = 50)]
    pub horizon: usize,
    /// Seed for the random quadratic-form instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// State-grid size of the dynamic program (odd, >= 65).
    #[arg(long, default_value_t = 257)]
    pub grid_points: usize,
    /// Gauss-Hermite order of the dynamic program (>= 16).
    #[arg(long, default_value_t = 64)]
    pub quad_nodes: usize,
    /// Write A_T for --horizon instead of running the checks.
    #[arg(long)]
    pub dump_matrix: bool,
    /// Perturb a_TT before the matrix checks (negative control).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    /// Comma-separated beta values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "0.5,1,2"
    )]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_horizon: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated beta values in (-2, 0).
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "-1.9,-1.8,-1.7,-1.6,-1.5,-1.4,-1.3,-1.2,-1.1,-1,-0.9,-0.8,-0.7,-0.6,-0.5,-0.4,-0.3,-0.2,-0.1"
    )]
    pub beta: Vec<f64>,
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20,50,100")]
    pub horizon: Vec<usize>,
    #[command(flatten)]
    pub output: Output,
}
