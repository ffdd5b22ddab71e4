mod asymptotics;
mod evaluate;
mod simulate;
mod sweep;
mod verify;

use std::path::Path;

use ar1_core::{InitialLaw, ModelParams, StrategySpec};

use crate::args::{Coefficient, Law, StrategyArg};

pub use asymptotics::run as asymptotics;
pub use evaluate::run as evaluate;
pub use simulate::run as simulate;
pub use sweep::run as sweep;
pub use verify::run as verify;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or input files; exit status 1.
    Input(String),
    /// A verification check failed; exit status 2.
    Verification,
}

impl From<ar1_core::Error> for Failure {
    fn from(e: ar1_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

pub type Outcome = Result<(), Failure>;

fn beta_of(coefficient: &Coefficient) -> f64 {
    match (coefficient.alpha, coefficient.beta) {
        (Some(alpha), _) => alpha - 1.0,
        (None, Some(beta)) => beta,
        (None, None) => unreachable!("clap requires one of --alpha/--beta"),
    }
}

/// Model and initial law; `--stationary` overrides sigma.
fn model_and_law(
    coefficient: &Coefficient,
    sigma: f64,
    law: &Law,
) -> Result<(ModelParams, InitialLaw), Failure> {
    let beta = beta_of(coefficient);
    if law.stationary {
        Ok((
            ModelParams::stationary(beta)?,
            InitialLaw::StationaryStandardNormal,
        ))
    } else {
        let params = match coefficient.alpha {
            Some(alpha) => ModelParams::new(alpha, sigma)?,
            None => ModelParams::from_beta(beta, sigma)?,
        };
        Ok((
            params,
            InitialLaw::Fixed(law.x0.expect("clap requires --x0 or --stationary")),
        ))
    }
}

fn read_coefficients(path: &Path) -> Result<Vec<f64>, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            line.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Input(format!("{}:{}: `{}`: {e}", path.display(), i + 1, line.trim())))
        })
        .collect()
}

fn strategy_spec(arg: &StrategyArg, horizon: usize) -> Result<StrategySpec, Failure> {
    let spec = match arg {
        StrategyArg::Adaptive => StrategySpec::AdaptiveOptimal,
        StrategyArg::Static => StrategySpec::StaticOptimal,
        StrategyArg::Zero => StrategySpec::Zero,
        StrategyArg::Coefficients(path) => StrategySpec::LinearCoefficients(read_coefficients(path)?),
    };
    spec.validate(horizon)?;
    Ok(spec)
}

fn strategy_name(arg: &StrategyArg) -> String {
    match arg {
        StrategyArg::Adaptive => "adaptive".into(),
        StrategyArg::Static => "static".into(),
        StrategyArg::Zero => "zero".into(),
        StrategyArg::Coefficients(path) => format!("coeffs={}", path.display()),
    }
}

fn law_name(law: InitialLaw) -> String {
    match law {
        InitialLaw::Fixed(z) => format!("fixed({z})"),
        InitialLaw::StationaryStandardNormal => "stationary".into(),
    }
}

fn params_meta(params: &ModelParams) -> serde_json::Value {
    serde_json::json!({
        "alpha": params.alpha(),
        "beta": params.beta(),
        "sigma": params.sigma(),
    })
}
