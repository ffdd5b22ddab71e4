use ar1_core::analytic::{cond_eu_adaptive, cond_eu_static, stationary_eu_adaptive, stationary_eu_static};
use ar1_core::{estimate_utility, Horizon, InitialLaw, ModelParams, StrategySpec};

use super::{law_name, model_and_law, params_meta, strategy_name, strategy_spec, Failure, Outcome};
use crate::args::EvaluateArgs;
use crate::output::Table;

fn closed_form(
    strategy: &StrategySpec,
    law: InitialLaw,
    horizon: usize,
    params: &ModelParams,
) -> Result<Option<f64>, Failure> {
    let utility = match (strategy, law) {
        (StrategySpec::Zero, _) => return Ok(Some(-1.0)),
        (StrategySpec::LinearCoefficients(_), _) => return Ok(None),
        (StrategySpec::AdaptiveOptimal, InitialLaw::Fixed(z)) => cond_eu_adaptive(z, horizon, params)?,
        (StrategySpec::StaticOptimal, InitialLaw::Fixed(z)) => cond_eu_static(z, horizon, params)?,
        (StrategySpec::AdaptiveOptimal, InitialLaw::StationaryStandardNormal) => {
            stationary_eu_adaptive(params.beta(), horizon)?
        }
        (StrategySpec::StaticOptimal, InitialLaw::StationaryStandardNormal) => {
            stationary_eu_static(params.beta(), horizon)?
        }
    };
    Ok(Some(utility.value()))
}

pub fn run(args: &EvaluateArgs) -> Outcome {
    let (params, law) = model_and_law(&args.coefficient, args.sigma, &args.law)?;
    let horizon = Horizon::new(args.horizon)?.get();
    let strategy = strategy_spec(&args.strategy, horizon)?;

    let exact = closed_form(&strategy, law, horizon, &params)?;
    let estimate = estimate_utility(&strategy, law, horizon, &params, args.paths, args.seed)?;
    let z_score = exact.map(|v| estimate.z_score(v));

    let mut table = Table::new(
        "evaluate",
        &[
            "strategy",
            "law",
            "alpha",
            "beta",
            "sigma",
            "horizon",
            "closed_form_eu",
            "mc_mean",
            "mc_stderr",
            "n",
            "seed",
            "z_score",
        ],
    );
    table.meta("params", params_meta(&params));
    table.meta("seed", args.seed);
    table.push(vec![
        strategy_name(&args.strategy).into(),
        law_name(law).into(),
        params.alpha().into(),
        params.beta().into(),
        params.sigma().into(),
        horizon.into(),
        exact.into(),
        estimate.mean.into(),
        estimate.stderr.into(),
        estimate.n.into(),
        estimate.seed.into(),
        z_score.into(),
    ]);
    table.write(&args.output)?;
    Ok(())
}
