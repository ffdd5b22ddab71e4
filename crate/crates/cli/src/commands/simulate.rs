use ar1_core::montecarlo::sample_path;
use ar1_core::Horizon;

use super::{law_name, model_and_law, params_meta, strategy_name, strategy_spec, Outcome};
use crate::args::SimulateArgs;
use crate::output::Table;

pub fn run(args: &SimulateArgs) -> Outcome {
    let (params, law) = model_and_law(&args.coefficient, args.sigma, &args.law)?;
    let horizon = Horizon::new(args.horizon)?.get();
    let strategy = strategy_spec(&args.strategy, horizon)?;
    law.validate(&params)?;

    let mut table = Table::new("simulate", &["path_id", "t", "x", "position", "wealth", "sigma"]);
    table.meta("params", params_meta(&params));
    table.meta("horizon", horizon);
    table.meta("law", law_name(law));
    table.meta("strategy", strategy_name(&args.strategy));
    table.meta("seed", args.seed);

    for id in 0..args.paths as u64 {
        let path = sample_path(law, horizon, &params, args.seed, id)?;
        let x = path.prices();
        table.push(vec![
            id.into(),
            0usize.into(),
            x[0].into(),
            0.0.into(),
            0.0.into(),
            params.sigma().into(),
        ]);
        let mut wealth = 0.0;
        for t in 1..=horizon {
            let position = strategy.position(t, horizon, x[t - 1], x[0], &params);
            wealth += position * (x[t] - x[t - 1]);
            table.push(vec![
                id.into(),
                t.into(),
                x[t].into(),
                position.into(),
                wealth.into(),
                params.sigma().into(),
            ]);
        }
    }
    table.write(&args.output)?;
    Ok(())
}
