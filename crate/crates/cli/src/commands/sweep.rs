use ar1_core::analytic::{log_gamma_beta, stationary_eu_adaptive, stationary_eu_static};

use super::Outcome;
use crate::args::SweepArgs;
use crate::output::Table;

pub fn run(args: &SweepArgs) -> Outcome {
    let mut table = Table::new("sweep", &["beta", "horizon", "eu_adaptive", "eu_static", "ratio"]);
    table.meta("betas", args.beta.clone());
    table.meta("horizons", args.horizon.clone());
    for &beta in &args.beta {
        for &horizon in &args.horizon {
            let adaptive = stationary_eu_adaptive(beta, horizon)?;
            let fixed = stationary_eu_static(beta, horizon)?;
            let ratio = (0.5 * log_gamma_beta(horizon, beta)?).exp();
            table.push(vec![
                beta.into(),
                horizon.into(),
                adaptive.value().into(),
                fixed.value().into(),
                ratio.into(),
            ]);
        }
    }
    table.write(&args.output)?;
    Ok(())
}
