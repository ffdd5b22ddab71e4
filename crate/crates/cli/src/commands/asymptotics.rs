use ar1_core::analytic::{log_gamma_beta, log_h_beta};
use ar1_core::Horizon;

use super::Outcome;
use crate::args::AsymptoticsArgs;
use crate::output::Table;

/// `1, 2, 5, 10, 20, 50, ...` up to and including `max`.
pub(crate) fn horizon_grid(max: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut decade = 1usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let t = m * decade;
            if t > max {
                break 'outer;
            }
            grid.push(t);
        }
        decade *= 10;
    }
    if grid.last() != Some(&max) {
        grid.push(max);
    }
    grid
}

pub fn run(args: &AsymptoticsArgs) -> Outcome {
    let max = Horizon::new(args.max_horizon)?.get();
    let mut table = Table::new("asymptotics", &["beta", "horizon", "log_gamma", "log_h", "ratio"]);
    table.meta("betas", args.beta.clone());
    table.meta("max_horizon", max);
    for &beta in &args.beta {
        for horizon in horizon_grid(max) {
            let log_gamma = log_gamma_beta(horizon, beta)?;
            let log_h = log_h_beta(horizon, beta)?;
            table.push(vec![
                beta.into(),
                horizon.into(),
                log_gamma.into(),
                log_h.into(),
                (log_gamma - log_h).exp().into(),
            ]);
        }
    }
    table.write(&args.output)?;
    Ok(())
}
