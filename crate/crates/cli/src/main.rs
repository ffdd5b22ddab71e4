mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Asymptotics(a) => commands::asymptotics(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
