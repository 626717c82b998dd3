//! Command-line front end for the `factorboot` estimators.

pub mod args;
pub mod error;
pub mod estimate;
pub mod input;
pub mod simulate;
pub mod verify;

use std::fs;
use std::process::ExitCode;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn dispatch(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Estimate(a) => {
            let report = estimate::run(a)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))? + "\n";
            match &a.output {
                Some(path) => fs::write(path, json)?,
                None => print!("{json}"),
            }
        }
        Command::Simulate(a) => simulate::run(a)?,
        Command::Verify(a) => {
            let out = verify::run(a)?;
            println!("{}", out.summary());
            if !out.passed {
                return Err(CliError::CheckFailed(format!("{} check exceeded its tolerance", out.kind)));
            }
        }
    }
    Ok(())
}

/// Runs a parsed command line and maps failures to exit codes.
pub fn main_with(cli: Cli) -> ExitCode {
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
