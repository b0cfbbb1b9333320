//! `nonback`: batch verification of non-backtracking walk identities.
//!
//! Exit codes: 0 all verdicts pass, 1 verification failure, 2 input error,
//! 3 fixed-point non-convergence.

mod config;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};
use run::{Failure, Outcome};

fn execute(cfg: &RunConfig) -> Result<bool, Failure> {
    match run::run(cfg)? {
        Outcome::EdgeList(text) => {
            output::write_out(text.as_bytes(), None).map_err(Failure::Input)?;
            Ok(true)
        }
        Outcome::Report(report) => {
            let bytes = output::render(&report, cfg.format).map_err(Failure::Input)?;
            // For `generate`, --out already received the edge list.
            let target = match cfg.command {
                Command::Generate => None,
                _ => cfg.out.as_deref(),
            };
            output::write_out(&bytes, target).map_err(Failure::Input)?;
            if let Some(msg) = &report.failure {
                eprintln!("verification failed: {msg}");
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
