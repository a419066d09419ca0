//! `rabi`: spectra, Wigner functions and entanglement of the quantum Rabi model.

mod config;
mod error;
mod format;
mod plot;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, ExperimentSpec};
use crate::error::CliError;

fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    let spec = ExperimentSpec::resolve(&cli.command)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))?;
    pool.install(|| run::run(&spec))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            eprintln!("wrote {} files", files.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            // messages already embed their causes
            eprintln!("rabi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
