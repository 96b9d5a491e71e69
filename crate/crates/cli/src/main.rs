mod commands;
mod config;
mod output;
mod validate;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};

/// Sets the worker-thread count; results do not depend on it.
const THREADS_ENV: &str = "HOPCAP_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or parameter combinations.
    Usage(String),
    /// A computation or output step failed.
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<hopcap::Error> for CliError {
    fn from(e: hopcap::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let cfg = RunConfig::resolve(&cli.command)?;
    match cli.command {
        Command::Hopcurve(_) => commands::hopcurve(&cfg)?,
        Command::Hidden(_) => commands::hidden(&cfg)?,
        Command::Moments(_) => commands::moments(&cfg)?,
        Command::Throughput(_) => commands::throughput(&cfg)?,
        Command::Validate(_) => return validate::run(&cfg),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hopcap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
