//! `idma <subcommand> --config path [--seed n] [--threads n] [--out dir] [--format csv|json]`
//!
//! Exit codes: 0 success, 2 configuration error, 3 quadrature did not
//! converge, 4 divergent moment, 1 anything else.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use config::{Format, RunConfig};
use output::Sink;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] idma::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use idma::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidParameter(_) | E::EmptyTruncation { .. } | E::Table(_) | E::NotAvailable { .. }) => 2,
            CliError::Core(E::NonConvergence { .. }) => 3,
            CliError::Core(E::DivergentMoment(_)) => 4,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Integrability conditions (i)-(iii).
    Conditions,
    /// Characteristic-function tables: stationary, window and both limits.
    Cf,
    /// Covariance on the lag grid and its integral.
    Cov,
    /// Replicate matrix of window integrals and limit values.
    Simulate,
    /// Characteristic-function distance to each candidate limit over T.
    Converge,
    /// Window-variance growth against the persistent control kernel.
    Hyper,
}

#[derive(Debug, Parser)]
#[command(name = "idma", version, about = "Infinitely divisible moving averages")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `seed` field.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Overrides the `output` field (directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the `format` field.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = RunConfig::from_path(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(out) = cli.out {
        cfg.output = Some(out);
    }
    if let Some(format) = cli.format {
        cfg.format = Some(format);
    }
    let base = cli.config.parent().map(PathBuf::from).unwrap_or_default();
    let resolved = cfg.resolve(&base)?;
    let format = cfg.format.unwrap_or_else(|| commands::default_format(cli.command));
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut sink = Sink::new(&dir, cfg.digest(), resolved.seed);
    commands::run(cli.command, &resolved, format, cli.threads, &mut sink)?;
    Ok(sink.written().to_vec())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("idma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
