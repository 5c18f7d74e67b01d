use std::path::PathBuf;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;
mod profiles;

use config::RunConfig;
use error::CliError;

/// δ-spherical and Helgason Fourier transforms on the hyperbolic disk.
#[derive(Debug, Parser)]
#[command(name = "horofourier", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (tables go to stdout when omitted, except for verify).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Restrict K-types to even n.
    #[arg(long, global = true)]
    strict_parity: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate kernels, the Plancherel density or Q_n.
    Eval(commands::EvalArgs),
    /// Forward, inverse or Helgason transform of a profile.
    Transform(commands::TransformArgs),
    /// Run a verification suite and write its report.
    Verify(commands::VerifyArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    cfg.strict_parity |= cli.strict_parity;
    cfg.validate()?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    let out = cfg.out.clone();
    match &cli.command {
        Command::Eval(args) => commands::eval(args, &cfg, out.as_deref()),
        Command::Transform(args) => commands::transform(args, &cfg, out.as_deref()),
        Command::Verify(args) => commands::verify(args, &cfg, out.as_deref()),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
