use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use fex_cli::{run, CliError, InstanceConfig, Mode, RunOptions};

/// Extension-operator bounds, certificates and sweeps on finite abelian groups.
#[derive(Debug, Parser)]
#[command(name = "fex", version)]
struct Args {
    /// What to compute.
    #[arg(value_enum)]
    mode: Mode,

    /// JSON instance configuration.
    #[arg(long)]
    config: PathBuf,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write a CSV table.
    #[arg(long)]
    csv: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Phase-grid resolution M.
    #[arg(long)]
    grid: Option<u32>,

    /// Descent iteration budget.
    #[arg(long)]
    budget: Option<usize>,

    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn execute(args: &Args) -> Result<(), CliError> {
    let mut config = InstanceConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(grid) = args.grid {
        config.phase_grid = grid;
    }
    if let Some(budget) = args.budget {
        config.budget = budget;
    }
    let report = run(&config, args.mode, RunOptions { progress: !args.quiet })?;

    let json = report.to_json();
    match &args.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.csv {
        write(path, &report.to_csv())?;
    }
    if !report.violations().is_empty() {
        return Err(CliError::Violation(report.violations().to_vec()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fex: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
