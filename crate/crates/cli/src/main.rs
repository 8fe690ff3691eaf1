use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use tvgap_cli::commands::{bound, paper, scan, verify};
use tvgap_cli::error::CliError;
use tvgap_cli::report::{EvalOptions, Report};

#[derive(Parser)]
#[command(name = "tvgap", version, about = "Certified TV-distance bounds for two-component Gaussian mixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SeedArg {
    /// Top-level seed; every random stream is derived from it.
    #[arg(long, env = "TVGAP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper bounds, oracle and diagnostics for one pair.
    Bound {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        /// Monte Carlo samples for the dD oracle.
        #[arg(long, default_value_t = tvgap::oracles::DEFAULT_MC_SAMPLES)]
        mc_samples: usize,
        /// Absolute tolerance of the 1D quadrature oracle.
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
        /// Skip the oracles.
        #[arg(long)]
        no_oracle: bool,
    },
    /// Reproduce the worked examples with pass/fail checks.
    PaperExamples {
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Randomized soundness sweep.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_N_1D)]
        n_1d: usize,
        #[arg(long, default_value_t = verify::DEFAULT_N_ND)]
        n_nd: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// CSV table over a parameter grid of one family.
    Scan {
        #[arg(long)]
        family: String,
        /// Comma-separated parameter values.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        seed: SeedArg,
    },
}

fn emit<B: Serialize>(report: Report<B>) -> Result<ExitCode, CliError> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{}", report.to_json()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            return Err(CliError::Invariant(format!("writing report: {e}")));
        }
        _ => {}
    }
    Ok(if report.verdict.pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Bound { input, seed, mc_samples, quad_tol, no_oracle } => {
            if mc_samples < tvgap::oracles::MIN_MC_SAMPLES {
                return Err(CliError::Input(format!(
                    "--mc-samples must be at least {}",
                    tvgap::oracles::MIN_MC_SAMPLES
                )));
            }
            if !(quad_tol.is_finite() && quad_tol > 0.0) {
                return Err(CliError::Input("--quad-tol must be positive and finite".into()));
            }
            let opts = EvalOptions { mc_samples, quad_tol, oracle: !no_oracle, ..EvalOptions::new(seed.seed) };
            emit(bound::run(&input, &opts)?)
        }
        Command::PaperExamples { seed } => emit(paper::run(seed.seed)?),
        Command::Verify { n_1d, n_nd, seed } => emit(verify::run(n_1d, n_nd, seed.seed)?),
        Command::Scan { family, grid, seed } => {
            let family: scan::ScanFamily = family.parse()?;
            let grid = scan::parse_grid(&grid)?;
            scan::run(io::stdout().lock(), family, &grid, seed.seed)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
