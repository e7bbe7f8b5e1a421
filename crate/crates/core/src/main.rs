//! Command-line entry point for the sampling experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use newton_mcmc::harness::{self, HarnessOptions};

#[derive(Debug, Parser)]
#[command(
    name = "newton-mcmc",
    about = "Discrete-distribution samplers with coordinatewise informed proposals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for traces and reports.
    #[arg(long)]
    out: PathBuf,
    /// Replace the output directory if it already exists.
    #[arg(long)]
    overwrite: bool,
    /// Run only this seed, overriding the config's seed list.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for seed-parallel runs (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured chains and write traces.
    Sample(CommonArgs),
    /// Exact transition-matrix analysis and bound checks.
    Exact(CommonArgs),
    /// Time the configured proposals and report sampling efficiency.
    Bench(CommonArgs),
}

impl CommonArgs {
    fn into_options(self) -> HarnessOptions {
        HarnessOptions {
            config: self.config,
            out: self.out,
            overwrite: self.overwrite,
            seed: self.seed,
            threads: self.threads,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(args) => harness::cmd_sample(&args.into_options()),
        Command::Exact(args) => harness::cmd_exact(&args.into_options()),
        Command::Bench(args) => harness::cmd_bench(&args.into_options()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(harness::error_exit_code(&err) as u8)
        }
    }
}
