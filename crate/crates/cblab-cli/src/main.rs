//! Batch driver for the shear-flow multiplier laboratory.
//!
//! ```text
//! cblab <weights|linear|toy|simulate|diagnose> --config FILE --out DIR [--seed N]
//! ```
//!
//! Every subcommand reads one flat key=value config file, validates the full
//! weight-parameter record before any work, writes its reports into the
//! output directory, and leaves exactly one `manifest.txt` there (started
//! before compute, finalized after). Exit codes: 0 success, 1 a verification
//! check failed, 2 usage or config error, 3 numerical abort.

mod cmds;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cblab", version, about = "shear-flow multiplier laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub(crate) struct RunArgs {
    /// Flat key=value config file (section.key=value lines).
    #[arg(long)]
    pub(crate) config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub(crate) out: PathBuf,
    /// Seed override for randomized scans and initial data.
    #[arg(long)]
    pub(crate) seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the multiplier-weight lemma suites and report fitted constants.
    Weights(RunArgs),
    /// Long-horizon decay-rate scan of the linearized mode system.
    Linear(RunArgs),
    /// Resonant pair and chain experiments against the designed envelopes.
    Toy(RunArgs),
    /// Nonlinear pseudo-spectral run with evenly spaced checkpoints.
    Simulate(RunArgs),
    /// Post-hoc diagnostics over a stored checkpoint directory.
    Diagnose(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    cmds::install_thread_cap();
    let (name, args): (&str, &RunArgs) = match &cli.command {
        Command::Weights(a) => ("weights", a),
        Command::Linear(a) => ("linear", a),
        Command::Toy(a) => ("toy", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Diagnose(a) => ("diagnose", a),
    };
    match cmds::run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
