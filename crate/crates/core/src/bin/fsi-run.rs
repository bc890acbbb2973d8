//! Scenario runner.
//!
//! ```text
//! fsi-run run --scenario path.toml [--out DIR] [--threads N] [--seed S]
//! fsi-run sweep-gevrey --scenario path.toml ...
//! ```
//!
//! A run-kind subcommand overrides the scenario's `kind`. Exit codes:
//! 0 success, 2 configuration, 3 contact, 4 non-convergence, 5 numerical.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fsi_strip::io::{run_file, RunKind, RunOptions, THREADS_ENV};

#[derive(Parser)]
#[command(name = "fsi-run", version, about = "Run fluid-beam scenarios and write artifacts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the kind named in the scenario file.
    Run(Common),
    SimulateLinear(Common),
    SimulateNonlinear(Common),
    SweepGevrey(Common),
    #[command(name = "sweep-V")]
    SweepV(Common),
    #[command(name = "sweep-Vtilde")]
    SweepVtilde(Common),
    CheckCommutator(Common),
    Battery(Common),
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Root directory for run directories.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Run(a) => (None, a),
        Command::SimulateLinear(a) => (Some(RunKind::SimulateLinear), a),
        Command::SimulateNonlinear(a) => (Some(RunKind::SimulateNonlinear), a),
        Command::SweepGevrey(a) => (Some(RunKind::SweepGevrey), a),
        Command::SweepV(a) => (Some(RunKind::SweepV), a),
        Command::SweepVtilde(a) => (Some(RunKind::SweepVtilde), a),
        Command::CheckCommutator(a) => (Some(RunKind::CheckCommutator), a),
        Command::Battery(a) => (Some(RunKind::Battery), a),
        Command::Spectrum(a) => (Some(RunKind::Spectrum), a),
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fsi-run: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let opts = RunOptions {
        kind,
        out: args.out,
        seed: args.seed,
    };
    match run_file(&args.scenario, &opts) {
        Ok(out) => {
            println!("run directory: {}", out.dir.display());
            if let Some(v) = out.verdict {
                println!("verdict: {}", if v { "pass" } else { "fail" });
            }
            if let Some(err) = &out.error {
                eprintln!("fsi-run: {} ({})", err.message, err.kind);
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("fsi-run: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
