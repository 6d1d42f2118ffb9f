//! Command-line front end: parses a TOML scenario config, runs one
//! subcommand, prints the JSON summary to stdout, and maps the result to a
//! process exit status (0 pass, 2 bad config, 3 unmet hypothesis, 4
//! numerical failure).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hym_torus::config::{Overrides, ScenarioConfig};
use hym_torus::run::{self, Subcommand as Sub};

#[derive(Parser)]
#[command(
    name = "hym-torus",
    about = "Prescribed Hermitian-Yang-Mills-Higgs tensor equation on flat complex tori",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the prescribed tensor equation with a Newton-Krylov iteration.
    Solve(RunArgs),
    /// Check the curvature and pairing identities on a seeded instance.
    #[command(name = "verify-identities")]
    VerifyIdentities(RunArgs),
    /// Solve with a dominated target and check the metric comparison.
    Compare(RunArgs),
    /// Characteristic-form integrals, identities, and the number inequality.
    Chern(RunArgs),
    /// Heat-flow solve cross-checked against the Newton fixed point.
    Flow(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the summary, CSV series, and field dumps.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the grid points per axis.
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, args) = match &cli.command {
        Command::Solve(a) => (Sub::Solve, a),
        Command::VerifyIdentities(a) => (Sub::VerifyIdentities, a),
        Command::Compare(a) => (Sub::Compare, a),
        Command::Chern(a) => (Sub::Chern, a),
        Command::Flow(a) => (Sub::Flow, a),
    };
    let cfg = match ScenarioConfig::from_path(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let overrides = Overrides {
        seed: args.seed,
        grid_points: args.grid_n,
    };
    match run::run(sub, &cfg, &overrides, args.out.as_deref()) {
        Ok(summary) => {
            println!("{}", summary.to_json());
            if let Some(name) = summary.hypothesis_violation() {
                eprintln!("hypothesis not met: {name}");
            } else if !summary.pass() {
                eprintln!("failed checks: {}", summary.failed_checks().join(", "));
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
