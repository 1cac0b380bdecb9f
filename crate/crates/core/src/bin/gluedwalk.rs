//! Command-line front end for the experiment runners.
//!
//! On success the run manifest is printed to stdout. On failure a single
//! JSON object `{"error": {"kind": ..., "message": ...}}` goes to stderr and
//! the exit code is 1 (2 for usage errors).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use glued_localization::experiment::{self, Experiment, ExperimentConfig};
use glued_localization::Error;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "gluedwalk",
    version,
    about = "Quantum walks on disordered glued trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wave-packet propagation profiles on the left half of the chain.
    Fig4(RunArgs),
    /// Band-centre localization length against disorder width.
    Scaling(RunArgs),
    /// Largest probability of reaching the right root, against depth.
    Hitting(RunArgs),
    /// Full graph against its column reduction (n <= 8).
    Crosscheck(RunArgs),
    /// Tabulate the closed-form Cauchy localization length.
    Thouless(RunArgs),
}

/// Values are passed through the config parser unchanged, so every flag
/// accepts exactly what the config file does. Lists are comma separated.
#[derive(clap::Args)]
struct RunArgs {
    /// Config file (`key = value` lines); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    family: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Sample times, or `auto`.
    #[arg(long)]
    times: Option<String>,
    #[arg(long)]
    grid_dt: Option<String>,
    /// Hitting horizon in units of n.
    #[arg(long)]
    horizon_factor: Option<String>,
    /// Transfer-matrix steps per realization.
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    quantile: Option<String>,
    /// Disorder repetitions.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Replace the results of an earlier run in the same directory.
    #[arg(long)]
    overwrite: bool,
}

fn build_config(experiment: Experiment, args: RunArgs) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::new(experiment);
    if let Some(path) = &args.config {
        config.merge_text(&fs::read_to_string(path)?)?;
    }
    let flags = [
        ("n", args.n),
        ("gamma", args.gamma),
        ("delta", args.delta),
        ("family", args.family),
        ("seed", args.seed),
        ("times", args.times),
        ("grid_dt", args.grid_dt),
        ("horizon_factor", args.horizon_factor),
        ("steps", args.steps),
        ("quantile", args.quantile),
        ("seeds", args.seeds),
        ("out", args.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, &v)?;
        }
    }
    if args.overwrite {
        config.overwrite = true;
    }
    config.validate()?;
    Ok(config)
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!(
        "{}",
        json!({ "error": { "kind": kind, "message": message } })
    );
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            return fail("usage", first.trim_start_matches("error: ").to_string(), 2);
        }
    };
    let (experiment, args) = match cli.command {
        Command::Fig4(a) => (Experiment::Fig4, a),
        Command::Scaling(a) => (Experiment::Scaling, a),
        Command::Hitting(a) => (Experiment::Hitting, a),
        Command::Crosscheck(a) => (Experiment::Crosscheck, a),
        Command::Thouless(a) => (Experiment::Thouless, a),
    };
    let result = build_config(experiment, args).and_then(|c| experiment::run(&c));
    match result {
        Ok(manifest) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest).expect("manifest serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}
