//! CLI entry point: `boundary-lab <scenario> --config <path> --out <dir>
//! [--seed N] [--threads N]`.
//!
//! Exit codes: 0 pass, 1 mathematical-verdict failure, 2 config/usage
//! error. `BOUNDARY_LAB_THREADS` is the fallback for `--threads`.

use boundary_lab::commands::run_scenario;
use boundary_lab::config::RunConfig;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "boundary-lab", version, about = "Numerical laboratory for radial boundary behavior of bounded analytic functions")]
struct Cli {
    #[command(subcommand)]
    scenario: Scenario,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Override the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the radial probes (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Scenario {
    /// Lusin-type construction: bounded function with no radial limits on E.
    Lusin(RunArgs),
    /// Almost-everywhere unimodular limits of a Blaschke product.
    Riesz(RunArgs),
    /// The transform g = e^{-i log h} and its modulus window.
    Transform(RunArgs),
    /// Factor out Blaschke zeros, then run the transform probe.
    Corollary1(RunArgs),
    /// Two-component split of the comb domain.
    Comb(RunArgs),
}

impl Scenario {
    fn name(&self) -> &'static str {
        match self {
            Scenario::Lusin(_) => "lusin",
            Scenario::Riesz(_) => "riesz",
            Scenario::Transform(_) => "transform",
            Scenario::Corollary1(_) => "corollary1",
            Scenario::Comb(_) => "comb",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Scenario::Lusin(a)
            | Scenario::Riesz(a)
            | Scenario::Transform(a)
            | Scenario::Corollary1(a)
            | Scenario::Comb(a) => a,
        }
    }
}

fn thread_count(args: &RunArgs) -> Option<usize> {
    args.threads.or_else(|| {
        std::env::var("BOUNDARY_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's help/version on stdout with success status
            if e.use_stderr() {
                eprint!("{}", e);
                return ExitCode::from(2);
            }
            print!("{}", e);
            return ExitCode::SUCCESS;
        }
    };
    let args = cli.scenario.args();

    if let Some(n) = thread_count(args) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not configure {} threads: {}", n, e);
            return ExitCode::from(2);
        }
    }

    let mut cfg = match RunConfig::from_path(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    if cfg.scenario != cli.scenario.name() {
        eprintln!(
            "error: config is for scenario '{}' but '{}' was requested",
            cfg.scenario,
            cli.scenario.name()
        );
        return ExitCode::from(2);
    }
    if let Some(seed) = args.seed {
        cfg.probe.seed = seed;
    }

    ExitCode::from(run_scenario(&cfg, &args.out) as u8)
}
