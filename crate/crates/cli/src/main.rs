use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wbar_harness::config::{
    Command, CompareParams, DiffuseParams, ExperimentConfig, F2Params, GrowthParams, NormsParams, PushforwardParams,
    CAP_ENV,
};

/// Exact bar-complex computations and norm-estimate verification suites.
///
/// Exit status: 0 if every checked identity and inequality held, 1 if any
/// was violated, 2 on errors.
#[derive(Parser)]
#[command(name = "wbar", version)]
struct Cli {
    /// Read the whole experiment from a JSON file (`{"command": "...", ...}`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration cap (elements); overrides the environment variable.
    #[arg(long, global = true, env = CAP_ENV)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sphere and ball sizes against enumeration and breadth-first search.
    Growth(GrowthParams),
    /// Norm axioms and contractivity on random chains.
    Norms(NormsParams),
    /// Diffusion cone operator, chain map E and the explicit cone bound.
    Diffuse(DiffuseParams),
    /// Comparison of weighted norms for groups of polynomial growth.
    ComparePq(CompareParams),
    /// Functoriality estimates for a homomorphism with controlled kernel.
    Pushforward(PushforwardParams),
    /// Level sets, partial sums b(D), telescoping and decay over F_2.
    F2Vanish(F2Params),
    /// Every suite with a fixed battery of parameters.
    All,
}

fn config(cli: Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match (&cli.config, cli.command) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ExperimentConfig::from_json(&text).map_err(|e| e.to_string())?
        }
        (None, Some(cmd)) => ExperimentConfig::new(match cmd {
            Cmd::Growth(p) => Command::Growth(p),
            Cmd::Norms(p) => Command::Norms(p),
            Cmd::Diffuse(p) => Command::Diffuse(p),
            Cmd::ComparePq(p) => Command::ComparePq(p),
            Cmd::Pushforward(p) => Command::Pushforward(p),
            Cmd::F2Vanish(p) => Command::F2Vanish(p),
            Cmd::All => Command::All,
        }),
        (None, None) => return Err("a subcommand or --config is required (see --help)".into()),
    };
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.cap.is_some() {
        cfg.cap = cli.cap;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cfg = match config(Cli::parse()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match wbar_harness::run(&cfg) {
        Ok(outcome) => {
            for s in &outcome.summaries {
                println!("{}: {} rows, {} violations, {} ms", s.suite, s.trials, s.violations, s.wall_time_ms);
            }
            for n in &outcome.notes {
                println!("{n}");
            }
            println!("reports written to {}", cfg.out.display());
            if outcome.violations() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
