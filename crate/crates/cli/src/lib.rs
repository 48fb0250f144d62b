//! Experiment harness for `wbar`: seeded random chains, the verification
//! suites, and their CSV/JSON reports.
//!
//! A run writes one CSV per suite into the output directory together with
//! `summary.json`, a list of `{suite, trials, violations, wall_time_ms}`
//! records. CSV files start with a `# schema: wbar/<suite> v1` comment line.

pub mod config;
pub mod error;
pub mod random;
pub mod report;
pub mod suites;

use std::path::Path;
use std::time::Instant;

use config::{
    Command, CompareParams, Context, DiffuseParams, ExperimentConfig, F2Params, GrowthParams, NormPair, NormsParams,
    PushforwardParams,
};
pub use error::HarnessError;
use report::SuiteSummary;
use suites::SuiteOutput;
use wbar::Exponent;

/// The outcome of one run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summaries: Vec<SuiteSummary>,
    pub notes: Vec<String>,
}

impl RunOutcome {
    pub fn violations(&self) -> usize {
        self.summaries.iter().filter(|s| s.suite != "all").map(|s| s.violations).sum()
    }
}

/// Runs one suite without touching the file system.
pub fn run_suite(ctx: &Context, command: &Command) -> Result<SuiteOutput, HarnessError> {
    match command {
        Command::Growth(p) => suites::growth::run(ctx, p),
        Command::Norms(p) => suites::norms::run(ctx, p),
        Command::Diffuse(p) => suites::diffuse::run(ctx, p),
        Command::ComparePq(p) => suites::compare::run(ctx, p),
        Command::Pushforward(p) => suites::pushforward::run(ctx, p),
        Command::F2Vanish(p) => suites::f2::run(ctx, p),
        Command::All => Err(HarnessError::Config("`all` is a battery, not a suite".into())),
    }
}

fn exps(list: &[&str]) -> Vec<Exponent> {
    list.iter().map(|s| s.parse().expect("literal exponent")).collect()
}

/// The fixed battery behind `all`, grouped by suite.
pub fn battery() -> Vec<Vec<Command>> {
    let growth = [("free:2", 6), ("abelian:2", 12), ("cyclic:7", 4), ("product:[free:1,cyclic:3]", 5)]
        .into_iter()
        .map(|(m, r)| Command::Growth(GrowthParams { model: m.into(), radius: r, growth_degree: None }))
        .collect();
    let norms = vec![
        Command::Norms(NormsParams { trials: 10, support: 6, ..Default::default() }),
        Command::Norms(NormsParams { model: "abelian:2".into(), degree: 1, radius: 4, trials: 10, ..Default::default() }),
    ];
    let compare = ["abelian:1", "abelian:2"]
        .into_iter()
        .map(|m| {
            Command::ComparePq(CompareParams {
                model: m.into(),
                degrees: vec![1, 2],
                weights: vec![0, 1],
                p: exps(&["1", "2", "2"]),
                q: exps(&["2", "4", "inf"]),
                trials: 5,
                support: 6,
                ..Default::default()
            })
        })
        .collect();
    let pushforward = [("abelian:2", "abelian:1", "1;0"), ("abelian:1", "cyclic:5", "1")]
        .into_iter()
        .map(|(s, t, i)| {
            Command::Pushforward(PushforwardParams {
                source: s.into(),
                target: t.into(),
                images: i.into(),
                degrees: vec![1, 2],
                weights: vec![0, 1],
                trials: 5,
                support: 6,
                ..Default::default()
            })
        })
        .collect();
    let diffuse_base = DiffuseParams {
        weights: vec![0, 1, 2],
        p: exps(&["2", "3/2"]),
        q: exps(&["4", "3"]),
        trials: 5,
        ..Default::default()
    };
    let diffuse = vec![
        Command::Diffuse(DiffuseParams { radius: 2, ..diffuse_base.clone() }),
        Command::Diffuse(DiffuseParams { degree: 2, radius: 2, max_diameter: Some(2), ..diffuse_base.clone() }),
        Command::Diffuse(DiffuseParams { model: "abelian:2".into(), annulus_degree: 3, radius: 2, ..diffuse_base }),
    ];
    let f2 = vec![Command::F2Vanish(F2Params {
        levels: 5,
        norms: ["0:3", "0:2", "1:3"].iter().map(|s| s.parse::<NormPair>().expect("literal pair")).collect(),
    })];
    vec![growth, norms, compare, pushforward, diffuse, f2]
}

fn write_output(dir: &Path, out: &SuiteOutput) -> Result<(), HarnessError> {
    for t in &out.tables {
        std::fs::write(dir.join(t.file_name()), t.to_csv()?)?;
    }
    for (name, bytes) in &out.files {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// Executes `config`, writing reports into `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let ctx = Context { seed: config.seed, cap: config.effective_cap()? };
    std::fs::create_dir_all(&config.out)?;
    let mut summaries = Vec::new();
    let mut notes = Vec::new();
    let groups = match &config.command {
        Command::All => battery(),
        other => vec![vec![other.clone()]],
    };
    let total_start = Instant::now();
    let mut index = 0u64;
    for group in groups {
        let start = Instant::now();
        let name = group[0].name();
        let mut merged = SuiteOutput::default();
        for (position, command) in group.iter().enumerate() {
            let sub = if matches!(config.command, Command::All) { ctx.derive(index) } else { ctx };
            index += 1;
            let mut out = run_suite(&sub, command)?;
            // several diffuse runs would share one JSON report name
            if group.len() > 1 {
                for (file, _) in out.files.iter_mut() {
                    *file = file.replace(".json", &format!("-{}.json", position + 1));
                }
            }
            merged.absorb(out);
        }
        write_output(&config.out, &merged)?;
        summaries.push(SuiteSummary {
            suite: name.into(),
            trials: merged.trials(),
            violations: merged.violations(),
            wall_time_ms: start.elapsed().as_millis(),
        });
        notes.extend(merged.notes);
    }
    if matches!(config.command, Command::All) {
        summaries.push(SuiteSummary {
            suite: "all".into(),
            trials: summaries.iter().map(|s| s.trials).sum(),
            violations: summaries.iter().map(|s| s.violations).sum(),
            wall_time_ms: total_start.elapsed().as_millis(),
        });
    }
    std::fs::write(config.out.join("summary.json"), serde_json::to_vec_pretty(&summaries)?)?;
    Ok(RunOutcome { summaries, notes })
}
