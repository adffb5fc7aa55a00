//! Batch runner: a JSON config names a model and an experiment; the run
//! writes `report.json` plus CSV tables and exits nonzero unless every
//! tolerance verdict passes.

pub mod config;
pub mod error;
pub mod registry;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::Config;
pub use error::CliError;
pub use report::Outcome;

/// Command-line overrides of the config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

pub struct RunSummary {
    pub report: serde_json::Value,
    pub all_pass: bool,
    pub dir: PathBuf,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = Config::from_json(&text)?;
    if let Some(seed) = overrides.seed {
        cfg.model.set_seed(seed);
    }
    if let Some(dir) = &overrides.out {
        cfg.output.dir = dir.clone();
    }
    Ok(cfg)
}

/// Validates, runs on a pool of the requested size and writes the outputs.
pub fn run_config(cfg: &Config, threads: Option<usize>) -> Result<RunSummary, CliError> {
    run::validate(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let outcome = pool.install(|| -> Result<Outcome, CliError> {
        let model = cfg.model.build()?;
        run::execute(cfg, &model)
    })?;
    let wall = start.elapsed().as_secs_f64();
    let report = report::write(&cfg.output.dir, cfg, &outcome, pool.current_num_threads(), wall)?;
    Ok(RunSummary { all_pass: outcome.all_pass(), report, dir: cfg.output.dir.clone() })
}
