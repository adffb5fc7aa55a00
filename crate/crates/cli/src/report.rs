use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::CliError;

/// A CSV table. Numeric cells are written in shortest round-trip form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(x) => format!("{x:e}"),
            Self::Int(n) => n.to_string(),
            Self::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Self::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Text(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Pass or fail of one tolerance check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub pass: bool,
}

impl Verdict {
    /// `value ≤ threshold`; NaN fails.
    pub fn at_most(check: &str, value: f64, threshold: f64) -> Self {
        Self {
            check: check.to_string(),
            value: Some(value),
            threshold: Some(threshold),
            pass: value <= threshold,
        }
    }

    pub fn holds(check: &str, pass: bool) -> Self {
        Self { check: check.to_string(), value: None, threshold: None, pass }
    }
}

/// What an experiment produced, before anything touches the disk.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
}

impl Outcome {
    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable result"));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// SHA-256 over the canonical JSON of results, verdicts and tables.
    /// Object keys are sorted, floats use shortest round-trip digits.
    pub fn hash(&self) -> String {
        let canonical = json!({
            "results": self.results,
            "verdicts": self.verdicts,
            "tables": self.tables,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Writes the CSV tables and `report.json` into `dir`; returns the report.
pub fn write(
    dir: &Path,
    config: &Config,
    outcome: &Outcome,
    threads: usize,
    wall_clock: f64,
) -> Result<Value, CliError> {
    fs::create_dir_all(dir)?;
    let experiment = experiment_name(config);
    let mut files = Vec::new();
    if config.output.wants_csv() {
        for t in &outcome.tables {
            let file = format!("{}.csv", t.name);
            write_csv(&dir.join(&file), experiment, config.model.seed(), t)?;
            files.push(file);
        }
    }
    files.push("report.json".to_string());
    let report = json!({
        "experiment": experiment,
        "anchor": crate::registry::find(experiment).map(|e| e.anchor),
        "config": config,
        "seed": config.model.seed(),
        "threads": threads,
        "results": outcome.results,
        "verdicts": outcome.verdicts,
        "all_pass": outcome.all_pass(),
        "files": files,
        "wall_clock_seconds": wall_clock,
        "results_hash": outcome.hash(),
    });
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}

fn write_csv(path: &Path, experiment: &str, seed: u64, table: &Table) -> Result<(), CliError> {
    let mut text = format!(
        "# wavelab csv v1; experiment={experiment}; table={}; seed={seed}; columns={}\n",
        table.name,
        table.columns.join("|")
    )
    .into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut text);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn experiment_name(config: &Config) -> &'static str {
    use crate::config::ExperimentConfig as E;
    match &config.experiment {
        E::GreenResidual(_) => "green_residual",
        E::Vishik(_) => "vishik",
        E::AlphaOracle(_) => "alpha_oracle",
        E::Representation(_) => "representation",
        E::Duality(_) => "duality",
        E::FsMembership(_) => "fs_membership",
        E::WaveSupport(_) => "wave_support",
        E::LocalControllability(_) => "local_controllability",
        E::GrowthProfile(_) => "growth_profile",
        E::Splitting(_) => "splitting",
        E::Blagoveshchenskii(_) => "blagoveshchenskii",
        E::Completeness(_) => "completeness",
        E::InteriorDomain(_) => "interior_domain",
    }
}
