//! Experiment configuration: a JSON document with `model`, `experiment` and
//! `output` sections. Every experiment parameter has a default, so the
//! smallest config only names the model and the experiment.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use wavelab_core::model::Model;
use wavelab_core::numerics::Matrix;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelConfig,
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Matrices are given as lists of columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Interval {
        n_modes: usize,
        #[serde(default)]
        seed: u64,
    },
    Mock {
        l: Vec<Vec<f64>>,
        k_basis: Vec<Vec<f64>>,
        complement: Vec<Vec<f64>>,
        #[serde(default)]
        seed: u64,
    },
}

impl ModelConfig {
    pub fn seed(&self) -> u64 {
        match self {
            Self::Interval { seed, .. } | Self::Mock { seed, .. } => *seed,
        }
    }

    pub fn set_seed(&mut self, value: u64) {
        match self {
            Self::Interval { seed, .. } | Self::Mock { seed, .. } => *seed = value,
        }
    }

    pub fn is_mock(&self) -> bool {
        matches!(self, Self::Mock { .. })
    }

    pub fn build(&self) -> Result<Model<f64>, CliError> {
        let model = match self {
            Self::Interval { n_modes, .. } => {
                if *n_modes == 0 {
                    return Err(CliError::Config("interval model needs n_modes ≥ 1".into()));
                }
                Model::interval(*n_modes)?
            }
            Self::Mock { l, k_basis, complement, .. } => {
                let cols = |c: &[Vec<f64>], what: &str| -> Result<Matrix<f64>, CliError> {
                    let n = l.len();
                    if c.iter().any(|v| v.len() != n) {
                        return Err(CliError::Config(format!("every {what} column needs length {n}")));
                    }
                    Ok(if c.is_empty() { Matrix::zeros(n, 0) } else { Matrix::from_columns(c) })
                };
                Model::mock(cols(l, "l")?, cols(k_basis, "k_basis")?, cols(complement, "complement")?)?
            }
        };
        Ok(model)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Any of `json`, `csv`. The JSON report is always written.
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("wavelab-out"),
            formats: vec!["json".into(), "csv".into()],
        }
    }
}

impl OutputConfig {
    pub fn wants_csv(&self) -> bool {
        self.formats.iter().any(|f| f == "csv")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ExperimentConfig {
    GreenResidual(GreenParams),
    Vishik(VishikParams),
    AlphaOracle(AlphaOracleParams),
    Representation(RepresentationParams),
    Duality(DualityParams),
    FsMembership(FsParams),
    WaveSupport(WaveSupportParams),
    LocalControllability(LocalControllabilityParams),
    GrowthProfile(GrowthParams),
    Splitting(SplittingParams),
    Blagoveshchenskii(BlagoveshchenskiiParams),
    Completeness(CompletenessParams),
    InteriorDomain(InteriorParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreenParams {
    /// Random pairs: ambient vectors (mock) or polynomials (interval).
    pub pairs: usize,
    /// Optional fixed pair, ambient vectors or polynomial coefficients.
    pub u: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    /// Defaults to 1e−12 (mock) or 1e−8 (interval).
    pub tol: Option<f64>,
}

impl Default for GreenParams {
    fn default() -> Self {
        Self { pairs: 100, u: None, v: None, tol: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VishikParams {
    /// Polynomial coefficients (interval) or an ambient vector (mock).
    pub y: Vec<f64>,
    pub tol: f64,
}

impl Default for VishikParams {
    fn default() -> Self {
        Self { y: vec![0.0, 1.0, -1.0], tol: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaOracleParams {
    pub t: f64,
    pub dt: f64,
    /// Each level doubles the modes and halves `dt`.
    pub refinements: usize,
    pub n_cells: usize,
    pub tol: f64,
}

impl Default for AlphaOracleParams {
    fn default() -> Self {
        Self { t: 0.4, dt: 1e-3, refinements: 2, n_cells: 2048, tol: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepresentationParams {
    pub t_final: f64,
    pub dt: f64,
    pub tol: f64,
}

impl Default for RepresentationParams {
    fn default() -> Self {
        Self { t_final: 1.0, dt: 1e-3, tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityParams {
    pub triples: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub dt: f64,
    /// Defaults to 1e−10 (mock) or 1e−6 (interval).
    pub tol: Option<f64>,
}

impl Default for DualityParams {
    fn default() -> Self {
        Self { triples: 20, t_min: 0.5, t_max: 1.5, dt: 5e-4, tol: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsParams {
    pub sigma: f64,
    pub tau: f64,
    pub times: Vec<f64>,
    pub dt: f64,
    pub n_cells: usize,
    pub margin: usize,
    /// Also run with doubled modes and halved `dt` and require both
    /// leakage columns not to grow.
    pub refine: bool,
    pub tol: f64,
}

impl Default for FsParams {
    fn default() -> Self {
        Self {
            sigma: 0.1,
            tau: 0.2,
            times: vec![0.02, 0.04, 0.06, 0.08],
            dt: 1e-3,
            n_cells: 2048,
            margin: 2,
            refine: true,
            tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveSupportParams {
    pub times: Vec<f64>,
    pub dt: f64,
    pub n_cells: usize,
    pub margin: usize,
    pub tol: f64,
}

impl Default for WaveSupportParams {
    fn default() -> Self {
        Self { times: vec![0.1, 0.3], dt: 1e-3, n_cells: 2048, margin: 2, tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalControllabilityParams {
    pub tau: f64,
    pub n_samples: usize,
    pub dt: f64,
    pub n_cells: usize,
    pub tol: f64,
}

impl Default for LocalControllabilityParams {
    fn default() -> Self {
        Self { tau: 0.25, n_samples: 64, dt: 1e-3, n_cells: 2048, tol: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthParams {
    pub taus: Vec<f64>,
    /// Controls drawn; defaults to enough waves to fill the frame.
    pub n_samples: Option<usize>,
    pub dt: f64,
    /// Highest control frequency; defaults to the top eigenfrequency,
    /// but at least the sampler default.
    pub omega_max: Option<f64>,
    pub n_terms: usize,
    pub ramp_width: f64,
    pub rank_tol: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        Self {
            taus: vec![0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.6, 0.8, 1.0],
            n_samples: None,
            dt: 2.5e-4,
            omega_max: None,
            n_terms: 24,
            ramp_width: 0.01,
            rank_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingParams {
    pub t_final: f64,
    pub n_intervals: usize,
    pub tol: f64,
}

impl Default for SplittingParams {
    fn default() -> Self {
        Self { t_final: 2.0, n_intervals: 50, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlagoveshchenskiiParams {
    pub t_max: f64,
    pub n_intervals: usize,
    pub stride: usize,
    pub tol: f64,
    /// Accepted range of the PDE residual ratio under halving `h`.
    pub order_ratio: [f64; 2],
}

impl Default for BlagoveshchenskiiParams {
    fn default() -> Self {
        Self { t_max: 2.0, n_intervals: 200, stride: 10, tol: 1e-6, order_ratio: [3.5, 4.5] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompletenessParams {
    pub tau: f64,
    pub t: f64,
    pub n_sources: usize,
    pub dt: f64,
    pub reg_width_steps: usize,
    pub n_cells: usize,
    pub n_basis: usize,
    pub n_targets: usize,
    /// Also run with twice the sources and require a smaller angle.
    pub doubling: bool,
    pub tol: f64,
    pub impulse_tol: f64,
}

impl Default for CompletenessParams {
    fn default() -> Self {
        Self {
            tau: 0.1,
            t: 0.1,
            n_sources: 128,
            dt: 1e-3,
            reg_width_steps: 4,
            n_cells: 2048,
            n_basis: 12,
            n_targets: 6,
            doubling: true,
            tol: 0.1,
            impulse_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteriorParams {
    pub tau: f64,
    pub tol: f64,
}

impl Default for InteriorParams {
    fn default() -> Self {
        Self { tau: 0.25, tol: 1e-8 }
    }
}

impl Config {
    pub fn with_output_dir(mut self, dir: &std::path::Path) -> Self {
        self.output.dir = dir.to_path_buf();
        self
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        if let Some(name) = value.pointer("/experiment/name").and_then(|v| v.as_str()) {
            if crate::registry::find(name).is_none() {
                return Err(CliError::UnknownExperiment(name.to_string()));
            }
        }
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
    }
}
