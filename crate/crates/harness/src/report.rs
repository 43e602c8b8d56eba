use std::path::Path;

use serde::{Deserialize, Serialize};
use ustash_core::model::{HArgmin, ModelPoint, SurfacePoint};
use ustash_core::sim::{RunMetrics, ScenarioResult};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// RFC 3339, UTC.
    pub generated_at: String,
}

impl Provenance {
    pub fn now() -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    /// `generated` or the path the trace was read from.
    pub source: String,
    pub requests: u64,
    pub video_requests: u64,
    pub unique_contents: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub expected_unique: f64,
    pub expected_hit_rate: f64,
    pub x_optimal: f64,
    pub x_optimal_capped: bool,
    pub bandwidth_ordering_holds: bool,
    #[serde(rename = "expected_T_user_only_s")]
    pub expected_t_user_only_s: f64,
    #[serde(rename = "expected_T_stash_only_s")]
    pub expected_t_stash_only_s: f64,
    #[serde(rename = "expected_T_min_s")]
    pub expected_t_min_s: f64,
    pub h_argmin: HArgmin,
}

/// One point of a split sweep: the model curve next to a simulation with a
/// fixed split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XSweepRow {
    pub x: f64,
    #[serde(rename = "model_T_s")]
    pub model_t_s: f64,
    #[serde(rename = "sim_T_s")]
    pub sim_t_s: Option<f64>,
    pub sim_hit_rate: Option<f64>,
    pub sim_misses: Option<u64>,
    pub model_cost_user_cents: f64,
    pub model_cost_stash_cents: f64,
    pub sim_cost_user_cents: Option<f64>,
    pub sim_cost_stash_cents: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitRatePoint {
    pub requests: u64,
    pub hit_rate: f64,
    pub partial_hit_rate: f64,
    pub byte_hit_rate: f64,
    /// Expected fraction of requests for an item seen before.
    pub model_repeat_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SSweepRow {
    pub s: f64,
    pub n_requests: u64,
    pub hit_rate: f64,
    pub partial_hit_rate: f64,
    pub byte_hit_rate: f64,
    pub unique_contents: u64,
    pub model_repeat_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RvSweepRow {
    pub r_v: f64,
    pub n_requests: u64,
    pub hit_rate: f64,
    pub partial_hit_rate: f64,
    pub byte_hit_rate: f64,
    pub video_requests: u64,
    pub video_hit_rate: f64,
    pub video_partial_hit_rate: f64,
    pub video_byte_hit_rate: f64,
}

/// Everything one invocation computed. Tables that were not requested stay
/// empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub config: ExperimentConfig,
    /// The same configuration as loadable TOML.
    pub config_toml: String,
    pub trace: Option<TraceSummary>,
    pub model: Option<ModelSummary>,
    pub simulation: Option<RunMetrics>,
    pub scenarios: Vec<ScenarioResult>,
    pub model_curve: Vec<ModelPoint>,
    pub hit_rate_curve: Vec<HitRatePoint>,
    pub x_sweep: Vec<XSweepRow>,
    pub s_sweep: Vec<SSweepRow>,
    pub rv_sweep: Vec<RvSweepRow>,
    pub h_surface: Vec<SurfacePoint>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Report {
            provenance: Provenance::now(),
            config: config.clone(),
            config_toml: config.to_toml(),
            trace: None,
            model: None,
            simulation: None,
            scenarios: Vec::new(),
            model_curve: Vec::new(),
            hit_rate_curve: Vec::new(),
            x_sweep: Vec::new(),
            s_sweep: Vec::new(),
            rv_sweep: Vec::new(),
            h_surface: Vec::new(),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(HarnessError::io(path))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)
            .map_err(|e| HarnessError::Core(e.into()))?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(HarnessError::io(path))?;
        serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| HarnessError::Core(e.into()))
    }
}
