//! Experiment configuration: a TOML document of dotted keys, every key
//! optional. See `docs/config.md` for the key reference.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ustash_core::model::{CostParams, Gammas, ModelParams, NetworkParams};
use ustash_core::sim::{default_scenarios, HitTime, ScenarioRegistry, SimParams, SplitPolicy};
use ustash_core::units::{parse_bandwidth, parse_cost, parse_size};
use ustash_core::workload::{
    requests_for_non_video_volume, ClassWorkload, SizeParams, ViewParams, WorkloadConfig, ZipfParams,
    REFERENCE_NON_VIDEO_REQUESTS,
};

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    X,
    S,
    #[value(name = "r_v")]
    RV,
    #[value(name = "omega_ratio")]
    OmegaRatio,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::X => "x",
            SweepParam::S => "s",
            SweepParam::RV => "r_v",
            SweepParam::OmegaRatio => "omega_ratio",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "x" => SweepParam::X,
            "s" => SweepParam::S,
            "r_v" => SweepParam::RV,
            "omega_ratio" => SweepParam::OmegaRatio,
            _ => return None,
        })
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParam::X => (0..=20).map(|i| i as f64 / 20.0).collect(),
            SweepParam::S => vec![0.5, 0.716, 1.0, 1.5, 2.0],
            SweepParam::RV => vec![1.0, 50.0, 100.0, 200.0, 400.0],
            SweepParam::OmegaRatio => (1..=80).map(|i| i as f64 / 80.0).collect(),
        }
    }

    /// Checks one grid value against the parameter's domain.
    pub fn check(self, v: f64) -> Result<(), String> {
        let ok = v.is_finite()
            && match self {
                SweepParam::X => (0.0..=1.0).contains(&v),
                SweepParam::S => v >= 0.0,
                SweepParam::RV | SweepParam::OmegaRatio => v > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(format!("{v} is outside the domain of `{}`", self.as_str()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Fully resolved configuration. Bandwidths MB/s, sizes MB, costs cents/MB.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub format: OutputFormat,
    /// Trace file to replay instead of generating one.
    pub trace: Option<PathBuf>,
    pub n_requests: u64,
    pub r_v: f64,
    pub constant_sizes: bool,
    pub sample_interval: u64,
    pub hit_time: HitTime,
    pub zipf_s: f64,
    pub m_non_video: u64,
    pub m_video: u64,
    pub m_model: u64,
    pub size_non_video: SizeParams,
    pub size_video: SizeParams,
    pub lambda_e_video: f64,
    pub lambda_e_model: f64,
    pub net: NetworkParams,
    pub cost: CostParams,
    pub model_n: u64,
    pub model_mean_size_mb: f64,
    pub gammas: Gammas,
    pub policy: String,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub scenarios: Vec<String>,
    pub sweep: Option<SweepSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let w = WorkloadConfig::default();
        let m = ModelParams::default();
        ExperimentConfig {
            seed: w.seed,
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
            trace: None,
            n_requests: w.n_requests,
            r_v: w.r_v,
            constant_sizes: false,
            sample_interval: 5000,
            hit_time: HitTime::Consumed,
            zipf_s: w.non_video.zipf.s,
            m_non_video: w.non_video.zipf.m,
            m_video: w.video.zipf.m,
            m_model: m.zipf.m,
            size_non_video: w.non_video.size,
            size_video: w.video.size,
            lambda_e_video: w.video.view.lambda_e,
            lambda_e_model: m.lambda_e,
            net: m.net,
            cost: m.cost,
            model_n: m.n,
            model_mean_size_mb: m.mean_size_mb,
            gammas: m.gammas,
            policy: "optimal".into(),
            x_min: None,
            x_max: None,
            scenarios: default_scenarios(),
            sweep: None,
        }
    }
}

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "seed",
    "out",
    "format",
    "trace",
    "n_requests",
    "r_v",
    "constant_sizes",
    "sample_interval",
    "hit_time",
    "zipf.s",
    "zipf.m_non_video",
    "zipf.m_video",
    "zipf.m_model",
    "size.non_video.shape",
    "size.non_video.scale",
    "size.video.shape",
    "size.video.scale",
    "view.lambda_e_video",
    "view.lambda_e_model",
    "omega_u",
    "omega_b",
    "omega_l",
    "phi_u",
    "phi_b",
    "model.n",
    "model.mean_size",
    "gamma.t",
    "gamma.b",
    "gamma.u",
    "policy.kind",
    "policy.x_min",
    "policy.x_max",
    "scenarios",
    "sweep.param",
    "sweep.values",
];

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

fn domain(key: &str, msg: impl Into<String>) -> HarnessError {
    HarnessError::Domain {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64, HarnessError> {
    let x = match v {
        toml::Value::Float(f) => *f,
        toml::Value::Integer(i) => *i as f64,
        other => return Err(domain(key, format!("expected a number, got {}", other.type_str()))),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(domain(key, format!("{x} is not finite")))
    }
}

fn positive(key: &str, v: &toml::Value) -> Result<f64, HarnessError> {
    let x = as_f64(key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(domain(key, format!("{x} must be > 0")))
    }
}

fn non_negative(key: &str, v: &toml::Value) -> Result<f64, HarnessError> {
    let x = as_f64(key, v)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(domain(key, format!("{x} must be >= 0")))
    }
}

fn ratio(key: &str, v: &toml::Value) -> Result<f64, HarnessError> {
    let x = as_f64(key, v)?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(domain(key, format!("{x} must be in [0, 1]")))
    }
}

fn count(key: &str, v: &toml::Value, min: i64) -> Result<u64, HarnessError> {
    match v {
        toml::Value::Integer(i) if *i >= min => Ok(*i as u64),
        toml::Value::Integer(i) => Err(domain(key, format!("{i} must be >= {min}"))),
        other => Err(domain(key, format!("expected an integer, got {}", other.type_str()))),
    }
}

fn string<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str, HarnessError> {
    v.as_str()
        .ok_or_else(|| domain(key, format!("expected a string, got {}", v.type_str())))
}

/// A number in the base unit, or a string with a unit suffix.
fn with_unit(
    key: &str,
    v: &toml::Value,
    parse: fn(&str) -> Result<f64, ustash_core::units::UnitError>,
) -> Result<f64, HarnessError> {
    let x = match v {
        toml::Value::String(s) => parse(s).map_err(|e| domain(key, e.to_string()))?,
        other => as_f64(key, other)?,
    };
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(domain(key, format!("{x} must be >= 0")))
    }
}

fn positive_with_unit(
    key: &str,
    v: &toml::Value,
    parse: fn(&str) -> Result<f64, ustash_core::units::UnitError>,
) -> Result<f64, HarnessError> {
    let x = with_unit(key, v, parse)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(domain(key, "must be > 0"))
    }
}

#[derive(Default)]
struct Pending {
    n_requests: Option<u64>,
    m_model: Option<u64>,
    model_mean_size: Option<f64>,
    sweep_param: Option<SweepParam>,
    sweep_values: Option<Vec<f64>>,
}

impl ExperimentConfig {
    /// Reads and resolves a config file.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Parse { msg, .. } => HarnessError::Parse {
                origin: path.display().to_string(),
                msg,
            },
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Parse {
            origin: "config".into(),
            msg: e.to_string(),
        })?;
        let mut entries = Vec::new();
        flatten("", &table, &mut entries);
        let mut cfg = ExperimentConfig::default();
        let mut pending = Pending::default();
        for (key, value) in &entries {
            cfg.apply(key, value, &mut pending)?;
        }
        cfg.resolve(pending)?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, v: &toml::Value, p: &mut Pending) -> Result<(), HarnessError> {
        match key {
            "seed" => self.seed = count(key, v, 0)?,
            "out" => self.out = PathBuf::from(string(key, v)?),
            "format" => {
                self.format = match string(key, v)? {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => return Err(domain(key, format!("`{other}` is not csv or json"))),
                }
            }
            "trace" => self.trace = Some(PathBuf::from(string(key, v)?)),
            "n_requests" => p.n_requests = Some(count(key, v, 1)?),
            "r_v" => self.r_v = positive(key, v)?,
            "constant_sizes" => {
                self.constant_sizes = v.as_bool().ok_or_else(|| domain(key, "expected true or false"))?
            }
            "sample_interval" => self.sample_interval = count(key, v, 0)?,
            "hit_time" => {
                self.hit_time = match string(key, v)? {
                    "consumed" => HitTime::Consumed,
                    "full_size" | "full-size" => HitTime::FullSize,
                    other => return Err(domain(key, format!("`{other}` is not consumed or full_size"))),
                }
            }
            "zipf.s" => self.zipf_s = non_negative(key, v)?,
            "zipf.m_non_video" => self.m_non_video = count(key, v, 1)?,
            "zipf.m_video" => self.m_video = count(key, v, 1)?,
            "zipf.m_model" => p.m_model = Some(count(key, v, 1)?),
            "size.non_video.shape" => self.size_non_video.shape = positive(key, v)?,
            "size.non_video.scale" => self.size_non_video.scale = positive_with_unit(key, v, parse_size)?,
            "size.video.shape" => self.size_video.shape = positive(key, v)?,
            "size.video.scale" => self.size_video.scale = positive_with_unit(key, v, parse_size)?,
            "view.lambda_e_video" => self.lambda_e_video = positive(key, v)?,
            "view.lambda_e_model" => self.lambda_e_model = positive(key, v)?,
            "omega_u" => self.net.omega_u = positive_with_unit(key, v, parse_bandwidth)?,
            "omega_b" => self.net.omega_b = positive_with_unit(key, v, parse_bandwidth)?,
            "omega_l" => self.net.omega_l = positive_with_unit(key, v, parse_bandwidth)?,
            "phi_u" => self.cost.phi_u = with_unit(key, v, parse_cost)?,
            "phi_b" => self.cost.phi_b = with_unit(key, v, parse_cost)?,
            "model.n" => self.model_n = count(key, v, 1)?,
            "model.mean_size" => p.model_mean_size = Some(positive_with_unit(key, v, parse_size)?),
            "gamma.t" => self.gammas.t = non_negative(key, v)?,
            "gamma.b" => self.gammas.b = non_negative(key, v)?,
            "gamma.u" => self.gammas.u = non_negative(key, v)?,
            "policy.kind" => {
                let spec = string(key, v)?;
                SplitPolicy::parse(spec).map_err(|e| domain(key, e.to_string()))?;
                self.policy = spec.to_string();
            }
            "policy.x_min" => self.x_min = Some(ratio(key, v)?),
            "policy.x_max" => self.x_max = Some(ratio(key, v)?),
            "scenarios" => {
                let arr = v.as_array().ok_or_else(|| domain(key, "expected an array of names"))?;
                let reg = ScenarioRegistry::default();
                self.scenarios = arr
                    .iter()
                    .map(|s| {
                        let name = string(key, s)?;
                        reg.get(name).map_err(|e| domain(key, e.to_string()))?;
                        Ok(name.to_string())
                    })
                    .collect::<Result<_, HarnessError>>()?;
                if self.scenarios.is_empty() {
                    return Err(domain(key, "at least one scenario"));
                }
            }
            "sweep.param" => {
                let s = string(key, v)?;
                p.sweep_param = Some(
                    SweepParam::parse(s)
                        .ok_or_else(|| domain(key, format!("`{s}` is not one of x, s, r_v, omega_ratio")))?,
                );
            }
            "sweep.values" => {
                let arr = v.as_array().ok_or_else(|| domain(key, "expected an array of numbers"))?;
                p.sweep_values = Some(arr.iter().map(|x| as_f64(key, x)).collect::<Result<_, _>>()?);
            }
            other => return Err(HarnessError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    fn resolve(&mut self, p: Pending) -> Result<(), HarnessError> {
        self.n_requests = p
            .n_requests
            .unwrap_or_else(|| requests_for_non_video_volume(REFERENCE_NON_VIDEO_REQUESTS, self.r_v));
        self.m_model = p.m_model.unwrap_or(self.m_non_video);
        if let Some(m) = p.model_mean_size {
            self.model_mean_size_mb = m;
        } else {
            self.model_mean_size_mb = self.size_non_video.mean();
        }
        self.sweep = match (p.sweep_param, p.sweep_values) {
            (Some(param), values) => Some(SweepSpec {
                param,
                values: values.unwrap_or_else(|| param.default_values()),
            }),
            (None, Some(_)) => return Err(domain("sweep.values", "given without sweep.param")),
            (None, None) => None,
        };
        self.validate()
    }

    /// Cross-field checks; per-key checks happen while reading.
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.split_policy().map_err(|e| domain("policy.x_min", e.to_string()))?;
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(domain("sweep.values", "empty grid"));
            }
            for &v in &sw.values {
                sw.param.check(v).map_err(|m| domain("sweep.values", m))?;
            }
        }
        self.workload().validate().map_err(|e| domain("workload", e.to_string()))?;
        self.model_params().validate().map_err(|e| domain("model", e.to_string()))?;
        Ok(())
    }

    pub fn workload(&self) -> WorkloadConfig {
        WorkloadConfig {
            non_video: ClassWorkload {
                zipf: ZipfParams {
                    s: self.zipf_s,
                    m: self.m_non_video,
                },
                size: self.size_non_video,
                view: ViewParams { lambda_e: 1.0 },
            },
            video: ClassWorkload {
                zipf: ZipfParams {
                    s: self.zipf_s,
                    m: self.m_video,
                },
                size: self.size_video,
                view: ViewParams {
                    lambda_e: self.lambda_e_video,
                },
            },
            r_v: self.r_v,
            n_requests: self.n_requests,
            seed: self.seed,
            constant_sizes: self.constant_sizes,
        }
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            zipf: ZipfParams {
                s: self.zipf_s,
                m: self.m_model,
            },
            mean_size_mb: self.model_mean_size_mb,
            lambda_e: self.lambda_e_model,
            n: self.model_n,
            net: self.net,
            cost: self.cost,
            gammas: self.gammas,
        }
    }

    pub fn sim_params(&self) -> SimParams {
        SimParams {
            net: self.net,
            cost: self.cost,
            hit_time: self.hit_time,
        }
    }

    pub fn split_policy(&self) -> ustash_core::Result<SplitPolicy> {
        SplitPolicy::parse(&self.policy)?.with_bounds(self.x_min, self.x_max)
    }

    /// Resolved configuration as dotted-key TOML. Loading it reproduces this
    /// configuration exactly.
    pub fn to_toml(&self) -> String {
        use toml::Value as V;
        let f = |x: f64| V::Float(x);
        let i = |x: u64| V::Integer(x as i64);
        let s = |x: &str| V::String(x.to_string());
        let mut rows: Vec<(&str, V)> = vec![
            ("seed", i(self.seed)),
            ("out", s(&self.out.display().to_string())),
            ("format", s(self.format.as_str())),
        ];
        if let Some(t) = &self.trace {
            rows.push(("trace", s(&t.display().to_string())));
        }
        rows.extend([
            ("n_requests", i(self.n_requests)),
            ("r_v", f(self.r_v)),
            ("constant_sizes", V::Boolean(self.constant_sizes)),
            ("sample_interval", i(self.sample_interval)),
            (
                "hit_time",
                s(match self.hit_time {
                    HitTime::Consumed => "consumed",
                    HitTime::FullSize => "full_size",
                }),
            ),
            ("zipf.s", f(self.zipf_s)),
            ("zipf.m_non_video", i(self.m_non_video)),
            ("zipf.m_video", i(self.m_video)),
            ("zipf.m_model", i(self.m_model)),
            ("size.non_video.shape", f(self.size_non_video.shape)),
            ("size.non_video.scale", f(self.size_non_video.scale)),
            ("size.video.shape", f(self.size_video.shape)),
            ("size.video.scale", f(self.size_video.scale)),
            ("view.lambda_e_video", f(self.lambda_e_video)),
            ("view.lambda_e_model", f(self.lambda_e_model)),
            ("omega_u", f(self.net.omega_u)),
            ("omega_b", f(self.net.omega_b)),
            ("omega_l", f(self.net.omega_l)),
            ("phi_u", f(self.cost.phi_u)),
            ("phi_b", f(self.cost.phi_b)),
            ("model.n", i(self.model_n)),
            ("model.mean_size", f(self.model_mean_size_mb)),
            ("gamma.t", f(self.gammas.t)),
            ("gamma.b", f(self.gammas.b)),
            ("gamma.u", f(self.gammas.u)),
            ("policy.kind", s(&self.policy)),
        ]);
        if let Some(x) = self.x_min {
            rows.push(("policy.x_min", f(x)));
        }
        if let Some(x) = self.x_max {
            rows.push(("policy.x_max", f(x)));
        }
        rows.push((
            "scenarios",
            V::Array(self.scenarios.iter().map(|n| s(n)).collect()),
        ));
        if let Some(sw) = &self.sweep {
            rows.push(("sweep.param", s(sw.param.as_str())));
            rows.push(("sweep.values", V::Array(sw.values.iter().map(|&v| f(v)).collect())));
        }
        let mut out = String::from("# resolved configuration: bandwidths MB/s, sizes MB, costs cents/MB\n");
        for (k, v) in rows {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.net.omega_u, 0.0625);
        assert_eq!(cfg.net.omega_b, 0.1);
        assert_eq!(cfg.net.omega_l, 0.75);
        assert_eq!(cfg.cost.phi_u, 10.0);
        assert_eq!(cfg.n_requests, 122_135);
    }

    #[test]
    fn units_are_resolved() {
        let cfg = ExperimentConfig::from_toml_str(
            "omega_u = \"500kbps\"\nomega_l = \"6 Mbps\"\nphi_b = \"3c/MB\"\nmodel.mean_size = \"2102KB\"",
        )
        .unwrap();
        assert_eq!(cfg.net.omega_u, 0.0625);
        assert_eq!(cfg.net.omega_l, 0.75);
        assert_eq!(cfg.cost.phi_b, 3.0);
        assert!((cfg.model_mean_size_mb - 2.102).abs() < 1e-12);
    }

    #[test]
    fn errors_are_classified() {
        assert!(matches!(
            ExperimentConfig::from_toml_str("zipf.s = -1"),
            Err(HarnessError::Domain { ref key, .. }) if key == "zipf.s"
        ));
        assert!(matches!(
            ExperimentConfig::from_toml_str("zipf.t = 1"),
            Err(HarnessError::UnknownKey(ref k)) if k == "zipf.t"
        ));
        assert!(matches!(
            ExperimentConfig::from_toml_str("seed = "),
            Err(HarnessError::Parse { .. })
        ));
        assert!(ExperimentConfig::from_toml_str("omega_u = \"fast\"").is_err());
        assert!(ExperimentConfig::from_toml_str("policy.x_min = 0.8\npolicy.x_max = 0.2").is_err());
        assert!(ExperimentConfig::from_toml_str("sweep.param = \"x\"\nsweep.values = [1.5]").is_err());
        assert!(ExperimentConfig::from_toml_str("scenarios = [\"teleport\"]").is_err());
        assert!(ExperimentConfig::from_toml_str("policy.kind = \"fixed:2\"").is_err());
    }

    #[test]
    fn nested_tables_are_the_same_keys() {
        let a = ExperimentConfig::from_toml_str("[zipf]\ns = 1.2\n[size.video]\nshape = 0.5").unwrap();
        let b = ExperimentConfig::from_toml_str("zipf.s = 1.2\nsize.video.shape = 0.5").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(
            "seed = 9\nr_v = 3.5\npolicy.kind = \"fixed:0.3\"\npolicy.x_max = 0.9\nsweep.param = \"r_v\"\nscenarios = [\"ustash\"]\nhit_time = \"full_size\"\ntrace = \"t.csv\"",
        )
        .unwrap();
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        let d = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml_str(&d.to_toml()).unwrap(), d);
    }
}
