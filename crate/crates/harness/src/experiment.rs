//! Runs the pieces of an experiment and collects them into a [`Report`].
//! Sweep points run in parallel; results keep the order of the grid.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use ustash_core::model::{h_surface, AnalyticModel, CostMode, ModelPoint};
use ustash_core::sim::{compare_scenarios, simulate, RunConfig, RunOutput, ScenarioRegistry, ScenarioResult, SplitPolicy};
use ustash_core::workload::{expected_unique, ContentClass, Trace, WorkloadConfig};

use crate::config::{ExperimentConfig, SweepParam, SweepSpec};
use crate::error::{HarnessError, Result};
use crate::report::{HitRatePoint, ModelSummary, Report, RvSweepRow, SSweepRow, TraceSummary, XSweepRow};

/// Split grid of the H surface.
pub const SURFACE_X_STEPS: usize = 100;

/// Grid of the model curve.
pub const MODEL_CURVE_STEPS: usize = 100;

/// Reads a trace file (`.json`, otherwise CSV) or generates one.
pub fn load_or_generate_trace(cfg: &ExperimentConfig) -> Result<(Trace, String)> {
    match &cfg.trace {
        Some(path) => Ok((read_trace(path)?, path.display().to_string())),
        None => Ok((Trace::generate(&cfg.workload())?, "generated".into())),
    }
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let file = std::fs::File::open(path).map_err(HarnessError::io(path))?;
    let reader = std::io::BufReader::new(file);
    let trace = if path.extension().is_some_and(|e| e == "json") {
        Trace::read_json(reader)?
    } else {
        Trace::read_csv(reader)?
    };
    Ok(trace)
}

pub fn summarize_trace(trace: &Trace, source: String) -> TraceSummary {
    TraceSummary {
        source,
        requests: trace.len() as u64,
        video_requests: trace.count_class(ContentClass::Video) as u64,
        unique_contents: trace.unique_contents() as u64,
    }
}

pub fn run_config(cfg: &ExperimentConfig, policy: SplitPolicy, record_outcomes: bool) -> RunConfig {
    RunConfig {
        sample_interval: cfg.sample_interval,
        record_outcomes,
        ..RunConfig::new(policy, cfg.sim_params())
    }
}

pub fn run_simulation(cfg: &ExperimentConfig, trace: &Trace, record_outcomes: bool) -> Result<RunOutput> {
    let rc = run_config(cfg, cfg.split_policy()?, record_outcomes);
    Ok(simulate(trace, &rc)?)
}

pub fn run_compare(cfg: &ExperimentConfig, trace: &Trace) -> Result<Vec<ScenarioResult>> {
    Ok(compare_scenarios(
        trace,
        &cfg.sim_params(),
        &ScenarioRegistry::default(),
        &cfg.scenarios,
        cfg.sample_interval,
    )?)
}

pub fn analytic_model(cfg: &ExperimentConfig) -> Result<AnalyticModel> {
    Ok(AnalyticModel::new(cfg.model_params())?)
}

pub fn model_summary(model: &AnalyticModel) -> Result<ModelSummary> {
    let xo = model.x_optimal();
    Ok(ModelSummary {
        expected_unique: model.expected_unique(),
        expected_hit_rate: model.hit_rate(),
        x_optimal: xo.value,
        x_optimal_capped: xo.capped,
        bandwidth_ordering_holds: model.params().net.ordering_holds(),
        expected_t_user_only_s: model.expected_completion(0.0)?,
        expected_t_stash_only_s: model.expected_completion(1.0)?,
        expected_t_min_s: model.expected_completion_min(),
        h_argmin: model.h_argmin()?,
    })
}

pub fn model_curve(model: &AnalyticModel, steps: usize) -> Result<Vec<ModelPoint>> {
    Ok(model.curve(steps)?)
}

/// Expected fraction of `n` requests that repeat an earlier item, with the
/// two classes mixed as in `w`.
pub fn model_repeat_rate(w: &WorkloadConfig, n: u64) -> f64 {
    let p_video = w.video_probability();
    let n_video = (n as f64 * p_video).round() as u64;
    let n_non_video = n - n_video.min(n);
    let unique = expected_unique(&w.non_video.zipf, n_non_video) + expected_unique(&w.video.zipf, n_video);
    ((n as f64 - unique) / n as f64).max(0.0)
}

/// Cumulative hit-rate samples of a run, with the analytic repeat rate at
/// each sample.
pub fn hit_rate_curve(cfg: &ExperimentConfig, output: &RunOutput) -> Vec<HitRatePoint> {
    let w = cfg.workload();
    output
        .metrics
        .hit_rate_series
        .par_iter()
        .map(|p| HitRatePoint {
            requests: p.requests,
            hit_rate: p.hit_rate,
            partial_hit_rate: p.partial_hit_rate,
            byte_hit_rate: p.byte_hit_rate,
            model_repeat_rate: model_repeat_rate(&w, p.requests),
        })
        .collect()
}

/// Model completion time and costs at each split, next to a simulation of
/// the same trace with that split fixed.
pub fn sweep_x(cfg: &ExperimentConfig, model: &AnalyticModel, trace: Option<&Trace>, xs: &[f64]) -> Result<Vec<XSweepRow>> {
    xs.par_iter()
        .map(|&x| {
            let sim = match trace {
                Some(t) => {
                    let policy = SplitPolicy::parse(&format!("fixed:{x}"))?;
                    Some(simulate(t, &run_config(cfg, policy, false))?.metrics)
                }
                None => None,
            };
            Ok(XSweepRow {
                x,
                model_t_s: model.expected_completion(x)?,
                sim_t_s: sim.as_ref().map(|m| m.mean_completion_s),
                sim_hit_rate: sim.as_ref().map(|m| m.hit_rate),
                sim_misses: sim.as_ref().map(|m| m.misses),
                model_cost_user_cents: model.user_cost(x, CostMode::Approx)?,
                model_cost_stash_cents: model.stash_cost(x, CostMode::Approx)?,
                sim_cost_user_cents: sim.as_ref().map(|m| m.user_cost_cents),
                sim_cost_stash_cents: sim.as_ref().map(|m| m.stash_cost_cents),
            })
        })
        .collect()
}

/// Regenerates the trace at each popularity skew.
pub fn sweep_s(cfg: &ExperimentConfig, values: &[f64]) -> Result<Vec<SSweepRow>> {
    values
        .par_iter()
        .map(|&s| {
            let mut c = cfg.clone();
            c.zipf_s = s;
            let w = c.workload();
            let trace = Trace::generate(&w)?;
            let m = run_simulation(&c, &trace, false)?.metrics;
            Ok(SSweepRow {
                s,
                n_requests: m.total,
                hit_rate: m.hit_rate,
                partial_hit_rate: m.partial_hit_rate,
                byte_hit_rate: m.byte_hit_rate,
                unique_contents: m.unique_contents,
                model_repeat_rate: model_repeat_rate(&w, m.total),
            })
        })
        .collect()
}

/// Request count at mixing ratio `r_v` that keeps the configured expected
/// number of non-video requests.
pub fn requests_at_mixing_ratio(cfg: &ExperimentConfig, r_v: f64) -> u64 {
    let non_video = cfg.n_requests as f64 * cfg.r_v / (1.0 + cfg.r_v);
    (non_video * (1.0 + 1.0 / r_v)).round().max(1.0) as u64
}

/// Varies the video concentration over one shared catalog.
pub fn sweep_rv(cfg: &ExperimentConfig, values: &[f64]) -> Result<Vec<RvSweepRow>> {
    let catalog = Arc::new(Trace::catalog_for(&cfg.workload())?);
    values
        .par_iter()
        .map(|&r_v| {
            let mut c = cfg.clone();
            c.r_v = r_v;
            c.n_requests = requests_at_mixing_ratio(cfg, r_v);
            let trace = Trace::generate_with_catalog(catalog.clone(), &c.workload())?;
            let m = run_simulation(&c, &trace, false)?.metrics;
            let v = m.by_class.video;
            Ok(RvSweepRow {
                r_v,
                n_requests: m.total,
                hit_rate: m.hit_rate,
                partial_hit_rate: m.partial_hit_rate,
                byte_hit_rate: m.byte_hit_rate,
                video_requests: v.total,
                video_hit_rate: v.hit_rate,
                video_partial_hit_rate: v.partial_hit_rate,
                video_byte_hit_rate: v.byte_hit_rate,
            })
        })
        .collect()
}

pub fn surface_xs() -> Vec<f64> {
    (0..=SURFACE_X_STEPS).map(|i| i as f64 / SURFACE_X_STEPS as f64).collect()
}

/// Which parts of an experiment to run.
#[derive(Clone, Debug, Default)]
pub struct Plan {
    pub model: bool,
    pub simulate: bool,
    pub compare: bool,
    pub hit_rate_curve: bool,
    pub sweeps: Vec<SweepSpec>,
}

impl Plan {
    /// Every table behind the reproduced figures.
    pub fn everything() -> Self {
        Plan {
            model: true,
            simulate: true,
            compare: true,
            hit_rate_curve: true,
            sweeps: [SweepParam::X, SweepParam::S, SweepParam::RV, SweepParam::OmegaRatio]
                .into_iter()
                .map(|param| SweepSpec {
                    param,
                    values: param.default_values(),
                })
                .collect(),
        }
    }

    fn needs_trace(&self) -> bool {
        self.simulate || self.compare || self.hit_rate_curve || self.sweeps.iter().any(|s| s.param == SweepParam::X)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, plan: &Plan) -> Result<Report> {
    let mut report = Report::new(cfg);
    let trace = if plan.needs_trace() {
        let (t, source) = load_or_generate_trace(cfg)?;
        log::info!("trace {source}: {} requests, {} distinct items", t.len(), t.unique_contents());
        report.trace = Some(summarize_trace(&t, source));
        Some(t)
    } else {
        None
    };
    let model = if plan.model || !plan.sweeps.is_empty() {
        let m = analytic_model(cfg)?;
        report.model = Some(model_summary(&m)?);
        report.model_curve = model_curve(&m, MODEL_CURVE_STEPS)?;
        Some(m)
    } else {
        None
    };
    if let Some(trace) = &trace {
        if plan.simulate || plan.hit_rate_curve {
            let out = run_simulation(cfg, trace, false)?;
            if plan.hit_rate_curve {
                report.hit_rate_curve = hit_rate_curve(cfg, &out);
            }
            report.simulation = Some(out.metrics);
        }
        if plan.compare {
            report.scenarios = run_compare(cfg, trace)?;
        }
    }
    for sw in &plan.sweeps {
        log::info!("sweep {} over {} values", sw.param.as_str(), sw.values.len());
        for &v in &sw.values {
            sw.param.check(v).map_err(|msg| HarnessError::Domain {
                key: "sweep.values".into(),
                msg,
            })?;
        }
        match sw.param {
            SweepParam::X => {
                report.x_sweep = sweep_x(cfg, model.as_ref().expect("model built for sweeps"), trace.as_ref(), &sw.values)?
            }
            SweepParam::S => report.s_sweep = sweep_s(cfg, &sw.values)?,
            SweepParam::RV => report.rv_sweep = sweep_rv(cfg, &sw.values)?,
            SweepParam::OmegaRatio => report.h_surface = h_surface(&cfg.model_params(), &sw.values, &surface_xs())?,
        }
    }
    Ok(report)
}
