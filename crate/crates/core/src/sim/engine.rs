use std::collections::HashSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::Accumulator;
use super::{classify, Classification, RunMetrics, SplitPolicy, StashState};
use crate::error::{ensure, Result};
use crate::model::{CostParams, NetworkParams};
use crate::workload::{ContentClass, ContentId, ContentItem, Request, Trace};

/// How long a full hit takes to serve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HitTime {
    /// Only the consumed prefix crosses the WiFi link.
    #[default]
    Consumed,
    /// The whole item crosses the WiFi link, as the analytical model assumes.
    FullSize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub net: NetworkParams,
    pub cost: CostParams,
    pub hit_time: HitTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestOutcome {
    pub classification: Classification,
    pub local_mb: f64,
    pub user_cellular_mb: f64,
    pub stash_cellular_mb: f64,
    pub completion_s: f64,
    pub user_cost_cents: f64,
    pub stash_cost_cents: f64,
}

impl RequestOutcome {
    pub fn requested_mb(&self) -> f64 {
        self.local_mb + self.user_cellular_mb + self.stash_cellular_mb
    }
}

/// Serves one request and, when `stashing` is on, pushes the consumed
/// prefix into the stash.
///
/// The stashed prefix is read over WiFi while the missing tail is split
/// between the stash and user cellular links; the three legs run in
/// parallel.
pub fn process_request(
    stash: &mut StashState,
    item: &ContentItem,
    view_ratio: f64,
    policy: &SplitPolicy,
    params: &SimParams,
    stashing: bool,
) -> RequestOutcome {
    let s = item.size_mb;
    let v = view_ratio;
    let f = stash.fraction(item.id);
    let net = &params.net;
    let classification = classify(f, v);
    if classification == Classification::FullHit {
        let served = match params.hit_time {
            HitTime::Consumed => v * s,
            HitTime::FullSize => s,
        };
        return RequestOutcome {
            classification,
            local_mb: v * s,
            user_cellular_mb: 0.0,
            stash_cellular_mb: 0.0,
            completion_s: served / net.omega_l,
            user_cost_cents: 0.0,
            stash_cost_cents: 0.0,
        };
    }
    let remaining = v - f;
    let x = policy.resolve(remaining, net);
    let local_mb = f * s;
    let stash_mb = x * s;
    let user_mb = (remaining - x) * s;
    let completion_s = (local_mb / net.omega_l).max(user_mb / net.omega_u).max(stash_mb / net.omega_b);
    if stashing {
        stash.extend(item.id, v, s);
    }
    RequestOutcome {
        classification,
        local_mb,
        user_cellular_mb: user_mb,
        stash_cellular_mb: stash_mb,
        completion_s,
        user_cost_cents: params.cost.phi_u * user_mb,
        stash_cost_cents: params.cost.phi_b * stash_mb,
    }
}

/// Everything that defines one run besides the trace.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub policy: SplitPolicy,
    pub params: SimParams,
    /// Whether served content is kept in the stash.
    pub stashing: bool,
    /// Requests between hit-rate samples; 0 disables the series.
    pub sample_interval: u64,
    pub record_outcomes: bool,
}

impl RunConfig {
    pub fn new(policy: SplitPolicy, params: SimParams) -> Self {
        RunConfig {
            policy,
            params,
            stashing: true,
            sample_interval: 5000,
            record_outcomes: false,
        }
    }
}

/// One line of the per-request outcome log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub index: u64,
    pub content_id: ContentId,
    pub class: ContentClass,
    pub view_ratio: f64,
    pub classification: Classification,
    pub local_mb: f64,
    pub user_mb: f64,
    pub stash_mb: f64,
    pub completion_s: f64,
    pub user_cost: f64,
    pub stash_cost: f64,
}

impl OutcomeRecord {
    fn new(req: &Request, class: ContentClass, o: &RequestOutcome) -> Self {
        OutcomeRecord {
            index: req.index,
            content_id: req.content_id,
            class,
            view_ratio: req.view_ratio,
            classification: o.classification,
            local_mb: o.local_mb,
            user_mb: o.user_cellular_mb,
            stash_mb: o.stash_cellular_mb,
            completion_s: o.completion_s,
            user_cost: o.user_cost_cents,
            stash_cost: o.stash_cost_cents,
        }
    }
}

pub fn write_outcomes_csv<W: Write>(records: &[OutcomeRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    /// Empty unless requested.
    pub outcomes: Vec<OutcomeRecord>,
}

/// Replays `trace` in order against an initially empty stash.
pub fn simulate(trace: &Trace, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.params.net.validate()?;
    cfg.params.cost.validate()?;
    cfg.policy.validate()?;
    let mut stash = StashState::new();
    let mut acc = Accumulator::new(cfg.sample_interval);
    let mut seen = HashSet::new();
    let mut outcomes = Vec::new();
    for req in &trace.requests {
        ensure(req.view_ratio > 0.0 && req.view_ratio <= 1.0, "view ratio", || {
            format!("request {} has view ratio {}", req.index, req.view_ratio)
        })?;
        let item = trace.item(req)?;
        let o = process_request(&mut stash, &item, req.view_ratio, &cfg.policy, &cfg.params, cfg.stashing);
        seen.insert(req.content_id);
        acc.add(item.class, &o);
        if cfg.record_outcomes {
            outcomes.push(OutcomeRecord::new(req, item.class, &o));
        }
    }
    Ok(RunOutput {
        metrics: acc.finish(stash.total_stored_mb(), seen.len() as u64),
        outcomes,
    })
}

/// Runs `trace` with stashing on and returns only the metrics.
pub fn run(trace: &Trace, policy: &SplitPolicy, params: &SimParams, sample_interval: u64) -> Result<RunMetrics> {
    let cfg = RunConfig {
        sample_interval,
        ..RunConfig::new(policy.clone(), *params)
    };
    Ok(simulate(trace, &cfg)?.metrics)
}
