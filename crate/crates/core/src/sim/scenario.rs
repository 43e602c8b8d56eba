use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate, AllStash, NoStash, OptimalPerRequest, RunConfig, RunMetrics, SimParams, SplitPolicy};
use crate::error::{Error, Result};
use crate::workload::Trace;

/// A named way of giving passengers internet access.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub policy: SplitPolicy,
    pub stashing: bool,
}

/// Scenarios by name, in registration order.
#[derive(Clone, Debug)]
pub struct ScenarioRegistry {
    scenarios: Vec<Scenario>,
}

impl Default for ScenarioRegistry {
    fn default() -> Self {
        let mut r = ScenarioRegistry { scenarios: Vec::new() };
        r.register(Scenario {
            name: "direct".into(),
            description: "every user on their own cellular link".into(),
            policy: SplitPolicy::new(Arc::new(NoStash)),
            stashing: false,
        });
        r.register(Scenario {
            name: "onboard-wifi".into(),
            description: "on-board WiFi backed by the vehicle's cellular link, nothing kept".into(),
            policy: SplitPolicy::new(Arc::new(AllStash)),
            stashing: false,
        });
        r.register(Scenario {
            name: "cache-wifi".into(),
            description: "on-board WiFi with a conventional cache on the download path".into(),
            policy: SplitPolicy::new(Arc::new(AllStash)),
            stashing: true,
        });
        r.register(Scenario {
            name: "ustash".into(),
            description: "collaborative split with user push-back into the stash".into(),
            policy: SplitPolicy::new(Arc::new(OptimalPerRequest)),
            stashing: true,
        });
        r
    }
}

impl ScenarioRegistry {
    /// Adds a scenario, replacing any existing one with the same name.
    pub fn register(&mut self, s: Scenario) {
        match self.scenarios.iter_mut().find(|e| e.name == s.name) {
            Some(slot) => *slot = s,
            None => self.scenarios.push(s),
        }
    }

    pub fn get(&self, name: &str) -> Result<&Scenario> {
        self.scenarios
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.scenarios.iter().map(|s| s.name.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub policy: String,
    pub stashing: bool,
    pub metrics: RunMetrics,
}

/// Runs each named scenario on the same trace, in parallel. Results keep
/// the order of `names`.
pub fn compare_scenarios(
    trace: &Trace,
    params: &SimParams,
    registry: &ScenarioRegistry,
    names: &[String],
    sample_interval: u64,
) -> Result<Vec<ScenarioResult>> {
    let scenarios = names.iter().map(|n| registry.get(n)).collect::<Result<Vec<_>>>()?;
    scenarios
        .par_iter()
        .map(|s| {
            let cfg = RunConfig {
                stashing: s.stashing,
                sample_interval,
                ..RunConfig::new(s.policy.clone(), *params)
            };
            Ok(ScenarioResult {
                scenario: s.name.clone(),
                policy: s.policy.spec(),
                stashing: s.stashing,
                metrics: simulate(trace, &cfg)?.metrics,
            })
        })
        .collect()
}

/// The four built-in scenario names.
pub fn default_scenarios() -> Vec<String> {
    ScenarioRegistry::default().names().into_iter().map(String::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{WorkloadConfig, ZipfParams};

    #[test]
    fn canonical_scenarios() {
        let reg = ScenarioRegistry::default();
        assert_eq!(reg.names(), vec!["direct", "onboard-wifi", "cache-wifi", "ustash"]);
        assert!(matches!(reg.get("lan-party"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn comparison_on_small_trace() {
        let mut cfg = WorkloadConfig::default();
        cfg.non_video.zipf = ZipfParams::new(0.8, 2000).unwrap();
        cfg.video.zipf = ZipfParams::new(0.8, 500).unwrap();
        cfg.r_v = 4.0;
        cfg.n_requests = 5000;
        let trace = Trace::generate(&cfg).unwrap();
        let params = SimParams::default();
        let res = compare_scenarios(&trace, &params, &ScenarioRegistry::default(), &default_scenarios(), 1000).unwrap();
        let get = |n: &str| &res.iter().find(|r| r.scenario == n).unwrap().metrics;
        let direct = get("direct");
        assert!((direct.user_cost_cents - params.cost.phi_u * direct.requested_mb).abs() < 1e-6 * direct.user_cost_cents);
        assert_eq!(direct.stash_mb, 0.0);
        let onboard = get("onboard-wifi");
        assert_eq!(onboard.user_mb, 0.0);
        assert!(get("cache-wifi").stash_mb >= get("ustash").stash_mb);
        assert!(get("ustash").user_cost_cents < direct.user_cost_cents);
        assert_eq!(get("ustash").full_hits, get("cache-wifi").full_hits);
    }
}
