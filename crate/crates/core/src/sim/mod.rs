//! Trace-driven simulation of an on-board stash.
//!
//! Each request is classified against the stashed prefix of its item. Hits
//! are served over WiFi; the missing tail is split between the stash's and
//! the user's cellular links by a [`SplitStrategy`], and the consumed prefix
//! is then stashed (the stash keeps its own share, the user pushes back the
//! rest). Strategies and scenarios are looked up by name in registries so
//! new variants can be added without touching the engine.

mod engine;
mod metrics;
mod scenario;
mod stash;
mod strategy;

pub use engine::{
    process_request, run, simulate, write_outcomes_csv, HitTime, OutcomeRecord, RequestOutcome, RunConfig,
    RunOutput, SimParams,
};
pub use metrics::{ClassBreakdown, ClassMetrics, RunMetrics, SeriesPoint};
pub use scenario::{compare_scenarios, default_scenarios, Scenario, ScenarioRegistry, ScenarioResult};
pub use stash::{classify, Classification, StashState};
pub use strategy::{
    AllStash, FixedSplit, NoStash, OptimalPerRequest, SplitPolicy, SplitStrategy, StrategyBuilder, StrategyRegistry,
};
