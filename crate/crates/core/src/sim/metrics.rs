use serde::{Deserialize, Serialize};

use super::{Classification, RequestOutcome};
use crate::workload::ContentClass;

/// Counts and byte flows for a subset of requests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub total: u64,
    pub full_hits: u64,
    pub partial_hits: u64,
    pub misses: u64,
    pub hit_rate: f64,
    pub partial_hit_rate: f64,
    pub requested_mb: f64,
    pub local_mb: f64,
    pub byte_hit_rate: f64,
}

impl ClassMetrics {
    fn add(&mut self, o: &RequestOutcome) {
        self.total += 1;
        match o.classification {
            Classification::FullHit => self.full_hits += 1,
            Classification::PartialHit => self.partial_hits += 1,
            Classification::Miss => self.misses += 1,
        }
        self.requested_mb += o.requested_mb();
        self.local_mb += o.local_mb;
    }

    fn finish(&mut self) {
        self.hit_rate = ratio(self.full_hits as f64, self.total as f64);
        self.partial_hit_rate = ratio(self.partial_hits as f64, self.total as f64);
        self.byte_hit_rate = ratio(self.local_mb, self.requested_mb).min(1.0);
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassBreakdown {
    pub non_video: ClassMetrics,
    pub video: ClassMetrics,
}

impl ClassBreakdown {
    pub fn get(&self, class: ContentClass) -> &ClassMetrics {
        match class {
            ContentClass::NonVideo => &self.non_video,
            ContentClass::Video => &self.video,
        }
    }

    fn get_mut(&mut self, class: ContentClass) -> &mut ClassMetrics {
        match class {
            ContentClass::NonVideo => &mut self.non_video,
            ContentClass::Video => &mut self.video,
        }
    }
}

/// Cumulative rates after `requests` requests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub requests: u64,
    pub hit_rate: f64,
    pub partial_hit_rate: f64,
    pub byte_hit_rate: f64,
}

/// Aggregate results of one simulation run. `hit_rate` counts full hits
/// only; partial hits and locally served bytes are reported separately.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub total: u64,
    pub full_hits: u64,
    pub partial_hits: u64,
    pub misses: u64,
    pub hit_rate: f64,
    pub partial_hit_rate: f64,
    pub byte_hit_rate: f64,
    pub requested_mb: f64,
    pub local_mb: f64,
    pub user_mb: f64,
    pub stash_mb: f64,
    pub user_cost_cents: f64,
    pub stash_cost_cents: f64,
    pub system_cost_cents: f64,
    pub mean_completion_s: f64,
    pub total_stored_mb: f64,
    pub unique_contents: u64,
    pub by_class: ClassBreakdown,
    pub hit_rate_series: Vec<SeriesPoint>,
}

impl RunMetrics {
    /// Cellular volume avoided by serving from the stash; equals
    /// `byte_hit_rate * requested_mb`.
    pub fn bandwidth_savings_mb(&self) -> f64 {
        self.local_mb
    }
}

#[derive(Debug)]
pub(super) struct Accumulator {
    m: RunMetrics,
    completion_sum: f64,
    sample_interval: u64,
}

impl Accumulator {
    pub(super) fn new(sample_interval: u64) -> Self {
        Accumulator {
            m: RunMetrics::default(),
            completion_sum: 0.0,
            sample_interval,
        }
    }

    pub(super) fn add(&mut self, class: ContentClass, o: &RequestOutcome) {
        let m = &mut self.m;
        m.total += 1;
        match o.classification {
            Classification::FullHit => m.full_hits += 1,
            Classification::PartialHit => m.partial_hits += 1,
            Classification::Miss => m.misses += 1,
        }
        m.requested_mb += o.requested_mb();
        m.local_mb += o.local_mb;
        m.user_mb += o.user_cellular_mb;
        m.stash_mb += o.stash_cellular_mb;
        m.user_cost_cents += o.user_cost_cents;
        m.stash_cost_cents += o.stash_cost_cents;
        self.completion_sum += o.completion_s;
        m.by_class.get_mut(class).add(o);
        if self.sample_interval > 0 && m.total.is_multiple_of(self.sample_interval) {
            self.sample();
        }
    }

    fn sample(&mut self) {
        let m = &mut self.m;
        let n = m.total as f64;
        m.hit_rate_series.push(SeriesPoint {
            requests: m.total,
            hit_rate: m.full_hits as f64 / n,
            partial_hit_rate: m.partial_hits as f64 / n,
            byte_hit_rate: ratio(m.local_mb, m.requested_mb).min(1.0),
        });
    }

    pub(super) fn finish(mut self, total_stored_mb: f64, unique_contents: u64) -> RunMetrics {
        if self.sample_interval > 0 && !self.m.total.is_multiple_of(self.sample_interval) {
            self.sample();
        }
        let mut m = self.m;
        let n = m.total as f64;
        m.hit_rate = ratio(m.full_hits as f64, n);
        m.partial_hit_rate = ratio(m.partial_hits as f64, n);
        m.byte_hit_rate = ratio(m.local_mb, m.requested_mb).min(1.0);
        m.system_cost_cents = m.user_cost_cents + m.stash_cost_cents;
        m.mean_completion_s = ratio(self.completion_sum, n);
        m.total_stored_mb = total_stored_mb;
        m.unique_contents = unique_contents;
        m.by_class.non_video.finish();
        m.by_class.video.finish();
        m
    }
}
