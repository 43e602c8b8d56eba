use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::workload::ContentId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    FullHit,
    PartialHit,
    Miss,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::FullHit => "full-hit",
            Classification::PartialHit => "partial-hit",
            Classification::Miss => "miss",
        }
    }
}

/// Compares the stashed prefix `f` with the requested prefix `view_ratio`.
pub fn classify(stashed: f64, view_ratio: f64) -> Classification {
    if stashed >= view_ratio {
        Classification::FullHit
    } else if stashed > 0.0 {
        Classification::PartialHit
    } else {
        Classification::Miss
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    fraction: f64,
    size_mb: f64,
}

/// Stashed prefix fraction per item. Nothing is ever evicted.
#[derive(Clone, Debug, Default)]
pub struct StashState {
    entries: HashMap<ContentId, Entry>,
    total_stored_mb: f64,
}

impl StashState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fraction(&self, id: ContentId) -> f64 {
        self.entries.get(&id).map_or(0.0, |e| e.fraction)
    }

    /// Extends the stashed prefix of `id` to at least `fraction`.
    pub fn extend(&mut self, id: ContentId, fraction: f64, size_mb: f64) {
        let fraction = fraction.clamp(0.0, 1.0);
        let e = self.entries.entry(id).or_insert(Entry { fraction: 0.0, size_mb });
        if fraction > e.fraction {
            self.total_stored_mb += (fraction - e.fraction) * e.size_mb;
            e.fraction = fraction;
        }
    }

    pub fn total_stored_mb(&self) -> f64 {
        self.total_stored_mb
    }

    /// Stored volume summed entry by entry.
    pub fn recomputed_total_mb(&self) -> f64 {
        self.entries.values().map(|e| e.fraction * e.size_mb).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
