//! Request-set similarity and per-content source entropy.
//!
//! Jaccard similarity between the sets of items requested by two sources
//! (buses, routes, days) measures how much their demand overlaps. The
//! normalized source entropy of one item measures how evenly its requests are
//! spread over `n` sources: 0 when one source issues them all, 1 when they are
//! uniform. Entropy uses the natural log; the normalized ratio does not depend
//! on the base.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestSet {
    pub label: String,
    pub ids: BTreeSet<String>,
}

impl RequestSet {
    pub fn new<I, S>(label: impl Into<String>, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RequestSet {
            label: label.into(),
            ids: ids.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JaccardScore {
    pub value: f64,
    /// Both sets were empty; `value` is 1 by convention.
    pub degenerate: bool,
}

pub fn jaccard(a: &RequestSet, b: &RequestSet) -> JaccardScore {
    let inter = a.ids.intersection(&b.ids).count();
    let union = a.ids.len() + b.ids.len() - inter;
    if union == 0 {
        log::warn!("jaccard of two empty request sets ({}, {})", a.label, b.label);
        return JaccardScore {
            value: 1.0,
            degenerate: true,
        };
    }
    JaccardScore {
        value: inter as f64 / union as f64,
        degenerate: false,
    }
}

/// Square, symmetric matrix of pairwise Jaccard scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.size().max(1))
    }

    /// CSV with a `label` column followed by one column per label.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["label".to_string()];
        header.extend(self.labels.iter().cloned());
        out.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(self.rows()) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn similarity_matrix(groups: &[RequestSet]) -> Result<SimilarityMatrix> {
    ensure(groups.len() >= 2, "similarity matrix", || {
        format!("needs at least 2 groups, got {}", groups.len())
    })?;
    let n = groups.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let v = jaccard(&groups[i], &groups[j]).value;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(SimilarityMatrix {
        labels: groups.iter().map(|g| g.label.clone()).collect(),
        values,
    })
}

/// Request counts for one item, by source.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceCounts {
    pub content_id: String,
    pub counts: Vec<(String, u64)>,
    /// Declared number of sources (including ones that never requested it).
    pub n: usize,
}

/// Which `n` normalizes the entropy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceMode {
    /// The declared number of sources.
    #[default]
    Declared,
    /// Only sources with a non-zero count.
    Observed,
}

pub fn source_entropy(sc: &SourceCounts, mode: SourceMode) -> Result<f64> {
    let total: u64 = sc.counts.iter().map(|(_, c)| c).sum();
    ensure(total > 0, "source counts", || format!("item {} has no requests", sc.content_id))?;
    let n = match mode {
        SourceMode::Declared => {
            ensure(sc.n >= 1 && sc.n >= sc.counts.len(), "source count", || {
                format!("declared n = {} with {} listed sources", sc.n, sc.counts.len())
            })?;
            sc.n
        }
        SourceMode::Observed => sc.counts.iter().filter(|(_, c)| *c > 0).count(),
    };
    if n <= 1 {
        return Ok(0.0);
    }
    let total = total as f64;
    let h: f64 = sc
        .counts
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(_, c)| {
            let p = *c as f64 / total;
            -p * p.ln()
        })
        .sum();
    Ok((h / (n as f64).ln()).clamp(0.0, 1.0))
}

/// Empirical CDF of per-item entropies: one `(value, cumulative fraction)`
/// point per distinct value, ascending.
pub fn entropy_cdf(items: &[SourceCounts], mode: SourceMode) -> Result<Vec<(f64, f64)>> {
    ensure(!items.is_empty(), "entropy cdf", || "empty collection".into())?;
    let mut values = items
        .iter()
        .map(|sc| source_entropy(sc, mode))
        .collect::<Result<Vec<_>>>()?;
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *v => last.1 = frac,
            _ => out.push((*v, frac)),
        }
    }
    Ok(out)
}

pub fn write_cdf_csv<W: Write>(cdf: &[(f64, f64)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["entropy", "cumulative_fraction"])?;
    for (v, f) in cdf {
        out.write_record([v.to_string(), f.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct LabelledRequest {
    label: String,
    content_id: String,
}

/// Labelled requests, in input order. Reads CSV with header `label,content_id`.
#[derive(Clone, Debug, Default)]
pub struct LabelledRequests {
    pub rows: Vec<(String, String)>,
}

impl LabelledRequests {
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut rows = Vec::new();
        for rec in rdr.deserialize() {
            let rec: LabelledRequest = rec?;
            rows.push((rec.label, rec.content_id));
        }
        Ok(LabelledRequests { rows })
    }

    /// One request set per label, ordered by label.
    pub fn request_sets(&self) -> Vec<RequestSet> {
        let mut by_label: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        for (label, id) in &self.rows {
            by_label.entry(label).or_default().insert(id.clone());
        }
        by_label
            .into_iter()
            .map(|(label, ids)| RequestSet {
                label: label.to_string(),
                ids,
            })
            .collect()
    }

    /// Per-item counts by label; `n` is the number of distinct labels.
    pub fn source_counts(&self) -> Vec<SourceCounts> {
        let labels: BTreeSet<&str> = self.rows.iter().map(|(l, _)| l.as_str()).collect();
        let mut by_item: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
        for (label, id) in &self.rows {
            *by_item.entry(id).or_default().entry(label).or_default() += 1;
        }
        by_item
            .into_iter()
            .map(|(id, counts)| SourceCounts {
                content_id: id.to_string(),
                counts: counts.into_iter().map(|(l, c)| (l.to_string(), c)).collect(),
                n: labels.len(),
            })
            .collect()
    }
}
