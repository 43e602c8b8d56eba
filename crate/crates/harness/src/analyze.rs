//! Request-set overlap and source entropy over labelled requests: either a
//! `label,content_id` CSV or a trace cut into consecutive groups.

use serde::{Deserialize, Serialize};
use ustash_core::analytics::{entropy_cdf, similarity_matrix, LabelledRequests, SimilarityMatrix, SourceMode};
use ustash_core::workload::Trace;

use crate::error::{HarnessError, Result};

/// Labels the requests of `trace` by which of `groups` consecutive, equally
/// sized blocks they fall in (`g1`, `g2`, ...).
pub fn split_trace(trace: &Trace, groups: usize) -> Result<LabelledRequests> {
    if groups < 2 || groups > trace.len() {
        return Err(HarnessError::Domain {
            key: "groups".into(),
            msg: format!("need 2 <= groups <= {} requests, got {groups}", trace.len()),
        });
    }
    let n = trace.len();
    let rows = trace
        .requests
        .iter()
        .enumerate()
        .map(|(i, r)| (format!("g{}", i * groups / n + 1), r.content_id.to_string()))
        .collect();
    Ok(LabelledRequests { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub matrix: SimilarityMatrix,
    /// `(entropy, cumulative fraction)` steps.
    pub entropy_cdf: Vec<(f64, f64)>,
    pub mean_pairwise_jaccard: f64,
    pub items: usize,
}

pub fn analyze(requests: &LabelledRequests, mode: SourceMode) -> Result<Analysis> {
    let sets = requests.request_sets();
    let matrix = similarity_matrix(&sets)?;
    let counts = requests.source_counts();
    let cdf = entropy_cdf(&counts, mode)?;
    let k = matrix.size();
    let mut sum = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            sum += matrix.get(i, j);
        }
    }
    Ok(Analysis {
        mean_pairwise_jaccard: sum / (k * (k - 1) / 2) as f64,
        matrix,
        entropy_cdf: cdf,
        items: counts.len(),
    })
}
