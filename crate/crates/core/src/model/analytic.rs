use serde::{Deserialize, Serialize};

use super::{ModelParams, NetworkParams};
use crate::error::{ensure, Result};
use crate::workload::{expected_unique, ZipfParams};

/// Time to fetch the `V`-fraction of an item of `size_mb` when the stash
/// downloads `x` and the user the remaining `V - x`, in parallel.
pub fn completion_time_miss(size_mb: f64, view_ratio: f64, x: f64, net: &NetworkParams) -> Result<f64> {
    ensure(size_mb > 0.0, "content size", || format!("{size_mb} MB"))?;
    ensure((0.0..=1.0).contains(&view_ratio), "view ratio", || format!("{view_ratio}"))?;
    ensure(x >= 0.0 && x <= view_ratio, "split ratio", || {
        format!("x = {x} outside [0, view ratio = {view_ratio}]")
    })?;
    Ok(f64::max(size_mb * (view_ratio - x) / net.omega_u, size_mb * x / net.omega_b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XOptimal {
    pub value: f64,
    /// The formula exceeded 1 and was capped.
    pub capped: bool,
}

/// Expected completion-optimal split `ω_b / (λ_e (ω_u + ω_b))`, capped at 1.
pub fn x_optimal(net: &NetworkParams, lambda_e: f64) -> XOptimal {
    let raw = net.omega_b / (lambda_e * (net.omega_u + net.omega_b));
    if raw > 1.0 {
        log::warn!("optimal split {raw} exceeds 1 (lambda_e = {lambda_e}); capped");
        XOptimal { value: 1.0, capped: true }
    } else {
        XOptimal {
            value: raw,
            capped: false,
        }
    }
}

/// `(N - E(Y)) / N`: the fraction of `n` requests that find their item
/// already stashed when every view is whole.
pub fn expected_hit_rate(p: &ZipfParams, n: u64) -> Result<f64> {
    p.validate()?;
    ensure(n >= 1, "request count", || "N = 0".into())?;
    Ok(hit_rate_from_unique(n, expected_unique(p, n)))
}

pub fn hit_rate_from_unique(n: u64, unique: f64) -> f64 {
    ((n as f64 - unique) / n as f64).max(0.0)
}

/// Cost evaluation: `Exact` sums per-item terms over the catalog,
/// `Approx` uses the aggregate `E(Y)` form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostMode {
    Exact,
    Approx,
}

/// One row of a model sweep over `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub x: f64,
    #[serde(rename = "expected_T_s")]
    pub expected_t_s: f64,
    pub cost_stash_cents: f64,
    pub cost_user_cents: f64,
    pub cost_system_cents: f64,
    pub t_norm: f64,
    pub cb_norm: f64,
    pub cu_norm: f64,
    pub h_sum: f64,
    pub h_dist: f64,
}

/// Model bound to one parameter set, with `E(Y)` computed once.
#[derive(Clone, Debug)]
pub struct AnalyticModel {
    params: ModelParams,
    ey: f64,
}

impl AnalyticModel {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let ey = expected_unique(&params.zipf, params.n);
        Ok(Self::build(params, ey))
    }

    /// Uses a given `E(Y)` instead of computing it, e.g. a value measured
    /// on a trace.
    pub fn with_expected_unique(params: ModelParams, ey: f64) -> Result<Self> {
        params.validate()?;
        ensure(ey >= 0.0 && ey <= params.n as f64, "expected unique count", || {
            format!("E(Y) = {ey} with N = {}", params.n)
        })?;
        Ok(Self::build(params, ey))
    }

    fn build(params: ModelParams, ey: f64) -> Self {
        if !params.net.ordering_holds() {
            log::warn!(
                "bandwidths violate omega_l >= omega_b >= omega_u: {:?}; results are still computed",
                params.net
            );
        }
        AnalyticModel { params, ey }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn expected_unique(&self) -> f64 {
        self.ey
    }

    pub fn hit_rate(&self) -> f64 {
        hit_rate_from_unique(self.params.n, self.ey)
    }

    pub fn x_optimal(&self) -> XOptimal {
        x_optimal(&self.params.net, self.params.lambda_e)
    }

    fn check_x(x: f64) -> Result<()> {
        ensure((0.0..=1.0).contains(&x), "split ratio", || format!("x = {x} outside [0, 1]"))
    }

    /// Miss time per MB at view ratio `v`; a split beyond `v` leaves the user
    /// leg empty.
    fn miss_time_per_mb(&self, v: f64, x: f64) -> f64 {
        let net = &self.params.net;
        f64::max((v - x).max(0.0) / net.omega_u, x / net.omega_b)
    }

    /// Mean completion time with view ratio `v` in place of `1/λ_e`.
    pub(super) fn completion_at_view(&self, v: f64, x: f64) -> f64 {
        let p = &self.params;
        let n = p.n as f64;
        p.mean_size_mb / n * (self.ey * self.miss_time_per_mb(v, x) + (n - self.ey) / p.net.omega_l)
    }

    /// Mean completion time per request at split `x`. Misses take the longer
    /// of the two cellular legs; hits read the whole item over WiFi.
    pub fn expected_completion(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.completion_at_view(self.params.view(), x))
    }

    /// Same quantity as [`expected_completion`](Self::expected_completion),
    /// summed item by item over the popularity distribution.
    pub fn expected_completion_exact(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let p = &self.params;
        let n = p.n as f64;
        let miss = p.mean_size_mb * self.miss_time_per_mb(p.view(), x);
        let hit = p.mean_size_mb / p.net.omega_l;
        let total: f64 = per_item_probabilities(&p.zipf, p.n)
            .map(|(pk, uk)| uk * miss + (pk * n - uk) * hit)
            .sum();
        Ok(total / n)
    }

    /// Minimum expected completion time, from the closed form at the optimal
    /// split. When the split is capped the minimum sits at `x = 1` instead.
    pub fn expected_completion_min(&self) -> f64 {
        let p = &self.params;
        let xo = self.x_optimal();
        if xo.capped {
            return self.completion_at_view(p.view(), 1.0);
        }
        let n = p.n as f64;
        let net = &p.net;
        p.mean_size_mb / n
            * (self.ey * (1.0 / (p.lambda_e * (net.omega_u + net.omega_b)) - 1.0 / net.omega_l) + n / net.omega_l)
    }

    /// Expected stash cellular cost at split `x`, cents.
    pub fn stash_cost(&self, x: f64, mode: CostMode) -> Result<f64> {
        Self::check_x(x)?;
        let p = &self.params;
        let per_miss = p.cost.phi_b * p.mean_size_mb * x;
        Ok(match mode {
            CostMode::Approx => per_miss * self.ey,
            CostMode::Exact => per_item_probabilities(&p.zipf, p.n).map(|(_, uk)| per_miss * uk).sum(),
        })
    }

    /// Expected user cellular cost at split `x`, cents. Uses `V - x` as
    /// written, so it goes negative for `x > V`.
    pub fn user_cost(&self, x: f64, mode: CostMode) -> Result<f64> {
        Self::check_x(x)?;
        let p = &self.params;
        let per_miss = p.cost.phi_u * p.mean_size_mb * (p.view() - x);
        Ok(match mode {
            CostMode::Approx => per_miss * self.ey,
            CostMode::Exact => per_item_probabilities(&p.zipf, p.n).map(|(_, uk)| per_miss * uk).sum(),
        })
    }

    pub fn system_cost(&self, x: f64) -> Result<f64> {
        Ok(self.stash_cost(x, CostMode::Approx)? + self.user_cost(x, CostMode::Approx)?)
    }

    pub fn point(&self, x: f64) -> Result<ModelPoint> {
        let h = self.h_metric(x)?;
        let cb = self.stash_cost(x, CostMode::Approx)?;
        let cu = self.user_cost(x, CostMode::Approx)?;
        Ok(ModelPoint {
            x,
            expected_t_s: self.expected_completion(x)?,
            cost_stash_cents: cb,
            cost_user_cents: cu,
            cost_system_cents: cb + cu,
            t_norm: h.t_norm,
            cb_norm: h.cb_norm,
            cu_norm: h.cu_norm,
            h_sum: h.h_sum,
            h_dist: h.h_dist,
        })
    }

    /// Model rows at `steps + 1` evenly spaced splits over `[0, 1]`.
    pub fn curve(&self, steps: usize) -> Result<Vec<ModelPoint>> {
        ensure(steps >= 1, "grid", || "at least one step".into())?;
        (0..=steps).map(|i| self.point(i as f64 / steps as f64)).collect()
    }
}

/// `(p_k, 1 - (1 - p_k)^N)` for every rank.
fn per_item_probabilities(p: &ZipfParams, n: u64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let norm = crate::workload::harmonic(p);
    let n = n as f64;
    (1..=p.m).map(move |k| {
        let pk = (k as f64).powf(-p.s) / norm;
        (pk, -(n * (-pk).ln_1p()).exp_m1())
    })
}
