//! Closed-form model of collaborative downloads under a constant-content
//! abstraction: every item has size `βθ`, view ratio `1/λ_e` and split `x`.
//!
//! With `E(Y)` the expected number of distinct items among `N` requests, the
//! model gives expected completion time, stash and user cellular costs, the
//! completion-optimal split and a normalized combined objective `H`.

mod analytic;
mod objective;

pub use analytic::{
    completion_time_miss, expected_hit_rate, hit_rate_from_unique, x_optimal, AnalyticModel, CostMode, ModelPoint,
    XOptimal,
};
pub use objective::{
    closest_to_origin, farthest_from_origin, h_surface, HArgmin, HArgminMethod, ObjectivePoint, SurfacePoint,
    H_GRID_RESOLUTION,
};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::units::{kbps, kilobytes, mbps};
use crate::workload::{ZipfParams, DEFAULT_CATALOG_SIZE, DEFAULT_ZIPF_S, REFERENCE_NON_VIDEO_REQUESTS};

/// Link bandwidths in MB/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// User cellular.
    pub omega_u: f64,
    /// Stash cellular.
    pub omega_b: f64,
    /// On-board WiFi.
    pub omega_l: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            omega_u: kbps(500.0),
            omega_b: kbps(800.0),
            omega_l: mbps(6.0),
        }
    }
}

impl NetworkParams {
    pub fn new(omega_u: f64, omega_b: f64, omega_l: f64) -> Result<Self> {
        let n = NetworkParams {
            omega_u,
            omega_b,
            omega_l,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_u", self.omega_u), ("omega_b", self.omega_b), ("omega_l", self.omega_l)] {
            ensure(v.is_finite() && v > 0.0, "bandwidth", || format!("{name} = {v} (must be > 0)"))?;
        }
        Ok(())
    }

    /// Whether `ω_l ≥ ω_b ≥ ω_u`, the ordering the derivations assume.
    pub fn ordering_holds(&self) -> bool {
        self.omega_l >= self.omega_b && self.omega_b >= self.omega_u
    }

    pub fn scaled(&self, k: f64) -> Self {
        NetworkParams {
            omega_u: self.omega_u * k,
            omega_b: self.omega_b * k,
            omega_l: self.omega_l * k,
        }
    }
}

/// Cellular prices in cents/MB.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub phi_u: f64,
    pub phi_b: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams { phi_u: 10.0, phi_b: 3.0 }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("phi_u", self.phi_u), ("phi_b", self.phi_b)] {
            ensure(v.is_finite() && v >= 0.0, "cost", || format!("{name} = {v} (must be >= 0)"))?;
        }
        Ok(())
    }
}

/// Weights of completion time, stash cost and user cost in `H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gammas {
    pub t: f64,
    pub b: f64,
    pub u: f64,
}

impl Default for Gammas {
    fn default() -> Self {
        Gammas { t: 1.0, b: 1.0, u: 1.0 }
    }
}

impl Gammas {
    pub fn are_unit(&self) -> bool {
        self.t == 1.0 && self.b == 1.0 && self.u == 1.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma.t", self.t), ("gamma.b", self.b), ("gamma.u", self.u)] {
            ensure(v.is_finite() && v >= 0.0, "objective weight", || format!("{name} = {v} (must be >= 0)"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub zipf: ZipfParams,
    /// Mean content size `βθ`, MB.
    pub mean_size_mb: f64,
    pub lambda_e: f64,
    /// Number of requests `N`.
    pub n: u64,
    pub net: NetworkParams,
    pub cost: CostParams,
    pub gammas: Gammas,
}

impl Default for ModelParams {
    /// Non-video reference workload with `λ_e = 1`.
    fn default() -> Self {
        ModelParams {
            zipf: ZipfParams {
                s: DEFAULT_ZIPF_S,
                m: DEFAULT_CATALOG_SIZE,
            },
            mean_size_mb: 0.0006 * kilobytes(2102.0),
            lambda_e: 1.0,
            n: REFERENCE_NON_VIDEO_REQUESTS,
            net: NetworkParams::default(),
            cost: CostParams::default(),
            gammas: Gammas::default(),
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        self.zipf.validate()?;
        ensure(self.mean_size_mb.is_finite() && self.mean_size_mb > 0.0, "mean size", || {
            format!("{} MB (must be > 0)", self.mean_size_mb)
        })?;
        ensure(self.lambda_e.is_finite() && self.lambda_e > 0.0, "lambda_e", || {
            format!("{} (must be > 0)", self.lambda_e)
        })?;
        ensure(self.n >= 1, "request count", || "N = 0".into())?;
        self.net.validate()?;
        self.cost.validate()?;
        self.gammas.validate()
    }

    /// Mean view ratio `1/λ_e`.
    pub fn view(&self) -> f64 {
        1.0 / self.lambda_e
    }
}
