//! The combined objective `H`: completion time, stash cost and user cost,
//! each normalized by its maximum over `x ∈ [0, 1]` and evaluated with whole
//! views (`V = 1`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalyticModel, ModelParams};
use crate::error::{ensure, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub x_c: f64,
    pub t_norm: f64,
    pub cb_norm: f64,
    pub cu_norm: f64,
    /// Weighted sum of the normalized components.
    pub h_sum: f64,
    /// Euclidean norm of the weighted components.
    pub h_dist: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HArgminMethod {
    ClosedForm,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HArgmin {
    pub x: f64,
    /// `h_sum` at `x`, evaluated directly.
    pub h_min: f64,
    /// The published closed-form minimum, for unit weights only. It does not
    /// agree with `h_min` in general; see [`AnalyticModel::h_min_published`].
    pub h_min_published: Option<f64>,
    pub method: HArgminMethod,
    pub point: ObjectivePoint,
}

/// Resolution of the fallback grid search.
pub const H_GRID_RESOLUTION: f64 = 1e-4;

fn ratio_or_zero(v: f64, max: f64) -> f64 {
    if max > 0.0 {
        (v / max).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

impl AnalyticModel {
    pub fn h_metric(&self, x: f64) -> Result<ObjectivePoint> {
        ensure((0.0..=1.0).contains(&x), "split ratio", || format!("x = {x} outside [0, 1]"))?;
        let p = self.params();
        let t_max = f64::max(self.completion_at_view(1.0, 0.0), self.completion_at_view(1.0, 1.0));
        let t_norm = ratio_or_zero(self.completion_at_view(1.0, x), t_max);
        let volume = p.mean_size_mb * self.expected_unique();
        let cb_norm = ratio_or_zero(p.cost.phi_b * volume * x, p.cost.phi_b * volume);
        let cu_norm = ratio_or_zero(p.cost.phi_u * volume * (1.0 - x), p.cost.phi_u * volume);
        let g = p.gammas;
        let (wt, wb, wu) = (g.t * t_norm, g.b * cb_norm, g.u * cu_norm);
        Ok(ObjectivePoint {
            x_c: x,
            t_norm,
            cb_norm,
            cu_norm,
            h_sum: wt + wb + wu,
            h_dist: (wt * wt + wb * wb + wu * wu).sqrt(),
        })
    }

    /// The published closed form for `min H`, evaluated as written:
    /// `1 + 1/(Nω_u) - ω_l ω_b E(Y) / ((E(Y)(ω_l - ω_u) + Nω_u)(ω_u + ω_b))`.
    /// Its `1/(Nω_u)` term is not dimensionless; direct evaluation of
    /// `h_sum` at the argmin gives `2 - ω_l ω_b E(Y) / (...)` instead.
    pub fn h_min_published(&self) -> f64 {
        let p = self.params();
        let (n, ey) = (p.n as f64, self.expected_unique());
        let net = &p.net;
        1.0 + 1.0 / (n * net.omega_u)
            - net.omega_l * net.omega_b * ey
                / ((ey * (net.omega_l - net.omega_u) + n * net.omega_u) * (net.omega_u + net.omega_b))
    }

    /// Minimizer of `h_sum`. Unit weights use the closed form
    /// `x* = ω_b / (ω_u + ω_b)`; other weights fall back to a grid search.
    pub fn h_argmin(&self) -> Result<HArgmin> {
        let p = self.params();
        if p.gammas.are_unit() {
            let x = p.net.omega_b / (p.net.omega_u + p.net.omega_b);
            let point = self.h_metric(x)?;
            Ok(HArgmin {
                x,
                h_min: point.h_sum,
                h_min_published: Some(self.h_min_published()),
                method: HArgminMethod::ClosedForm,
                point,
            })
        } else {
            let point = self.h_grid_argmin(H_GRID_RESOLUTION)?;
            Ok(HArgmin {
                x: point.x_c,
                h_min: point.h_sum,
                h_min_published: None,
                method: HArgminMethod::Grid,
                point,
            })
        }
    }

    /// Smallest `h_sum` over an evenly spaced grid; ties go to the smaller `x`.
    pub fn h_grid_argmin(&self, resolution: f64) -> Result<ObjectivePoint> {
        ensure(resolution > 0.0 && resolution <= 1.0, "grid resolution", || format!("{resolution}"))?;
        let steps = (1.0 / resolution).round() as usize;
        let points = (0..=steps)
            .into_par_iter()
            .map(|i| self.h_metric(i as f64 / steps as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(points
            .into_iter()
            .reduce(|best, p| if p.h_sum < best.h_sum { p } else { best })
            .expect("grid has at least two points"))
    }
}

/// One point of the `H` surface over split and bandwidth ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: f64,
    /// `ω_u / ω_b`.
    pub omega_ratio: f64,
    pub t_norm: f64,
    pub cb_norm: f64,
    pub cu_norm: f64,
    pub h_sum: f64,
    pub h_dist: f64,
}

/// Evaluates `H` for every `(ratio, x)` pair with `ω_b` held fixed and
/// `ω_u = ratio · ω_b`. Output is ordered by ratio, then `x`.
pub fn h_surface(params: &ModelParams, ratios: &[f64], xs: &[f64]) -> Result<Vec<SurfacePoint>> {
    ensure(!ratios.is_empty() && !xs.is_empty(), "surface grid", || "empty axis".into())?;
    for &r in ratios {
        ensure(r.is_finite() && r > 0.0, "bandwidth ratio", || format!("{r}"))?;
    }
    // E(Y) does not depend on bandwidth, so it is computed once
    let base = AnalyticModel::new(*params)?;
    let ey = base.expected_unique();
    let rows = ratios
        .par_iter()
        .map(|&r| {
            let mut p = *params;
            p.net.omega_u = r * p.net.omega_b;
            let m = AnalyticModel::with_expected_unique(p, ey)?;
            xs.iter()
                .map(|&x| {
                    let o = m.h_metric(x)?;
                    Ok(SurfacePoint {
                        x,
                        omega_ratio: r,
                        t_norm: o.t_norm,
                        cb_norm: o.cb_norm,
                        cu_norm: o.cu_norm,
                        h_sum: o.h_sum,
                        h_dist: o.h_dist,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// First point (in surface order) with the smallest `h_dist`.
pub fn closest_to_origin(surface: &[SurfacePoint]) -> Option<SurfacePoint> {
    surface.iter().copied().reduce(|a, b| if b.h_dist < a.h_dist { b } else { a })
}

/// First point (in surface order) with the largest `h_dist`.
pub fn farthest_from_origin(surface: &[SurfacePoint]) -> Option<SurfacePoint> {
    surface.iter().copied().reduce(|a, b| if b.h_dist > a.h_dist { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Gammas, NetworkParams};
    use crate::workload::ZipfParams;

    fn small() -> ModelParams {
        ModelParams {
            zipf: ZipfParams { s: 0.716, m: 20_000 },
            n: 10_000,
            ..ModelParams::default()
        }
    }

    #[test]
    fn boundary_normalization() {
        let m = AnalyticModel::new(small()).unwrap();
        let one = m.h_metric(1.0).unwrap();
        assert_eq!((one.cb_norm, one.cu_norm), (1.0, 0.0));
        let zero = m.h_metric(0.0).unwrap();
        assert_eq!((zero.cb_norm, zero.cu_norm, zero.t_norm), (0.0, 1.0, 1.0));
        assert!((zero.h_dist - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_price_normalizes_to_zero() {
        let mut p = small();
        p.cost.phi_b = 0.0;
        let m = AnalyticModel::new(p).unwrap();
        assert_eq!(m.h_metric(0.8).unwrap().cb_norm, 0.0);
    }

    #[test]
    fn closed_form_argmin() {
        let m = AnalyticModel::new(small()).unwrap();
        let a = m.h_argmin().unwrap();
        assert!((a.x - 0.6154).abs() < 5e-4);
        assert_eq!(a.method, HArgminMethod::ClosedForm);
        let grid = m.h_grid_argmin(H_GRID_RESOLUTION).unwrap();
        assert!((grid.x_c - a.x).abs() <= H_GRID_RESOLUTION);
        let mut p = small();
        p.net = NetworkParams::new(0.2, 0.2, 1.0).unwrap();
        assert_eq!(AnalyticModel::new(p).unwrap().h_argmin().unwrap().x, 0.5);
    }

    #[test]
    fn direct_minimum_has_closed_form() {
        // h_sum at the argmin, derived by hand: cb + cu = 1 and t_norm is a
        // ratio of the two completion-time expressions
        let m = AnalyticModel::new(small()).unwrap();
        let p = m.params();
        let (n, ey) = (p.n as f64, m.expected_unique());
        let NetworkParams {
            omega_u: wu,
            omega_b: wb,
            omega_l: wl,
        } = p.net;
        let want = 2.0 - wl * wb * ey / ((ey * (wl - wu) + n * wu) * (wu + wb));
        let a = m.h_argmin().unwrap();
        assert!((a.h_min - want).abs() < 1e-12);
        let published = a.h_min_published.unwrap();
        assert!((published - (want - 1.0 + 1.0 / (n * wu))).abs() < 1e-12);
    }

    #[test]
    fn weighted_argmin_uses_grid() {
        let mut p = small();
        p.gammas = Gammas { t: 1.0, b: 3.0, u: 1.0 };
        let a = AnalyticModel::new(p).unwrap().h_argmin().unwrap();
        assert_eq!(a.method, HArgminMethod::Grid);
        assert!(a.h_min_published.is_none());
        // stash cost now dominates, pulling the split towards the user side
        assert!(a.x <= 0.6154);
    }

    #[test]
    fn surface_extremes() {
        let ratios: Vec<f64> = (1..=80).map(|i| i as f64 / 80.0).collect();
        let xs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let s = h_surface(&small(), &ratios, &xs).unwrap();
        assert_eq!(s.len(), 80 * 101);
        let far = farthest_from_origin(&s).unwrap();
        assert_eq!((far.t_norm, far.cb_norm, far.cu_norm), (1.0, 0.0, 1.0));
        assert!((far.h_dist - 2f64.sqrt()).abs() < 1e-12);
        let near = closest_to_origin(&s).unwrap();
        assert!(near.h_dist < 1.0);
        assert_eq!(near.omega_ratio, 1.0 / 80.0);
    }
}
