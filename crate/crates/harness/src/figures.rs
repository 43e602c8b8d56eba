//! Plot-ready CSV files, one per reproduced figure, derived from a report
//! alone.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::{HarnessError, Result};
use crate::report::{Report, XSweepRow};

/// Writes `rows` to `dir/stem.csv` or `dir/stem.json`.
pub fn write_table<T: Serialize>(dir: &Path, stem: &str, format: OutputFormat, rows: &[T]) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.as_str()));
    let file = std::fs::File::create(&path).map_err(HarnessError::io(&path))?;
    let w = std::io::BufWriter::new(file);
    match format {
        OutputFormat::Csv => {
            let mut out = csv::Writer::from_writer(w);
            for r in rows {
                out.serialize(r).map_err(|e| HarnessError::Core(e.into()))?;
            }
            out.flush().map_err(HarnessError::io(&path))?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(w, rows).map_err(|e| HarnessError::Core(e.into()))?;
        }
    }
    Ok(path)
}

#[derive(Serialize)]
struct ScenarioRow<'a> {
    scenario: &'a str,
    policy: &'a str,
    stashing: bool,
    hit_rate: f64,
    partial_hit_rate: f64,
    byte_hit_rate: f64,
    local_mb: f64,
    user_mb: f64,
    stash_mb: f64,
    cost_user_cents: f64,
    cost_stash_cents: f64,
    cost_system_cents: f64,
    #[serde(rename = "expected_T_s")]
    expected_t_s: f64,
    total_stored_mb: f64,
}

pub fn scenario_rows(report: &Report) -> Vec<impl Serialize + '_> {
    report
        .scenarios
        .iter()
        .map(|s| {
            let m = &s.metrics;
            ScenarioRow {
                scenario: &s.scenario,
                policy: &s.policy,
                stashing: s.stashing,
                hit_rate: m.hit_rate,
                partial_hit_rate: m.partial_hit_rate,
                byte_hit_rate: m.byte_hit_rate,
                local_mb: m.local_mb,
                user_mb: m.user_mb,
                stash_mb: m.stash_mb,
                cost_user_cents: m.user_cost_cents,
                cost_stash_cents: m.stash_cost_cents,
                cost_system_cents: m.system_cost_cents,
                expected_t_s: m.mean_completion_s,
                total_stored_mb: m.total_stored_mb,
            }
        })
        .collect()
}

/// Emits every figure the report has data for. Returns the written paths.
pub fn emit_figures(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let csv = OutputFormat::Csv;
    let mut written = Vec::new();
    if !report.x_sweep.is_empty() {
        written.push(write_table(dir, "fig5b_completion_vs_x", csv, &report.x_sweep)?);
    } else if !report.model_curve.is_empty() {
        let rows: Vec<XSweepRow> = report
            .model_curve
            .iter()
            .map(|p| XSweepRow {
                x: p.x,
                model_t_s: p.expected_t_s,
                sim_t_s: None,
                sim_hit_rate: None,
                sim_misses: None,
                model_cost_user_cents: p.cost_user_cents,
                model_cost_stash_cents: p.cost_stash_cents,
                sim_cost_user_cents: None,
                sim_cost_stash_cents: None,
            })
            .collect();
        written.push(write_table(dir, "fig5b_completion_vs_x", csv, &rows)?);
    }
    if !report.hit_rate_curve.is_empty() {
        written.push(write_table(dir, "fig6_hitrate_vs_n", csv, &report.hit_rate_curve)?);
    }
    if !report.s_sweep.is_empty() {
        written.push(write_table(dir, "fig9_s_sweep", csv, &report.s_sweep)?);
    }
    if !report.rv_sweep.is_empty() {
        written.push(write_table(dir, "fig10_rv_sweep", csv, &report.rv_sweep)?);
    }
    if !report.scenarios.is_empty() {
        written.push(write_table(dir, "fig11_scenarios", csv, &scenario_rows(report))?);
    }
    if !report.h_surface.is_empty() {
        written.push(write_table(dir, "fig12_h_surface", csv, &report.h_surface)?);
    }
    Ok(written)
}
