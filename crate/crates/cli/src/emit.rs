//! Writes a [`RunReport`] and its plot tables to an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::pipeline::{Outcome, RunReport};

pub const REPORT_FILE: &str = "report.json";
pub const TIMINGS_FILE: &str = "timings.json";
pub const CERTIFICATE_FILE: &str = "certificate.json";

#[derive(Serialize)]
struct GrowthRow {
    t0: f64,
    integral: f64,
}

#[derive(Serialize)]
struct TruncationRow {
    v: f64,
    integral: f64,
}

#[derive(Serialize)]
struct LadderRow {
    radius: f64,
    total_curvature: f64,
    second_form_l2: f64,
}

#[derive(Serialize)]
struct ParabolaRow {
    epsilon: f64,
    value: f64,
    value_error: f64,
    norm: f64,
    rayleigh_excess: f64,
}

#[derive(Serialize)]
struct GroundRow {
    s: f64,
    v: f64,
    u: f64,
    value: f64,
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r).with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush().with_context(|| format!("flushing {}", path.display()))?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `Q(φ_ε, φ_ε)` sampled on 41 points of `[ε* − w, ε* + w]`.
pub fn parabola_samples(d: &qlayer_core::certifier::QuadraticFormDecomposition<f64>) -> Vec<(f64, f64, f64, f64, f64)> {
    let center = d.eps_star;
    let w = if center != 0.0 { 2.0 * center.abs() } else { 1.0 };
    (0..=40)
        .map(|i| {
            let e = center + w * (i as f64 / 20.0 - 1.0);
            (e, d.value(e), d.value_error(e), d.norm(e), d.rayleigh_excess(e))
        })
        .collect()
}

/// Writes every artifact of `report` into `dir` and returns the paths written.
pub fn emit(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let mut out = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };
    write_text(&out(REPORT_FILE), &report.to_json())?;
    let timings: serde_json::Map<String, serde_json::Value> =
        report.timings.iter().map(|(s, t)| (s.name().to_string(), (*t).into())).collect();
    write_text(&out(TIMINGS_FILE), &(serde_json::to_string_pretty(&timings)? + "\n"))?;

    if let Some(Outcome::Ok { result }) = &report.geometry {
        write_csv(&out("curvature_profile.csv"), &result.samples)?;
    }
    if let Some(Outcome::Ok { result }) = &report.asymptotics {
        let growth = result.growth.samples.iter().map(|&(t0, integral)| GrowthRow { t0, integral });
        write_csv(&out("growth_fit.csv"), growth)?;
        let h2 = result.h2.tail.truncations.iter().map(|&(v, integral)| TruncationRow { v, integral });
        write_csv(&out("h2_truncations.csv"), h2)?;
    }
    if let Some(Outcome::Ok { result }) = &report.topology {
        let l2 = &result.white.second_form_l2.truncations;
        let rows = result.total_k.ladder.iter().zip(l2).map(|(&(radius, total_curvature), &(_, second_form_l2))| {
            LadderRow { radius, total_curvature, second_form_l2 }
        });
        write_csv(&out("total_curvature_ladder.csv"), rows)?;
    }
    if let Some(Outcome::Ok { result }) = &report.certify {
        let cert = serde_json::to_string_pretty(&result.certificate)? + "\n";
        write_text(&out(CERTIFICATE_FILE), &cert)?;
        let rows = parabola_samples(&result.certificate.decomposition).into_iter().map(
            |(epsilon, value, value_error, norm, rayleigh_excess)| ParabolaRow {
                epsilon,
                value,
                value_error,
                norm,
                rayleigh_excess,
            },
        );
        write_csv(&out("form_parabola.csv"), rows)?;
    }
    if let Some(Outcome::Ok { result }) = &report.spectrum {
        write_csv(&out("eigenvalue_ladder.csv"), &result.scan.rows)?;
        let rows = result.finest.ground_state.iter().map(|&[s, v, u, value]| GroundRow { s, v, u, value });
        write_csv(&out("ground_state.csv"), rows)?;
    }
    Ok(written)
}
