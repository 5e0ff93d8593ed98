//! Report and plot-data files.
//!
//! CSV floats carry 17 significant digits (`{:.16e}`), enough to round-trip
//! any `f64`. JSON floats use serde_json's shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use opshape_core::directional::angular_distances;
use opshape_core::{DirectionSample, LandmarkScene, LooRow};

use crate::analysis::AnalysisReport;
use crate::error::CliError;

pub const REPORT_JSON: &str = "report.json";
pub const SPHERE_POINTS: &str = "sphere_points.csv";
pub const MEAN_DIRECTION: &str = "mean_direction.csv";
pub const ANGLES_FULL: &str = "angles_full.csv";
pub const ANGLES_REDUCED: &str = "angles_reduced.csv";
pub const LOO_TABLE: &str = "loo_table.csv";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn coordinate_names(dim: usize) -> Vec<String> {
    if dim == 3 {
        vec!["x".into(), "y".into(), "z".into()]
    } else {
        (1..=dim).map(|i| format!("u{i}")).collect()
    }
}

/// Scene ids may contain commas or quotes.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report_json(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
    s.push('\n');
    s
}

pub fn sphere_points_csv(report: &AnalysisReport) -> String {
    let sample = &report.sample;
    let multi = sample.q() > 1;
    let mut out = String::from(if multi { "scene,block," } else { "scene," });
    out += &coordinate_names(sample.dim()).join(",");
    out += ",removed\n";
    let removed = report.removed_scene_ids();
    for (i, id) in sample.scene_ids().iter().enumerate() {
        let flag = u8::from(removed.contains(id));
        for b in 0..sample.q() {
            out += &field(id);
            if multi {
                let _ = write!(out, ",{}", b + 1);
            }
            for v in sample.unit(i, b) {
                let _ = write!(out, ",{}", fmt_f64(*v));
            }
            let _ = writeln!(out, ",{flag}");
        }
    }
    out
}

pub fn mean_direction_csv(report: &AnalysisReport) -> String {
    let s = &report.full.summary;
    let multi = s.q > 1;
    let mut out = String::from(if multi { "block," } else { "" });
    out += &coordinate_names(s.dim).join(",");
    out += ",resultant_length\n";
    for (b, (m, r)) in s.extrinsic_means.iter().zip(&s.resultant_lengths).enumerate() {
        if multi {
            let _ = write!(out, "{},", b + 1);
        }
        let coords: Vec<String> = m.iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(out, "{},{}", coords.join(","), fmt_f64(*r));
    }
    out
}

pub fn angles_csv(sample: &DirectionSample) -> Result<String, CliError> {
    let theta = angular_distances(sample)?;
    let mut out = String::from("scene");
    if sample.q() == 1 {
        out += ",theta_radians";
    } else {
        for b in 1..=sample.q() {
            let _ = write!(out, ",theta_radians_{b}");
        }
    }
    out.push('\n');
    for (i, id) in sample.scene_ids().iter().enumerate() {
        out += &field(id);
        for block in &theta {
            let _ = write!(out, ",{}", fmt_f64(block[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn loo_table_csv(rows: &[LooRow]) -> String {
    let mut out = String::from("index,scene,total_variance,se,z,ci_lower,focal\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.index,
            field(&r.scene_id),
            fmt_opt(r.total_variance),
            fmt_opt(r.se),
            fmt_opt(r.z),
            fmt_opt(r.ci_lower),
            u8::from(r.focal)
        );
    }
    out
}

/// Landmark table in the input format, so synthetic studies feed straight
/// back into `analyze`.
pub fn landmarks_csv(scenes: &[LandmarkScene]) -> String {
    let dim = scenes.first().map_or(2, |s| s.dim());
    let mut out = String::from("scene,landmark,");
    out += &if dim == 2 { vec!["x".to_string(), "y".to_string()] } else { coordinate_names(dim) }.join(",");
    out.push('\n');
    for s in scenes {
        for (j, p) in s.points().iter().enumerate() {
            out += &field(&s.scene_id);
            let _ = write!(out, ",{}", j + 1);
            for v in p {
                let _ = write!(out, ",{}", fmt_f64(*v));
            }
            out.push('\n');
        }
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(CliError::io(&path))?;
    Ok(path)
}

/// Writes the report and the five CSV files into `outdir`, creating it if
/// needed. Returns the written paths.
pub fn emit_outputs(report: &AnalysisReport, outdir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(outdir).map_err(CliError::io(outdir))?;
    let reduced = report
        .diagnostics
        .as_ref()
        .map(|d| report.sample.select(&d.reduction.final_indices))
        .unwrap_or_else(|| report.sample.clone());
    Ok(vec![
        write(outdir, REPORT_JSON, &report_json(report))?,
        write(outdir, SPHERE_POINTS, &sphere_points_csv(report))?,
        write(outdir, MEAN_DIRECTION, &mean_direction_csv(report))?,
        write(outdir, ANGLES_FULL, &angles_csv(&report.sample)?)?,
        write(outdir, ANGLES_REDUCED, &angles_csv(&reduced)?)?,
        write(outdir, LOO_TABLE, &loo_table_csv(report.diagnostics.as_ref().map_or(&[], |d| &d.leave_one_out)))?,
    ])
}

pub fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|source| CliError::Json { path: path.into(), source })?;
    s.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, s).map_err(CliError::io(path))
}
