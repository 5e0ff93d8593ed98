//! The full pipeline: registration, OPS test, PS comparator, influence
//! diagnostics and the reduced sample.

use opshape_core::geometry::scene_to_directions;
use opshape_core::{
    coplanarity_test, greedy_reduce_by, leave_one_out, vw, CoplanarityTest, DirectionSample, LandmarkScene, LooRow,
    ReductionTrace, VwSummary,
};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigEcho, StudyConfig};
use crate::error::CliError;
use crate::input::{parse_landmarks, ParsedInput};

pub const SOFTWARE: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedScene {
    pub scene_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub software: String,
    pub input_name: String,
    pub input_sha256: String,
    pub config: ConfigEcho,
    pub skipped_scenes: Vec<SkippedScene>,
    /// Scenes whose frame homography needed a sign flip to reach det > 0.
    pub det_sign_flipped: Vec<String>,
    /// Some but not all scenes were flipped.
    pub mixed_orientation: bool,
    pub warnings: Vec<String>,
}

/// Influence diagnostics and the OPS-defined reduced sample. Absent when the
/// sample has fewer than three scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub leave_one_out: Vec<LooRow>,
    pub reduction: ReductionTrace,
    pub reduced: CoplanarityTest,
    pub vw_reduced: VwSummary,
    pub removed_scene_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub sample: DirectionSample,
    pub full: CoplanarityTest,
    pub vw_full: VwSummary,
    pub diagnostics: Option<Diagnostics>,
}

impl AnalysisReport {
    /// The reduced-sample test, or the full one when nothing was removed.
    pub fn reduced(&self) -> &CoplanarityTest {
        self.diagnostics.as_ref().map_or(&self.full, |d| &d.reduced)
    }

    pub fn removed_scene_ids(&self) -> &[String] {
        self.diagnostics.as_ref().map_or(&[], |d| &d.removed_scene_ids)
    }

    pub fn any_degeneracy(&self) -> Option<String> {
        let mut found = Vec::new();
        if self.full.summary.degenerate_test {
            found.push("full-sample standard error is zero");
        }
        if self.vw_full.focal_warning {
            found.push("full-sample VW mean axis is not unique");
        }
        if let Some(d) = &self.diagnostics {
            if d.reduced.summary.degenerate_test {
                found.push("reduced-sample standard error is zero");
            }
            if d.vw_reduced.focal_warning {
                found.push("reduced-sample VW mean axis is not unique");
            }
            if d.leave_one_out.iter().any(|r| r.focal) {
                found.push("a leave-one-out deletion has a focal mean");
            }
        }
        (!found.is_empty()).then(|| found.join("; "))
    }
}

/// Registered OPS directions with per-scene bookkeeping.
#[derive(Debug, Clone)]
pub struct Registration {
    pub sample: DirectionSample,
    pub skipped: Vec<SkippedScene>,
    pub det_sign_flipped: Vec<String>,
}

pub fn register(scenes: &[LandmarkScene], config: &StudyConfig) -> Result<Registration, CliError> {
    let spec = config.frame_spec()?;
    let mut rows = Vec::with_capacity(scenes.len());
    let mut ids = Vec::with_capacity(scenes.len());
    let mut skipped = Vec::new();
    let mut flipped = Vec::new();
    for scene in scenes {
        match scene_to_directions(scene, &spec) {
            Ok(d) => {
                if d.det_sign_flipped {
                    flipped.push(scene.scene_id.clone());
                }
                rows.push(d.directions);
                ids.push(scene.scene_id.clone());
            }
            Err(e) if config.skip_degenerate => {
                skipped.push(SkippedScene { scene_id: scene.scene_id.clone(), reason: e.to_string() })
            }
            Err(e) => return Err(e.in_scene(&scene.scene_id).into()),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Stats(opshape_core::StatsError::EmptySample));
    }
    let sample = DirectionSample::new(rows, ids)?;
    Ok(Registration { sample, skipped, det_sign_flipped: flipped })
}

/// Diagnostics block alone; `None` for fewer than three scenes.
pub fn diagnose(sample: &DirectionSample, config: &StudyConfig) -> Result<Option<Diagnostics>, CliError> {
    if sample.n() < 3 {
        return Ok(None);
    }
    let leave_one_out = leave_one_out(sample, config.alpha, config.df_override)?;
    let reduction =
        greedy_reduce_by(sample, config.alpha_ref, config.max_removals, config.df_override, config.reduction_rule)?;
    let reduced_sample = sample.select(&reduction.final_indices);
    let reduced = coplanarity_test(&reduced_sample, config.alpha, config.df_override)?;
    let vw_reduced = vw::total_variance_ps(&axes(&reduced_sample))?;
    let removed_scene_ids = reduction.steps.iter().map(|s| s.removed_scene_id.clone()).collect();
    Ok(Some(Diagnostics { leave_one_out, reduction, reduced, vw_reduced, removed_scene_ids }))
}

/// First-block directions as VW axes; the comparator is sign-blind, so the
/// oriented vectors serve directly.
pub fn axes(sample: &DirectionSample) -> Vec<Vec<f64>> {
    (0..sample.n()).map(|i| sample.unit(i, 0).to_vec()).collect()
}

pub fn analyze_scenes(
    scenes: &[LandmarkScene],
    config: &StudyConfig,
    input_name: &str,
    input_sha256: &str,
) -> Result<AnalysisReport, CliError> {
    config.validate()?;
    let reg = register(scenes, config)?;
    let sample = reg.sample;
    let full = coplanarity_test(&sample, config.alpha, config.df_override)?;
    let vw_full = vw::total_variance_ps(&axes(&sample))?;
    let diagnostics = diagnose(&sample, config)?;

    let mut warnings = Vec::new();
    let mixed = !reg.det_sign_flipped.is_empty() && reg.det_sign_flipped.len() < sample.n();
    if mixed {
        warnings.push(format!(
            "{} of {} scenes needed a determinant sign flip; orientations may be inconsistent",
            reg.det_sign_flipped.len(),
            sample.n()
        ));
    }
    if sample.q() > 1 {
        warnings.push("the VW comparator uses the first block only".into());
    }
    if diagnostics.is_none() {
        warnings.push("fewer than three scenes; leave-one-out and reduction skipped".into());
    }
    let report = AnalysisReport {
        provenance: Provenance {
            software: SOFTWARE.into(),
            input_name: input_name.into(),
            input_sha256: input_sha256.into(),
            config: config.echo(),
            skipped_scenes: reg.skipped,
            det_sign_flipped: reg.det_sign_flipped,
            mixed_orientation: mixed,
            warnings,
        },
        sample,
        full,
        vw_full,
        diagnostics,
    };
    if config.strict {
        if let Some(what) = report.any_degeneracy() {
            return Err(CliError::StrictDegeneracy(what));
        }
    }
    Ok(report)
}

pub fn run_analysis(config: &StudyConfig) -> Result<AnalysisReport, CliError> {
    let ParsedInput { scenes, sha256, name } = parse_landmarks(&config.input)?;
    analyze_scenes(&scenes, config, &name, &sha256)
}
