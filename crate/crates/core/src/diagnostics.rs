//! Leave-one-out influence and greedy scene removal.

use alloc::string::String;
use alloc::vec::Vec;

use crate::directional::{summarize, DirectionSample, OpsSummary};
use crate::error::StatsError;

/// Statistics of the sample with one scene deleted. The numeric fields are
/// `None` when the deletion leaves a focal mean.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LooRow {
    pub index: usize,
    pub scene_id: String,
    pub total_variance: Option<f64>,
    pub se: Option<f64>,
    pub z: Option<f64>,
    pub ci_lower: Option<f64>,
    pub focal: bool,
}

fn check_input(sample: &DirectionSample, alpha: f64) -> Result<(), StatsError> {
    if sample.n() < 3 {
        return Err(StatsError::InsufficientSample { needed: 3, found: sample.n() });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidLevel { alpha });
    }
    Ok(())
}

fn deletion_summary(
    sample: &DirectionSample,
    i: usize,
    alpha: f64,
    df: Option<usize>,
) -> Result<Option<OpsSummary>, StatsError> {
    match summarize(&sample.without(i), alpha, df) {
        Ok(s) => Ok(Some(s)),
        Err(StatsError::FocalMean { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn leave_one_out(sample: &DirectionSample, alpha: f64, df: Option<usize>) -> Result<Vec<LooRow>, StatsError> {
    check_input(sample, alpha)?;
    (0..sample.n())
        .map(|i| {
            let s = deletion_summary(sample, i, alpha, df)?;
            Ok(LooRow {
                index: i,
                scene_id: sample.scene_ids()[i].clone(),
                total_variance: s.as_ref().map(|s| s.total_variance),
                se: s.as_ref().map(|s| s.se),
                z: s.as_ref().and_then(|s| s.z),
                ci_lower: s.as_ref().map(|s| s.ci_lower),
                focal: s.is_none(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    /// The current lower confidence limit is already ≤ 0.
    LowerEndpointNonpositive,
    MaxRemovalsReached,
    /// No single deletion raises the lower limit.
    NoImprovement,
    /// Fewer than three scenes would remain after another deletion.
    SampleExhausted,
}

/// Which deletion the greedy search takes at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReductionRule {
    /// Remove the scene whose deletion raises the lower limit the most.
    #[default]
    MaximizeLower,
    /// Remove the scene whose deletion lowers it the most, i.e. the scene
    /// contributing most to a rejection.
    MinimizeLower,
}

impl ReductionRule {
    fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            ReductionRule::MaximizeLower => candidate > incumbent,
            ReductionRule::MinimizeLower => candidate < incumbent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReductionStep {
    pub removed_scene_id: String,
    /// Position of the removed scene in the original sample.
    pub removed_index: usize,
    pub summary: OpsSummary,
    pub ci_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReductionTrace {
    pub alpha_ref: f64,
    pub rule: ReductionRule,
    pub max_removals: usize,
    /// Lower limit of the full sample before any removal.
    pub initial_ci_lower: f64,
    pub steps: Vec<ReductionStep>,
    pub final_sample_ids: Vec<String>,
    /// Original positions of the surviving scenes.
    pub final_indices: Vec<usize>,
    pub stopped_reason: StopReason,
}

/// Default removal cap `⌊n / 4⌋`.
pub fn default_max_removals(n: usize) -> usize {
    n / 4
}

/// Repeatedly deletes the scene whose removal maximises the lower limit of
/// the `1 - α_ref` interval. Stops before removing once the current lower
/// limit is ≤ 0, when no deletion improves it, or at `max_removals`. Ties
/// go to the scene with the smallest original position.
pub fn greedy_reduce(
    sample: &DirectionSample,
    alpha_ref: f64,
    max_removals: Option<usize>,
    df: Option<usize>,
) -> Result<ReductionTrace, StatsError> {
    greedy_reduce_by(sample, alpha_ref, max_removals, df, ReductionRule::MaximizeLower)
}

/// [`greedy_reduce`] with an explicit choice of which deletion counts as an
/// improvement.
pub fn greedy_reduce_by(
    sample: &DirectionSample,
    alpha_ref: f64,
    max_removals: Option<usize>,
    df: Option<usize>,
    rule: ReductionRule,
) -> Result<ReductionTrace, StatsError> {
    check_input(sample, alpha_ref)?;
    let max_removals = max_removals.unwrap_or_else(|| default_max_removals(sample.n()));
    let mut alive: Vec<usize> = (0..sample.n()).collect();
    let mut current = sample.clone();
    let initial_ci_lower = summarize(&current, alpha_ref, df)?.ci_lower;
    let mut lower = initial_ci_lower;
    let mut steps = Vec::new();
    let stopped_reason = loop {
        if !(lower > 0.0) {
            break StopReason::LowerEndpointNonpositive;
        }
        if steps.len() >= max_removals {
            break StopReason::MaxRemovalsReached;
        }
        if current.n() <= 3 {
            break StopReason::SampleExhausted;
        }
        // candidate positions are scanned in increasing original index, so a
        // strict comparison keeps the smallest index on ties
        let mut best: Option<(usize, OpsSummary)> = None;
        for k in 0..current.n() {
            if let Some(s) = deletion_summary(&current, k, alpha_ref, df)? {
                if best.as_ref().is_none_or(|(_, b)| rule.better(s.ci_lower, b.ci_lower)) {
                    best = Some((k, s));
                }
            }
        }
        match best {
            Some((k, s)) if rule.better(s.ci_lower, lower) => {
                let original = alive.remove(k);
                lower = s.ci_lower;
                steps.push(ReductionStep {
                    removed_scene_id: sample.scene_ids()[original].clone(),
                    removed_index: original,
                    ci_lower: s.ci_lower,
                    summary: s,
                });
                current = current.without(k);
            }
            _ => break StopReason::NoImprovement,
        }
    };
    Ok(ReductionTrace {
        alpha_ref,
        rule,
        max_removals,
        initial_ci_lower,
        steps,
        final_sample_ids: current.scene_ids().to_vec(),
        final_indices: alive,
        stopped_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identical_vectors_give_zero_rows() {
        let s = DirectionSample::from_vectors(vec![vec![0.0, 0.6, 0.8]; 5]).unwrap();
        let rows = leave_one_out(&s, 0.05, None).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.total_variance == Some(0.0) && !r.focal));
    }

    #[test]
    fn outlier_row_has_minimal_variance() {
        let mut v = vec![vec![0.0, 0.0, 1.0]; 6];
        v.push(vec![1.0, 0.0, 0.0]);
        let s = DirectionSample::from_vectors(v).unwrap();
        let rows = leave_one_out(&s, 0.05, None).unwrap();
        assert_eq!(rows[6].total_variance, Some(0.0));
        assert!(rows[..6].iter().all(|r| r.total_variance.unwrap() > 0.0));
    }

    #[test]
    fn focal_deletions_are_flagged() {
        let s = DirectionSample::from_vectors(vec![
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let rows = leave_one_out(&s, 0.05, None).unwrap();
        assert!(rows[4].focal && rows[4].total_variance.is_none());
        assert!(!rows[0].focal);
    }

    #[test]
    fn already_compatible_sample_removes_nothing() {
        let s = DirectionSample::from_vectors(vec![vec![0.0, 0.0, 1.0]; 6]).unwrap();
        let t = greedy_reduce(&s, 0.05, None, None).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.stopped_reason, StopReason::LowerEndpointNonpositive);
        assert_eq!(t.final_sample_ids.len(), 6);
    }

    #[test]
    fn minimize_rule_drives_the_limit_down() {
        let s = crate::synth::tangent_gaussian_sample(&[0.0, 0.6, 0.8], 0.1, 30, 3).unwrap();
        let t = greedy_reduce_by(&s, 0.05, Some(3), None, ReductionRule::MinimizeLower).unwrap();
        assert!(t.initial_ci_lower > 0.0);
        let mut prev = t.initial_ci_lower;
        for step in &t.steps {
            assert!(step.ci_lower < prev);
            prev = step.ci_lower;
        }
        let first =
            (0..30).map(|k| summarize(&s.without(k), 0.05, None).unwrap().ci_lower).fold(f64::INFINITY, f64::min);
        assert_eq!(t.steps[0].ci_lower, first);
        assert_eq!(t.rule, ReductionRule::MinimizeLower);
    }

    #[test]
    fn small_samples_are_rejected() {
        let s = DirectionSample::from_vectors(vec![vec![0.0, 0.0, 1.0]; 2]).unwrap();
        assert!(matches!(greedy_reduce(&s, 0.05, None, None), Err(StatsError::InsufficientSample { .. })));
        let s = DirectionSample::from_vectors(vec![vec![0.0, 0.0, 1.0]; 4]).unwrap();
        assert!(matches!(greedy_reduce(&s, 1.5, None, None), Err(StatsError::InvalidLevel { .. })));
    }
}
