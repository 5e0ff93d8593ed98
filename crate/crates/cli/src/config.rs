use std::path::PathBuf;

use opshape_core::{FrameSpec, ReductionRule};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Everything that determines an analysis run.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub frame_labels: Vec<usize>,
    pub remaining_labels: Vec<usize>,
    pub alpha: f64,
    pub alpha_ref: f64,
    pub df_override: Option<usize>,
    /// Cap on greedy removals; `None` means `⌊n/4⌋`.
    pub max_removals: Option<usize>,
    pub reduction_rule: ReductionRule,
    pub skip_degenerate: bool,
    pub strict: bool,
    pub seed: u64,
    pub input: PathBuf,
    pub out: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            frame_labels: vec![1, 2, 4, 3],
            remaining_labels: vec![5],
            alpha: 0.05,
            alpha_ref: 0.05,
            df_override: None,
            max_removals: None,
            reduction_rule: ReductionRule::MaximizeLower,
            skip_degenerate: false,
            strict: false,
            seed: 7,
            input: PathBuf::new(),
            out: None,
        }
    }
}

impl StudyConfig {
    pub fn frame_spec(&self) -> Result<FrameSpec, CliError> {
        FrameSpec::new(self.frame_labels.clone(), self.remaining_labels.clone())
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, a) in [("alpha", self.alpha), ("alpha-ref", self.alpha_ref)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(CliError::Config(format!("{name} must lie in (0, 1), got {a}")));
            }
        }
        if self.df_override == Some(0) {
            return Err(CliError::Config("df must be positive".into()));
        }
        self.frame_spec().map(|_| ())
    }

    /// The settings that influence results, without any paths, so reports
    /// do not depend on where the input lives.
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            frame_labels: self.frame_labels.clone(),
            remaining_labels: self.remaining_labels.clone(),
            alpha: self.alpha,
            alpha_ref: self.alpha_ref,
            df_override: self.df_override,
            max_removals: self.max_removals,
            reduction_rule: self.reduction_rule,
            skip_degenerate: self.skip_degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub frame_labels: Vec<usize>,
    pub remaining_labels: Vec<usize>,
    pub alpha: f64,
    pub alpha_ref: f64,
    pub df_override: Option<usize>,
    pub max_removals: Option<usize>,
    pub reduction_rule: ReductionRule,
    pub skip_degenerate: bool,
}
