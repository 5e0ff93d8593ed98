//! Input formats, pipeline orchestration and reports for oriented projective
//! shape coplanarity studies.

pub mod analysis;
pub mod config;
pub mod error;
pub mod input;
pub mod mc;
pub mod output;

pub use analysis::{analyze_scenes, run_analysis, AnalysisReport};
pub use config::StudyConfig;
pub use error::CliError;
pub use input::parse_landmarks;
pub use output::emit_outputs;
