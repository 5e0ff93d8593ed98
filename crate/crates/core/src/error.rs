use alloc::string::String;
use core::fmt;

/// Failures while building frames or oriented coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// A landmark coordinate was NaN or infinite.
    InvalidLandmark { label: usize },
    /// The first `m + 1` frame points are (numerically) linearly dependent,
    /// or the unit point lies on a frame hyperplane.
    DegenerateFrame { reason: &'static str },
    /// The transformed point is too close to the zero vector.
    DegeneratePoint,
    /// `det(H) < 0` in an even ambient dimension, where negating `H` does
    /// not change the sign of the determinant.
    OrientationUnresolvable,
    /// Dimensions of inputs disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// A frame or remaining label is missing, repeated or out of range.
    InvalidFrameSpec { reason: String },
    /// Wraps another geometry error with the scene it came from.
    InScene { scene_id: String, source: alloc::boxed::Box<GeometryError> },
}

impl GeometryError {
    pub fn in_scene(self, scene_id: &str) -> Self {
        GeometryError::InScene { scene_id: scene_id.into(), source: alloc::boxed::Box::new(self) }
    }
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::InvalidLandmark { label } => write!(f, "landmark {label} has a non-finite coordinate"),
            GeometryError::DegenerateFrame { reason } => write!(f, "degenerate frame: {reason}"),
            GeometryError::DegeneratePoint => write!(f, "point maps to the chart's singular locus"),
            GeometryError::OrientationUnresolvable => {
                write!(f, "negative chart determinant cannot be fixed by a global sign in even dimension")
            }
            GeometryError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            GeometryError::InvalidFrameSpec { reason } => write!(f, "invalid frame specification: {reason}"),
            GeometryError::InScene { scene_id, source } => write!(f, "scene {scene_id}: {source}"),
        }
    }
}

/// Failures of the directional statistics and comparators.
#[derive(Debug, Clone, PartialEq)]
pub enum StatsError {
    EmptySample,
    /// Fewer rows than the operation needs.
    InsufficientSample {
        needed: usize,
        found: usize,
    },
    /// The mean of block `block` is (numerically) zero, so the extrinsic
    /// mean direction is undefined.
    FocalMean {
        block: usize,
    },
    /// The standard error vanished; `p_value` is the conventional value
    /// reported in that case (1 when `tS = 0`, 0 otherwise).
    DegenerateTest {
        p_value: f64,
    },
    InvalidLevel {
        alpha: f64,
    },
    /// A row is not a unit vector, or has the wrong shape.
    InvalidSample {
        reason: String,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::EmptySample => write!(f, "empty sample"),
            StatsError::InsufficientSample { needed, found } => {
                write!(f, "sample too small: need at least {needed} rows, found {found}")
            }
            StatsError::FocalMean { block } => write!(f, "mean vector of block {block} vanishes (focal sample)"),
            StatsError::DegenerateTest { p_value } => {
                write!(f, "standard error is zero; degenerate test (conventional p = {p_value})")
            }
            StatsError::InvalidLevel { alpha } => write!(f, "significance level {alpha} is not in (0, 1)"),
            StatsError::InvalidSample { reason } => write!(f, "invalid direction sample: {reason}"),
            StatsError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

#[cfg(feature = "std")]
impl std::error::Error for StatsError {}

/// Failures of the synthetic scene generator.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    /// A landmark has depth below the camera's near limit.
    BehindCamera {
        label: usize,
        depth: f64,
    },
    /// Rejection sampling ran out of attempts.
    GenerationFailed {
        what: &'static str,
        attempts: usize,
    },
    InvalidParameter {
        reason: String,
    },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::BehindCamera { label, depth } => {
                write!(f, "landmark {label} is behind the camera (depth {depth})")
            }
            SynthError::GenerationFailed { what, attempts } => {
                write!(f, "could not generate a valid {what} in {attempts} attempts")
            }
            SynthError::InvalidParameter { reason } => write!(f, "invalid parameter: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SynthError {}
