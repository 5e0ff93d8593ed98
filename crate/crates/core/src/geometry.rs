//! Oriented projective frames and the coordinates they induce.
//!
//! A scene is lifted to homogeneous coordinates `x̃ = (x, 1)`. The first
//! `m + 1` frame points form the columns of `U`; the last frame point is the
//! unit point. Solving `U λ = ũ` gives the frame scalars, and columns with a
//! negative scalar are negated so the unit point becomes a positive
//! combination of the others (an oriented frame). The normalising
//! homography is then `H = diag(λ)⁻¹ U'⁻¹`, negated if needed so that
//! `det H > 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::directional::DirectionSample;
use crate::error::GeometryError;
use crate::linalg::{self, Matrix};

/// Relative threshold on `|det U| / Π‖U_j‖` below which a frame is singular.
pub const FRAME_DET_TOLERANCE: f64 = 1e-10;
/// Relative threshold on `|λ_j| / ‖λ‖∞` below which the unit point sits on a
/// frame hyperplane.
pub const LAMBDA_TOLERANCE: f64 = 1e-10;
/// Relative threshold on `‖H x̃‖ / (‖H‖_F ‖x̃‖)`.
pub const POINT_TOLERANCE: f64 = 1e-12;

/// One image's labelled landmarks; label `j` lives at index `j - 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandmarkScene {
    pub scene_id: String,
    points: Vec<Vec<f64>>,
}

impl LandmarkScene {
    pub fn new(scene_id: impl Into<String>, points: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(GeometryError::DimensionMismatch { expected: 1, found: 0 });
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(GeometryError::InvalidLandmark { label: i + 1 });
            }
        }
        Ok(LandmarkScene { scene_id: scene_id.into(), points })
    }

    /// Number of landmarks `k`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension `m` of the image space.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Coordinates of a 1-based landmark label.
    pub fn point(&self, label: usize) -> Option<&[f64]> {
        label.checked_sub(1).and_then(|i| self.points.get(i)).map(Vec::as_slice)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// Ordered frame labels (`m + 2` of them) and ordered remaining labels.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameSpec {
    frame_labels: Vec<usize>,
    remaining_labels: Vec<usize>,
}

impl FrameSpec {
    pub fn new(frame_labels: Vec<usize>, remaining_labels: Vec<usize>) -> Result<Self, GeometryError> {
        let bad = |reason: String| Err(GeometryError::InvalidFrameSpec { reason });
        if frame_labels.len() < 3 {
            return bad(format!("need at least 3 frame labels, got {}", frame_labels.len()));
        }
        if remaining_labels.is_empty() {
            return bad("no remaining labels".into());
        }
        let mut all: Vec<usize> = frame_labels.iter().chain(&remaining_labels).copied().collect();
        if all.contains(&0) {
            return bad("labels are 1-based".into());
        }
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return bad("labels must be distinct across frame and remaining lists".into());
        }
        Ok(FrameSpec { frame_labels, remaining_labels })
    }

    /// The planar five-landmark layout `F = {1,2,4,3}`, `R = {5}`.
    pub fn planar_pentad() -> Self {
        FrameSpec { frame_labels: alloc::vec![1, 2, 4, 3], remaining_labels: alloc::vec![5] }
    }

    pub fn frame_labels(&self) -> &[usize] {
        &self.frame_labels
    }

    pub fn remaining_labels(&self) -> &[usize] {
        &self.remaining_labels
    }

    /// Image dimension `m` implied by the frame size.
    pub fn dim(&self) -> usize {
        self.frame_labels.len() - 2
    }

    /// Number of remaining coordinates `q`.
    pub fn q(&self) -> usize {
        self.remaining_labels.len()
    }

    /// Checks the spec against a scene of `k` landmarks in `R^m`.
    pub fn check(&self, k: usize, m: usize) -> Result<(), GeometryError> {
        if self.dim() != m {
            return Err(GeometryError::InvalidFrameSpec {
                reason: format!("{} frame labels do not match image dimension {m}", self.frame_labels.len()),
            });
        }
        if let Some(l) = self.frame_labels.iter().chain(&self.remaining_labels).find(|&&l| l > k) {
            return Err(GeometryError::InvalidFrameSpec { reason: format!("label {l} exceeds k = {k}") });
        }
        Ok(())
    }
}

/// Nonzero vector in `R^{m+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoint(Vec<f64>);

impl HomogeneousPoint {
    pub fn new(v: Vec<f64>) -> Result<Self, GeometryError> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidLandmark { label: 0 });
        }
        if v.iter().all(|x| *x == 0.0) {
            return Err(GeometryError::DegeneratePoint);
        }
        Ok(HomogeneousPoint(v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `P x̃` for a square matrix `P`.
    pub fn transformed(&self, p: &Matrix) -> Result<Self, GeometryError> {
        HomogeneousPoint::new(p.mul_vec(&self.0))
    }

    pub fn scaled(&self, s: f64) -> Result<Self, GeometryError> {
        HomogeneousPoint::new(self.0.iter().map(|x| x * s).collect())
    }
}

/// Appends a trailing 1.
pub fn lift(point: &[f64]) -> Result<HomogeneousPoint, GeometryError> {
    if point.iter().any(|x| !x.is_finite()) {
        return Err(GeometryError::InvalidLandmark { label: 0 });
    }
    let mut v = Vec::with_capacity(point.len() + 1);
    v.extend_from_slice(point);
    v.push(1.0);
    Ok(HomogeneousPoint(v))
}

/// Result of solving for the unit point in the frame basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameScalars {
    /// Strictly positive scalars with `U' λ = ũ_{m+2}`.
    pub lambda: Vec<f64>,
    /// Frame matrix whose columns are the sign-adjusted representatives.
    pub adjusted: Matrix,
    /// Which columns were negated.
    pub flipped: Vec<bool>,
}

pub fn frame_scalars(frame: &[HomogeneousPoint]) -> Result<FrameScalars, GeometryError> {
    let d = frame.first().map_or(0, HomogeneousPoint::dim);
    if d < 2 || frame.len() != d + 1 {
        return Err(GeometryError::DimensionMismatch { expected: d + 1, found: frame.len() });
    }
    if let Some(p) = frame.iter().find(|p| p.dim() != d) {
        return Err(GeometryError::DimensionMismatch { expected: d, found: p.dim() });
    }
    let columns: Vec<Vec<f64>> = frame[..d].iter().map(|p| p.0.clone()).collect();
    let u = Matrix::from_columns(&columns);
    let lu = u.lu();
    let scale: f64 = columns.iter().map(|c| linalg::norm(c)).product();
    let det = lu.determinant();
    if !(libm::fabs(det) >= FRAME_DET_TOLERANCE * scale) {
        return Err(GeometryError::DegenerateFrame { reason: "first m+1 frame points are linearly dependent" });
    }
    let mut lambda =
        lu.solve(frame[d].as_slice()).ok_or(GeometryError::DegenerateFrame { reason: "singular frame matrix" })?;
    let lmax = lambda.iter().fold(0.0_f64, |a, l| a.max(libm::fabs(*l)));
    if lambda.iter().any(|l| !(libm::fabs(*l) >= LAMBDA_TOLERANCE * lmax)) {
        return Err(GeometryError::DegenerateFrame { reason: "unit point lies on a frame hyperplane" });
    }
    let mut adjusted = u;
    let mut flipped = alloc::vec![false; d];
    for j in 0..d {
        if lambda[j] < 0.0 {
            lambda[j] = -lambda[j];
            flipped[j] = true;
            for i in 0..d {
                adjusted[(i, j)] = -adjusted[(i, j)];
            }
        }
    }
    Ok(FrameScalars { lambda, adjusted, flipped })
}

/// Normalising homography of an oriented frame.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrientedFrameChart {
    pub homography: Matrix,
    pub frame_scalars: Vec<f64>,
    /// True when `H` had to be negated to make its determinant positive.
    pub det_sign_flipped: bool,
}

pub fn oriented_frame_homography(frame: &[HomogeneousPoint]) -> Result<OrientedFrameChart, GeometryError> {
    let fs = frame_scalars(frame)?;
    let d = fs.lambda.len();
    let inv_u = fs.adjusted.inverse().ok_or(GeometryError::DegenerateFrame { reason: "singular frame matrix" })?;
    let inv_d: Vec<f64> = fs.lambda.iter().map(|l| 1.0 / l).collect();
    let mut h = Matrix::diagonal(&inv_d).matmul(&inv_u);
    let det = h.determinant();
    let mut flipped = false;
    if !(det > 0.0) {
        if d % 2 == 0 {
            return Err(GeometryError::OrientationUnresolvable);
        }
        h = h.scaled(-1.0);
        flipped = true;
    }
    Ok(OrientedFrameChart { homography: h, frame_scalars: fs.lambda, det_sign_flipped: flipped })
}

impl OrientedFrameChart {
    /// Ambient dimension `m + 1`.
    pub fn dim(&self) -> usize {
        self.homography.rows()
    }

    /// `H x̃ / ‖H x̃‖ ∈ S^m`.
    pub fn oriented_coordinate(&self, point: &HomogeneousPoint) -> Result<Vec<f64>, GeometryError> {
        if point.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: point.dim() });
        }
        let y = self.homography.mul_vec(point.as_slice());
        let n = linalg::norm(&y);
        let scale = self.homography.frobenius_norm() * linalg::norm(point.as_slice());
        if !(n >= POINT_TOLERANCE * scale) || n == 0.0 {
            return Err(GeometryError::DegeneratePoint);
        }
        Ok(y.iter().map(|v| v / n).collect())
    }

    /// Oriented coordinate with its first nonzero component made positive,
    /// a representative of the projective coordinate axis.
    pub fn axial_coordinate(&self, point: &HomogeneousPoint) -> Result<Vec<f64>, GeometryError> {
        let mut y = self.oriented_coordinate(point)?;
        linalg::canonical_sign(&mut y);
        Ok(y)
    }
}

/// Oriented coordinates of one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneDirections {
    /// One unit vector per remaining label, in spec order.
    pub directions: Vec<Vec<f64>>,
    pub det_sign_flipped: bool,
}

/// Charts `frame` and maps every point of `remaining` to the sphere.
pub fn directions_from_homogeneous(
    frame: &[HomogeneousPoint],
    remaining: &[HomogeneousPoint],
) -> Result<SceneDirections, GeometryError> {
    let chart = oriented_frame_homography(frame)?;
    let directions = remaining.iter().map(|p| chart.oriented_coordinate(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(SceneDirections { directions, det_sign_flipped: chart.det_sign_flipped })
}

fn lifted(scene: &LandmarkScene, labels: &[usize]) -> Result<Vec<HomogeneousPoint>, GeometryError> {
    labels
        .iter()
        .map(|&l| {
            let p = scene
                .point(l)
                .ok_or_else(|| GeometryError::InvalidFrameSpec { reason: format!("label {l} missing from scene") })?;
            lift(p).map_err(|_| GeometryError::InvalidLandmark { label: l })
        })
        .collect()
}

pub fn scene_to_directions(scene: &LandmarkScene, spec: &FrameSpec) -> Result<SceneDirections, GeometryError> {
    let run = || {
        spec.check(scene.len(), scene.dim())?;
        let frame = lifted(scene, spec.frame_labels())?;
        let rest = lifted(scene, spec.remaining_labels())?;
        directions_from_homogeneous(&frame, &rest)
    };
    run().map_err(|e| e.in_scene(&scene.scene_id))
}

/// Axial (sign-canonical) coordinates of one scene, for the projective
/// comparator.
pub fn scene_to_axes(scene: &LandmarkScene, spec: &FrameSpec) -> Result<Vec<Vec<f64>>, GeometryError> {
    let run = || {
        spec.check(scene.len(), scene.dim())?;
        let chart = oriented_frame_homography(&lifted(scene, spec.frame_labels())?)?;
        lifted(scene, spec.remaining_labels())?.iter().map(|p| chart.axial_coordinate(p)).collect::<Result<Vec<_>, _>>()
    };
    run().map_err(|e| e.in_scene(&scene.scene_id))
}

/// Oriented coordinates of a whole study, with per-scene flip flags.
#[derive(Debug, Clone)]
pub struct RegisteredSample {
    pub sample: DirectionSample,
    pub det_sign_flipped: Vec<bool>,
}

impl RegisteredSample {
    /// True when some but not all scenes needed the determinant flip.
    pub fn mixed_orientation(&self) -> bool {
        let flips = self.det_sign_flipped.iter().filter(|f| **f).count();
        flips > 0 && flips < self.det_sign_flipped.len()
    }
}

pub fn register_scenes(scenes: &[LandmarkScene], spec: &FrameSpec) -> Result<RegisteredSample, GeometryError> {
    let mut rows = Vec::with_capacity(scenes.len());
    let mut ids = Vec::with_capacity(scenes.len());
    let mut flips = Vec::with_capacity(scenes.len());
    for scene in scenes {
        let sd = scene_to_directions(scene, spec)?;
        rows.push(sd.directions);
        ids.push(scene.scene_id.clone());
        flips.push(sd.det_sign_flipped);
    }
    let sample =
        DirectionSample::new(rows, ids).map_err(|e| GeometryError::InvalidFrameSpec { reason: format!("{e}") })?;
    Ok(RegisteredSample { sample, det_sign_flipped: flips })
}
