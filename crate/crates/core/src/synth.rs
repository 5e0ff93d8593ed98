//! Synthetic landmark scenes imaged by pinhole cameras.
//!
//! Coplanar scenes give exactly constant oriented coordinates (up to
//! rounding) whatever the cameras, as long as every camera sees the same
//! side of the plane; moving landmarks off the plane breaks that. These
//! generators provide the ground truth for the coplanarity test and the
//! Monte Carlo calibration of its asymptotics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::directional::DirectionSample;
use crate::error::SynthError;
use crate::geometry::LandmarkScene;
use crate::linalg;
use crate::rng::SplitMix64;

pub type Vec3 = [f64; 3];

/// Rejection-sampling budget per generated object.
pub const MAX_ATTEMPTS: usize = 1000;
/// Projection refuses points closer than this to the image plane.
pub const MIN_DEPTH: f64 = 1e-6;
/// Generated cameras keep every point at least this deep.
const SAFE_DEPTH: f64 = 0.5;
/// Minimum `|cross|` of any landmark triple in plane coordinates.
const MIN_TRIPLE_AREA: f64 = 0.05;

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add_scaled(a: Vec3, s: f64, b: Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit3(a: Vec3) -> Vec3 {
    let n = libm::sqrt(dot3(a, a));
    [a[0] / n, a[1] / n, a[2] / n]
}

fn random_unit3(rng: &mut SplitMix64) -> Vec3 {
    let v = rng.unit_vector(3);
    [v[0], v[1], v[2]]
}

/// Landmarks in space together with the plane they were generated on.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scene3D {
    pub points: Vec<Vec3>,
    pub coplanar: bool,
    /// Unit normal of the generating plane `n · x = offset`.
    pub plane_normal: Vec3,
    pub plane_offset: f64,
    /// Signed distance of each point from the plane.
    pub out_of_plane_offsets: Vec<f64>,
}

impl Scene3D {
    pub fn centroid(&self) -> Vec3 {
        let k = self.points.len() as f64;
        let s = self.points.iter().fold([0.0; 3], |acc, p| add_scaled(acc, 1.0, *p));
        [s[0] / k, s[1] / k, s[2] / k]
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PinholeCamera {
    pub center: Vec3,
    /// World-to-camera rotation; its third row is the optical axis.
    pub rotation: [Vec3; 3],
    pub focal: f64,
}

impl PinholeCamera {
    /// Camera at the origin looking down `+z`.
    pub fn canonical(focal: f64) -> Self {
        PinholeCamera { center: [0.0; 3], rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], focal }
    }

    pub fn to_camera(&self, p: Vec3) -> Vec3 {
        let d = sub(p, self.center);
        [dot3(self.rotation[0], d), dot3(self.rotation[1], d), dot3(self.rotation[2], d)]
    }

    pub fn depth(&self, p: Vec3) -> f64 {
        dot3(self.rotation[2], sub(p, self.center))
    }
}

/// Central projection `f · (X/Z, Y/Z)` in camera coordinates.
pub fn project(camera: &PinholeCamera, scene: &Scene3D, scene_id: &str) -> Result<LandmarkScene, SynthError> {
    let mut pts = Vec::with_capacity(scene.points.len());
    for (i, p) in scene.points.iter().enumerate() {
        let c = camera.to_camera(*p);
        if !(c[2] >= MIN_DEPTH) {
            return Err(SynthError::BehindCamera { label: i + 1, depth: c[2] });
        }
        pts.push(vec![camera.focal * c[0] / c[2], camera.focal * c[1] / c[2]]);
    }
    LandmarkScene::new(scene_id, pts).map_err(|e| SynthError::InvalidParameter { reason: format!("{e}") })
}

fn triples_in_general_position(pts: &[[f64; 2]]) -> bool {
    let k = pts.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let u = [pts[b][0] - pts[a][0], pts[b][1] - pts[a][1]];
                let v = [pts[c][0] - pts[a][0], pts[c][1] - pts[a][1]];
                if libm::fabs(u[0] * v[1] - u[1] * v[0]) < MIN_TRIPLE_AREA {
                    return false;
                }
            }
        }
    }
    true
}

/// `k` landmarks on a random plane, no three of them nearly collinear, so
/// any choice of four labels is a projective frame.
pub fn random_coplanar_scene(k: usize, seed: u64) -> Result<Scene3D, SynthError> {
    if k < 5 {
        return Err(SynthError::InvalidParameter { reason: format!("need k ≥ 5 landmarks, got {k}") });
    }
    let mut rng = SplitMix64::new(seed);
    let mut plane = None;
    for _ in 0..MAX_ATTEMPTS {
        let pts: Vec<[f64; 2]> = (0..k).map(|_| [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)]).collect();
        if triples_in_general_position(&pts) {
            plane = Some(pts);
            break;
        }
    }
    let plane_pts = plane.ok_or(SynthError::GenerationFailed { what: "coplanar scene", attempts: MAX_ATTEMPTS })?;
    let normal = random_unit3(&mut rng);
    let origin = [rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)];
    let helper = if libm::fabs(normal[0]) < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit3(cross(normal, helper));
    let e2 = cross(normal, e1);
    let points = plane_pts.iter().map(|p| add_scaled(add_scaled(origin, p[0], e1), p[1], e2)).collect();
    Ok(Scene3D {
        points,
        coplanar: true,
        plane_normal: normal,
        plane_offset: dot3(normal, origin),
        out_of_plane_offsets: vec![0.0; k],
    })
}

/// `n` cameras on a shell of radius 4..8 around the scene centroid, all on
/// the positive side of the plane (within 60° of its normal) and looking
/// roughly at the centroid.
pub fn random_cameras(scene: &Scene3D, n: usize, seed: u64) -> Result<Vec<PinholeCamera>, SynthError> {
    if n == 0 {
        return Err(SynthError::InvalidParameter { reason: "need at least one camera".into() });
    }
    let mut rng = SplitMix64::new(seed);
    let centroid = scene.centroid();
    (0..n)
        .map(|_| {
            for _ in 0..MAX_ATTEMPTS {
                let dir = random_unit3(&mut rng);
                if dot3(dir, scene.plane_normal) < 0.5 {
                    continue;
                }
                let center = add_scaled(centroid, rng.uniform(4.0, 8.0), dir);
                let target =
                    add_scaled(centroid, 1.0, [rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)]);
                let z = unit3(sub(target, center));
                let up = random_unit3(&mut rng);
                let xr = cross(up, z);
                if dot3(xr, xr) < 1e-4 {
                    continue;
                }
                let x = unit3(xr);
                let y = cross(z, x);
                let cam = PinholeCamera { center, rotation: [x, y, z], focal: rng.uniform(0.8, 2.0) };
                if scene.points.iter().all(|p| cam.depth(*p) >= SAFE_DEPTH) {
                    return Ok(cam);
                }
            }
            Err(SynthError::GenerationFailed { what: "camera", attempts: MAX_ATTEMPTS })
        })
        .collect()
}

/// Moves every landmark not in `frame_labels` along the plane normal by
/// `±delta`, signs drawn from `seed`. The frame stays exactly planar.
pub fn perturb_out_of_plane(
    scene: &Scene3D,
    delta: f64,
    frame_labels: &[usize],
    seed: u64,
) -> Result<Scene3D, SynthError> {
    if !(delta >= 0.0) {
        return Err(SynthError::InvalidParameter { reason: format!("delta must be ≥ 0, got {delta}") });
    }
    let mut rng = SplitMix64::new(seed);
    let mut out = scene.clone();
    for (i, p) in out.points.iter_mut().enumerate() {
        if frame_labels.contains(&(i + 1)) {
            continue;
        }
        let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
        let shift = sign * delta;
        if shift != 0.0 {
            *p = add_scaled(*p, shift, scene.plane_normal);
            out.out_of_plane_offsets[i] += shift;
        }
    }
    out.coplanar = out.out_of_plane_offsets.iter().all(|o| *o == 0.0);
    Ok(out)
}

/// Adds isotropic Gaussian noise of scale `sigma` to every image coordinate.
pub fn add_image_noise(scene: &LandmarkScene, sigma: f64, seed: u64) -> LandmarkScene {
    if sigma == 0.0 {
        return scene.clone();
    }
    let mut rng = SplitMix64::new(seed);
    let pts = scene.points().iter().map(|p| p.iter().map(|x| x + sigma * rng.normal()).collect()).collect();
    LandmarkScene::new(scene.scene_id.clone(), pts).expect("finite noise keeps the scene valid")
}

/// Parameters of a synthetic multi-view study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyParams {
    pub landmarks: usize,
    pub cameras: usize,
    pub delta: f64,
    pub image_noise: f64,
    /// Labels kept exactly planar when `delta > 0`.
    pub frame_labels: Vec<usize>,
    pub seed: u64,
}

impl Default for StudyParams {
    fn default() -> Self {
        StudyParams { landmarks: 5, cameras: 41, delta: 0.0, image_noise: 0.0, frame_labels: vec![1, 2, 3, 4], seed: 7 }
    }
}

/// One 3D scene photographed by `cameras` cameras; scene ids are `"1"`,
/// `"2"`, ... Every random component draws from its own stream of `seed`.
pub fn synthetic_study(params: &StudyParams) -> Result<(Scene3D, Vec<LandmarkScene>), SynthError> {
    let seed = params.seed;
    let base = random_coplanar_scene(params.landmarks, SplitMix64::stream(seed, 0).next_u64())?;
    let scene =
        perturb_out_of_plane(&base, params.delta, &params.frame_labels, SplitMix64::stream(seed, 2).next_u64())?;
    let cams = random_cameras(&scene, params.cameras, SplitMix64::stream(seed, 1).next_u64())?;
    let mut noise = SplitMix64::stream(seed, 3);
    let images = cams
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let img = project(c, &scene, &format!("{}", i + 1))?;
            Ok(add_image_noise(&img, params.image_noise, noise.next_u64()))
        })
        .collect::<Result<Vec<_>, SynthError>>()?;
    Ok((scene, images))
}

/// Orthonormal basis of the tangent space at `direction` (Gram-Schmidt on
/// the standard basis).
pub fn tangent_basis(direction: &[f64]) -> Vec<Vec<f64>> {
    let d = direction.len();
    let mut basis: Vec<Vec<f64>> = vec![direction.to_vec()];
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in &basis {
            let c = linalg::dot(&v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let n = linalg::norm(&v);
        if n > 1e-6 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
    }
    basis.remove(0);
    basis
}

/// `n` draws of `normalize(direction + t)` with `t` isotropic Gaussian of
/// scale `sigma` in the tangent space at `direction`.
pub fn tangent_gaussian_sample(
    direction: &[f64],
    sigma: f64,
    n: usize,
    seed: u64,
) -> Result<DirectionSample, SynthError> {
    if !(sigma >= 0.0) || n == 0 {
        return Err(SynthError::InvalidParameter { reason: format!("sigma = {sigma}, n = {n}") });
    }
    let dir = linalg::normalized(direction);
    let basis = tangent_basis(&dir);
    let mut rng = SplitMix64::new(seed);
    let rows = (0..n)
        .map(|_| {
            let mut v = dir.clone();
            for b in &basis {
                let g = sigma * rng.normal();
                for (x, y) in v.iter_mut().zip(b) {
                    *x += g * y;
                }
            }
            linalg::normalized(&v)
        })
        .collect();
    DirectionSample::from_vectors(rows).map_err(|e| SynthError::InvalidParameter { reason: format!("{e}") })
}
