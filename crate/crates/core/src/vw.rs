//! Veronese-Whitney comparator for the (sign-blind) projective shape model.
//!
//! Axes are embedded as rank-one projectors `z zᵀ / ‖z‖²`; the sample mean
//! `J_n` of those projectors has trace one and its top eigenvalue `λ₁` gives
//! the PS total-variance index `2(1 - λ₁)`.

use alloc::vec::Vec;

use crate::error::{GeometryError, StatsError};
use crate::linalg::{self, symmetric_eigen, Matrix};

/// Eigengap below which the mean axis is considered ill-defined.
pub const EIGENGAP_TOLERANCE: f64 = 1e-10;

pub fn vw_embed(z: &[f64]) -> Result<Matrix, GeometryError> {
    let n2 = linalg::dot(z, z);
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(GeometryError::DegeneratePoint);
    }
    let d = z.len();
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = z[i] * z[j] / n2;
        }
    }
    Ok(m)
}

/// `J_n = (1/n) Σ z_i z_iᵀ / ‖z_i‖²`.
pub fn vw_mean(axes: &[Vec<f64>]) -> Result<Matrix, StatsError> {
    let first = axes.first().ok_or(StatsError::EmptySample)?;
    let d = first.len();
    let mut acc = Matrix::zeros(d, d);
    for z in axes {
        if z.len() != d {
            return Err(StatsError::DimensionMismatch { expected: d, found: z.len() });
        }
        let e = vw_embed(z).map_err(|_| StatsError::InvalidSample { reason: "zero axis".into() })?;
        for i in 0..d {
            for j in 0..d {
                acc[(i, j)] += e[(i, j)];
            }
        }
    }
    Ok(acc.scaled(1.0 / axes.len() as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopEigenpair {
    pub lambda1: f64,
    /// Unit eigenvector with its first nonzero component positive.
    pub v1: Vec<f64>,
    pub eigengap: f64,
    /// `λ₁` is (numerically) repeated, so `v1` is arbitrary within the
    /// top eigenspace.
    pub focal_warning: bool,
}

pub fn top_eigenpair(j: &Matrix) -> TopEigenpair {
    let eig = symmetric_eigen(j);
    let lambda1 = eig.values[0];
    let eigengap = if eig.values.len() > 1 { lambda1 - eig.values[1] } else { f64::INFINITY };
    let mut v1 = eig.vectors.column(0);
    linalg::canonical_sign(&mut v1);
    TopEigenpair { lambda1, v1, eigengap, focal_warning: eigengap < EIGENGAP_TOLERANCE }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VwSummary {
    pub n: usize,
    pub mean_matrix: Matrix,
    pub lambda1: f64,
    pub v1: Vec<f64>,
    pub eigengap: f64,
    pub total_variance_ps: f64,
    pub focal_warning: bool,
}

/// `tS_PS = 2(1 - λ₁)` along with the rest of the VW summary.
pub fn total_variance_ps(axes: &[Vec<f64>]) -> Result<VwSummary, StatsError> {
    let j = vw_mean(axes)?;
    let top = top_eigenpair(&j);
    Ok(VwSummary {
        n: axes.len(),
        total_variance_ps: (2.0 * (1.0 - top.lambda1)).max(0.0),
        mean_matrix: j,
        lambda1: top.lambda1,
        v1: top.v1,
        eigengap: if top.eigengap.is_finite() { top.eigengap } else { 0.0 },
        focal_warning: top.focal_warning,
    })
}
