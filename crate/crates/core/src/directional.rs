//! Extrinsic statistics of samples on `(S^m)^q`.
//!
//! Each row of a [`DirectionSample`] is one scene: `q` unit vectors in
//! `R^{m+1}` (one block per remaining landmark). Everything here works in
//! the ambient space `R^{(m+1)q}` through the inclusion map.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::StatsError;
use crate::linalg::{self, Matrix};
use crate::special;

/// `‖ū‖` below this makes the extrinsic mean undefined.
pub const FOCAL_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of a row from unit norm.
pub const UNIT_TOLERANCE: f64 = 1e-12;
/// Rows all within this distance of the mean are treated as identical.
pub const CONSTANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectionSample {
    dim: usize,
    q: usize,
    /// Row-major: scene `i`, block `f`, component `c` at `(i*q + f)*dim + c`.
    units: Vec<f64>,
    scene_ids: Vec<String>,
}

impl DirectionSample {
    /// `rows[i][f]` is the unit vector of block `f` in scene `i`.
    pub fn new(rows: Vec<Vec<Vec<f64>>>, scene_ids: Vec<String>) -> Result<Self, StatsError> {
        let n = rows.len();
        if n == 0 {
            return Err(StatsError::EmptySample);
        }
        if scene_ids.len() != n {
            return Err(StatsError::DimensionMismatch { expected: n, found: scene_ids.len() });
        }
        let q = rows[0].len();
        let dim = rows[0].first().map_or(0, Vec::len);
        if q == 0 || dim < 2 {
            return Err(StatsError::InvalidSample { reason: "rows need q ≥ 1 blocks of dimension ≥ 2".into() });
        }
        let mut units = Vec::with_capacity(n * q * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(StatsError::DimensionMismatch { expected: q, found: row.len() });
            }
            for v in row {
                if v.len() != dim {
                    return Err(StatsError::DimensionMismatch { expected: dim, found: v.len() });
                }
                let nv = linalg::norm(v);
                if !(libm::fabs(nv - 1.0) <= UNIT_TOLERANCE) {
                    return Err(StatsError::InvalidSample {
                        reason: format!("row {i} ({}) has norm {nv}", scene_ids[i]),
                    });
                }
                units.extend_from_slice(v);
            }
        }
        Ok(DirectionSample { dim, q, units, scene_ids })
    }

    /// Single-block sample with generated ids `"1"`, `"2"`, ...
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        let ids = (1..=vectors.len()).map(|i| format!("{i}")).collect();
        DirectionSample::new(vectors.into_iter().map(|v| vec![v]).collect(), ids)
    }

    pub fn n(&self) -> usize {
        self.scene_ids.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Ambient dimension `m + 1` of one block.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scene_ids(&self) -> &[String] {
        &self.scene_ids
    }

    pub fn unit(&self, i: usize, block: usize) -> &[f64] {
        let start = (i * self.q + block) * self.dim;
        &self.units[start..start + self.dim]
    }

    /// All blocks of scene `i`, stacked.
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.q * self.dim;
        &self.units[i * w..(i + 1) * w]
    }

    /// Rows at the given positions, in that order.
    pub fn select(&self, indices: &[usize]) -> DirectionSample {
        let mut units = Vec::with_capacity(indices.len() * self.q * self.dim);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            units.extend_from_slice(self.row(i));
            ids.push(self.scene_ids[i].clone());
        }
        DirectionSample { dim: self.dim, q: self.q, units, scene_ids: ids }
    }

    /// The sample with row `i` removed.
    pub fn without(&self, i: usize) -> DirectionSample {
        let keep: Vec<usize> = (0..self.n()).filter(|&j| j != i).collect();
        self.select(&keep)
    }

    /// Applies a linear map to every block vector. The caller guarantees
    /// the map is orthogonal so rows stay on the sphere.
    pub fn transformed(&self, map: &Matrix) -> DirectionSample {
        let mut units = Vec::with_capacity(self.units.len());
        for chunk in self.units.chunks(self.dim) {
            units.extend(map.mul_vec(chunk));
        }
        DirectionSample { dim: self.dim, q: self.q, units, scene_ids: self.scene_ids.clone() }
    }
}

/// Per-block arithmetic mean `ū`.
pub fn mean_vector(sample: &DirectionSample) -> Vec<Vec<f64>> {
    let n = sample.n() as f64;
    (0..sample.q)
        .map(|f| {
            let mut acc = vec![0.0; sample.dim];
            for i in 0..sample.n() {
                for (a, u) in acc.iter_mut().zip(sample.unit(i, f)) {
                    *a += u;
                }
            }
            acc.iter().map(|a| a / n).collect()
        })
        .collect()
}

/// Per-block mean resultant length `R_n = ‖ū‖`.
pub fn resultant_length(means: &[Vec<f64>]) -> Vec<f64> {
    means.iter().map(|m| linalg::norm(m)).collect()
}

/// Per-block extrinsic mean `ū / ‖ū‖`.
pub fn extrinsic_mean(means: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, StatsError> {
    means
        .iter()
        .enumerate()
        .map(|(f, m)| {
            let r = linalg::norm(m);
            if !(r >= FOCAL_TOLERANCE) {
                return Err(StatsError::FocalMean { block: f });
            }
            Ok(m.iter().map(|v| v / r).collect())
        })
        .collect()
}

/// Sum of squared distances to the block mean, divided by `n`, per block:
/// the block traces of `S_n`.
fn block_dispersions(sample: &DirectionSample, means: &[Vec<f64>]) -> Vec<f64> {
    let n = sample.n() as f64;
    (0..sample.q)
        .map(|f| {
            let mut s = 0.0;
            for i in 0..sample.n() {
                for (u, m) in sample.unit(i, f).iter().zip(&means[f]) {
                    s += (u - m) * (u - m);
                }
            }
            s / n
        })
        .collect()
}

fn is_numerically_constant(sample: &DirectionSample, means: &[Vec<f64>]) -> bool {
    (0..sample.n()).all(|i| {
        (0..sample.q).all(|f| {
            let d: f64 = sample.unit(i, f).iter().zip(&means[f]).map(|(u, m)| (u - m) * (u - m)).sum();
            libm::sqrt(d) <= CONSTANT_TOLERANCE
        })
    })
}

/// `tS = 2 Σ_f (1 - R_f)`.
///
/// Evaluated as `2 Σ_f tr(S_f) / (1 + R_f)`, which equals the above for unit
/// rows (`1 - R² = tr S`) without the cancellation of `1 - R` near 1.
pub fn total_variance(sample: &DirectionSample) -> f64 {
    let means = mean_vector(sample);
    total_variance_from(sample, &means)
}

fn total_variance_from(sample: &DirectionSample, means: &[Vec<f64>]) -> f64 {
    if is_numerically_constant(sample, means) {
        return 0.0;
    }
    let r = resultant_length(means);
    let disp = block_dispersions(sample, means);
    disp.iter().zip(&r).map(|(d, r)| 2.0 * (d / (1.0 + r.min(1.0))).min(1.0)).sum()
}

/// `S_n = (1/n) Σ (r_i - r̄)(r_i - r̄)ᵀ` over stacked rows.
pub fn sample_covariance(sample: &DirectionSample) -> Matrix {
    let means = mean_vector(sample);
    covariance_from(sample, &means)
}

fn covariance_from(sample: &DirectionSample, means: &[Vec<f64>]) -> Matrix {
    let w = sample.q * sample.dim;
    let center: Vec<f64> = means.iter().flatten().copied().collect();
    let mut s = Matrix::zeros(w, w);
    let mut dev = vec![0.0; w];
    for i in 0..sample.n() {
        for (d, (r, c)) in dev.iter_mut().zip(sample.row(i).iter().zip(&center)) {
            *d = r - c;
        }
        for a in 0..w {
            for b in 0..=a {
                s[(a, b)] += dev[a] * dev[b];
            }
        }
    }
    let n = sample.n() as f64;
    for a in 0..w {
        for b in 0..=a {
            let v = s[(a, b)] / n;
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
    }
    s
}

/// Delta-method standard error `(2/√n) √(ūᵀ S_n ū) / ‖ū‖`, with the
/// gradient stacked blockwise when `q > 1`.
///
/// For `n = 2` the result is exactly zero: two unit vectors satisfy
/// `ū · (u₁ - u₂) = 0`.
pub fn delta_se(sample: &DirectionSample) -> Result<f64, StatsError> {
    let means = mean_vector(sample);
    let directions = extrinsic_mean(&means)?;
    Ok(delta_se_from(sample, &means, &directions))
}

fn delta_se_from(sample: &DirectionSample, means: &[Vec<f64>], directions: &[Vec<f64>]) -> f64 {
    let n = sample.n();
    if n <= 2 || is_numerically_constant(sample, means) {
        return 0.0;
    }
    // gᵀ S g / n with g = -2 ĝ, written as a mean of squared projections
    let mut acc = 0.0;
    for i in 0..n {
        let mut p = 0.0;
        for f in 0..sample.q {
            for ((u, m), g) in sample.unit(i, f).iter().zip(&means[f]).zip(&directions[f]) {
                p += (u - m) * g;
            }
        }
        acc += p * p;
    }
    let nf = n as f64;
    2.0 * libm::sqrt(acc / nf) / libm::sqrt(nf)
}

/// `tS ± z_{1-α/2} SE`. The lower end is not clamped at zero.
pub fn confidence_interval(ts: f64, se: f64, alpha: f64) -> Result<(f64, f64), StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidLevel { alpha });
    }
    let z = special::two_sided_critical(alpha);
    Ok((ts - z * se, ts + z * se))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalTest {
    pub z: f64,
    /// One-sided `1 - Φ(z)`.
    pub p_value: f64,
}

/// `Z = tS / SE`. A zero SE yields [`StatsError::DegenerateTest`] carrying
/// the conventional p-value.
pub fn z_statistic(ts: f64, se: f64) -> Result<NormalTest, StatsError> {
    if se > 0.0 {
        let z = ts / se;
        Ok(NormalTest { z, p_value: special::normal_sf(z) })
    } else {
        Err(StatsError::DegenerateTest { p_value: if ts > 0.0 { 0.0 } else { 1.0 } })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
}

/// `T = n tS` against the upper tail of `χ²_df`.
pub fn chisq_statistic(ts: f64, n: usize, df: usize) -> ChiSquareTest {
    let t = n as f64 * ts;
    ChiSquareTest { t, df, p_value: special::chi_square_sf(t, df as f64) }
}

/// Default degrees of freedom `m · q`.
pub fn default_df(sample: &DirectionSample) -> usize {
    (sample.dim - 1) * sample.q
}

/// Everything the coplanarity analysis reports about one sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpsSummary {
    pub n: usize,
    pub q: usize,
    pub dim: usize,
    pub mean_vectors: Vec<Vec<f64>>,
    pub resultant_lengths: Vec<f64>,
    pub extrinsic_means: Vec<Vec<f64>>,
    pub total_variance: f64,
    pub covariance: Matrix,
    pub se: f64,
    /// `None` when the standard error is zero.
    pub z: Option<f64>,
    pub p_normal: f64,
    pub t_statistic: f64,
    pub df: usize,
    pub p_chisq: f64,
    pub alpha: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    /// Set when `se = 0`; `p_normal` then holds the conventional value.
    pub degenerate_test: bool,
}

/// Builds the full summary. `df = None` uses `m · q`.
pub fn summarize(sample: &DirectionSample, alpha: f64, df: Option<usize>) -> Result<OpsSummary, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidLevel { alpha });
    }
    let means = mean_vector(sample);
    let resultants = resultant_length(&means);
    let directions = extrinsic_mean(&means)?;
    let ts = total_variance_from(sample, &means);
    let covariance = covariance_from(sample, &means);
    let se = delta_se_from(sample, &means, &directions);
    let (ci_lower, ci_upper) = confidence_interval(ts, se, alpha)?;
    let (z, p_normal, degenerate_test) = match z_statistic(ts, se) {
        Ok(t) => (Some(t.z), t.p_value, false),
        Err(StatsError::DegenerateTest { p_value }) => (None, p_value, true),
        Err(e) => return Err(e),
    };
    let chi = chisq_statistic(ts, sample.n(), df.unwrap_or_else(|| default_df(sample)));
    Ok(OpsSummary {
        n: sample.n(),
        q: sample.q,
        dim: sample.dim,
        mean_vectors: means,
        resultant_lengths: resultants,
        extrinsic_means: directions,
        total_variance: ts,
        covariance,
        se,
        z,
        p_normal,
        t_statistic: chi.t,
        df: chi.df,
        p_chisq: chi.p_value,
        alpha,
        ci_lower,
        ci_upper,
        degenerate_test,
    })
}

/// One-sided test of `tΣ = 0` against `tΣ > 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoplanarityTest {
    pub summary: OpsSummary,
    /// Primary rule: the lower confidence limit is strictly positive.
    pub reject_ci: bool,
    /// Chi-square calibration: `p_chisq < α`.
    pub reject_chisq: bool,
}

pub fn coplanarity_test(
    sample: &DirectionSample,
    alpha: f64,
    df: Option<usize>,
) -> Result<CoplanarityTest, StatsError> {
    if sample.n() < 2 {
        return Err(StatsError::InsufficientSample { needed: 2, found: sample.n() });
    }
    let summary = summarize(sample, alpha, df)?;
    let reject_ci = summary.ci_lower > 0.0;
    let reject_chisq = summary.p_chisq < alpha;
    Ok(CoplanarityTest { summary, reject_ci, reject_chisq })
}

/// Angles `arccos(u_i · μ̂_E)` per block; `result[f][i]`.
pub fn angular_distances(sample: &DirectionSample) -> Result<Vec<Vec<f64>>, StatsError> {
    let directions = extrinsic_mean(&mean_vector(sample))?;
    Ok((0..sample.q)
        .map(|f| {
            (0..sample.n())
                .map(|i| libm::acos(linalg::dot(sample.unit(i, f), &directions[f]).clamp(-1.0, 1.0)))
                .collect()
        })
        .collect())
}
