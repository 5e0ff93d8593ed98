//! Monte Carlo calibration of the delta-method interval.
//!
//! Replication `i` draws from `SplitMix64::stream(seed, i + 1)`, so results
//! do not depend on thread count or scheduling. Stream 0 feeds the large
//! reference sample.

use opshape_core::directional::{delta_se, total_variance};
use opshape_core::special::two_sided_critical;
use opshape_core::synth::tangent_gaussian_sample;
use opshape_core::{DirectionSample, SplitMix64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageParams {
    pub direction: Vec<f64>,
    pub sigma: f64,
    pub n: usize,
    pub replications: usize,
    /// Size of the sample whose total variance stands in for the population value.
    pub reference_draws: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for CoverageParams {
    fn default() -> Self {
        CoverageParams {
            direction: vec![0.0, 0.0, 1.0],
            sigma: 0.1,
            n: 200,
            replications: 1000,
            reference_draws: 1_000_000,
            alpha: 0.05,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub params: CoverageParams,
    pub reference_total_variance: f64,
    pub covered: usize,
    pub coverage: f64,
    /// Binomial standard error of `coverage` at the nominal level.
    pub nominal_se: f64,
    pub mean_total_variance: f64,
    pub mean_se: f64,
    pub sd_total_variance: f64,
}

pub fn reference_total_variance(params: &CoverageParams) -> Result<f64, CliError> {
    let seed = SplitMix64::stream(params.seed, 0).next_u64();
    let big = tangent_gaussian_sample(&params.direction, params.sigma, params.reference_draws, seed)?;
    Ok(total_variance(&big))
}

pub fn coverage(params: &CoverageParams) -> Result<CoverageReport, CliError> {
    if params.replications == 0 || params.n < 3 {
        return Err(CliError::Config("coverage needs at least one replication of n ≥ 3".into()));
    }
    let target = reference_total_variance(params)?;
    let z = two_sided_critical(params.alpha);
    let reps: Vec<(f64, f64)> = (0..params.replications)
        .into_par_iter()
        .map(|i| {
            let seed = SplitMix64::stream(params.seed, i as u64 + 1).next_u64();
            let s = tangent_gaussian_sample(&params.direction, params.sigma, params.n, seed)?;
            Ok((total_variance(&s), delta_se(&s)?))
        })
        .collect::<Result<_, CliError>>()?;
    let covered = reps.iter().filter(|(ts, se)| (ts - z * se..=ts + z * se).contains(&target)).count();
    let m = reps.len() as f64;
    let mean_ts = reps.iter().map(|r| r.0).sum::<f64>() / m;
    let var_ts = reps.iter().map(|r| (r.0 - mean_ts).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let level = 1.0 - params.alpha;
    Ok(CoverageReport {
        params: params.clone(),
        reference_total_variance: target,
        covered,
        coverage: covered as f64 / m,
        nominal_se: (level * (1.0 - level) / m).sqrt(),
        mean_total_variance: mean_ts,
        mean_se: reps.iter().map(|r| r.1).sum::<f64>() / m,
        sd_total_variance: var_ts.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapComparison {
    pub n: usize,
    pub resamples: usize,
    pub delta_se: f64,
    pub bootstrap_se: f64,
    /// `|bootstrap - delta| / bootstrap`.
    pub relative_difference: f64,
}

/// Nonparametric bootstrap standard deviation of the total variance.
pub fn bootstrap_se(sample: &DirectionSample, resamples: usize, seed: u64) -> f64 {
    let n = sample.n();
    let values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = SplitMix64::stream(seed, b as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.below(n)).collect();
            total_variance(&sample.select(&idx))
        })
        .collect();
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
}

pub fn compare_with_bootstrap(
    sample: &DirectionSample,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapComparison, CliError> {
    if resamples < 2 {
        return Err(CliError::Config("the bootstrap needs at least two resamples".into()));
    }
    let d = delta_se(sample)?;
    let b = bootstrap_se(sample, resamples, seed);
    Ok(BootstrapComparison {
        n: sample.n(),
        resamples,
        delta_se: d,
        bootstrap_se: b,
        relative_difference: (b - d).abs() / b,
    })
}
