//! Chain diagnostics: error metrics, effective sample size, acceptance
//! statistics, and mode extraction by dimension-wise majority vote.

use serde::Serialize;

use crate::chain::StepRecord;
use crate::error::{Error, Result};
use crate::exact::target_distribution_capped;
use crate::model::EnergyModel;

/// Root-mean-square error between an estimate and a reference vector.
pub fn rmse(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            got: estimate.len(),
        });
    }
    let n = estimate.len() as f64;
    Ok((estimate
        .iter()
        .zip(reference)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
        .sqrt())
}

/// Effective sample size of a scalar series by the initial-positive-sequence
/// rule: autocovariances are paired `Γ_m = γ_{2m} + γ_{2m+1}`, summation stops
/// at the first nonpositive pair, and `ESS = N / τ` with
/// `τ = 2·ΣΓ_m/γ₀ - 1`, clamped to `(0, N]`.
///
/// A constant series has no autocorrelation information and returns `N` by
/// convention. Series shorter than 10 are rejected.
pub fn effective_sample_size(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 10 {
        return Err(Error::OutOfRange(format!(
            "series of length {n} is too short for an ESS estimate"
        )));
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let autocov = |lag: usize| -> f64 {
        (0..n - lag)
            .map(|t| (series[t] - mean) * (series[t + lag] - mean))
            .sum::<f64>()
            / nf
    };
    let gamma0 = autocov(0);
    if gamma0 <= 0.0 {
        return Ok(nf);
    }
    let mut sum_pairs = 0.0;
    let mut m = 0usize;
    loop {
        let lag = 2 * m;
        if lag + 1 >= n {
            break;
        }
        let pair = autocov(lag) + autocov(lag + 1);
        if pair <= 0.0 {
            break;
        }
        sum_pairs += pair;
        m += 1;
    }
    let tau = (2.0 * sum_pairs / gamma0 - 1.0).max(1e-12);
    Ok((nf / tau).clamp(f64::MIN_POSITIVE, nf))
}

/// Summary acceptance statistics of a trace.
#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceStats {
    /// Fraction of accepted steps.
    pub rate: f64,
    /// Mean coordinates changed per proposed step.
    pub mean_changed_proposed: f64,
    /// Mean coordinates changed per accepted step (0 when nothing was
    /// accepted).
    pub mean_changed_accepted: f64,
    /// Mean MH acceptance probability.
    pub mean_acceptance_probability: f64,
}

pub fn acceptance_stats(records: &[StepRecord]) -> AcceptanceStats {
    let n = records.len().max(1) as f64;
    let accepted: Vec<&StepRecord> = records.iter().filter(|r| r.accepted).collect();
    let mean_changed_accepted = if accepted.is_empty() {
        0.0
    } else {
        accepted
            .iter()
            .map(|r| r.changed_coordinates as f64)
            .sum::<f64>()
            / accepted.len() as f64
    };
    AcceptanceStats {
        rate: accepted.len() as f64 / n,
        mean_changed_proposed: records
            .iter()
            .map(|r| r.changed_coordinates as f64)
            .sum::<f64>()
            / n,
        mean_changed_accepted,
        mean_acceptance_probability: records
            .iter()
            .map(|r| r.acceptance_probability)
            .sum::<f64>()
            / n,
    }
}

/// Dimension-wise majority vote over binary samples given as per-coordinate
/// means: picks the `count` coordinates with the largest means (ties broken
/// toward the lower index) and returns the indicator state.
pub fn dimension_wise_majority_vote(means: &[f64], count: usize) -> Result<Vec<u8>> {
    if count > means.len() {
        return Err(Error::OutOfRange(format!(
            "cannot select {count} coordinates out of {}",
            means.len()
        )));
    }
    let mut order: Vec<usize> = (0..means.len()).collect();
    // Stable sort keeps lower indices first among ties.
    order.sort_by(|&a, &b| means[b].partial_cmp(&means[a]).unwrap());
    let mut out = vec![0u8; means.len()];
    for &i in order.iter().take(count) {
        out[i] = 1;
    }
    Ok(out)
}

/// Where a reference mean came from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Computed by exact enumeration.
    Exact,
    /// A long-run estimate with its standard error.
    Reference { stderr: f64 },
}

/// A per-coordinate reference mean for error metrics.
#[derive(Debug, Clone, Serialize)]
pub struct GroundTruth {
    pub mean: Vec<f64>,
    pub provenance: Provenance,
}

/// Exact per-coordinate mean levels of `π` by enumeration.
pub fn exact_mean<M: EnergyModel + ?Sized>(model: &M, cap: usize) -> Result<GroundTruth> {
    let pi = target_distribution_capped(model, cap)?;
    let states = crate::domain::enumerate_states_capped(model.domain(), cap)?;
    let d = model.domain().dim();
    let mut mean = vec![0.0; d];
    for (s, &p) in states.iter().zip(&pi) {
        for i in 0..d {
            mean[i] += s.level(i) as f64 * p;
        }
    }
    Ok(GroundTruth {
        mean,
        provenance: Provenance::Exact,
    })
}
