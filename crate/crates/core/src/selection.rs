//! Adaptive choice of the number `k` of upper order statistics by the
//! Reiss–Thomas rule: the `k` minimizing the `i^θ`-weighted mean absolute
//! deviation of the estimate path from its running median.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::EstimatorId;
use crate::format::sig6;
use crate::sample::SortedCensoredSample;

pub const DEFAULT_THETA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub k_star: usize,
    pub theta: f64,
    pub estimator: EstimatorId,
    /// First threshold of the estimate path entering medians and sums.
    pub path_start: usize,
    /// `(k, criterion(k))` for every candidate where the path is defined.
    pub criterion_values: Vec<(usize, f64)>,
}

impl KSelection {
    pub fn criterion_csv(&self) -> String {
        let mut out = String::from("k,criterion\n");
        for (k, v) in &self.criterion_values {
            out.push_str(&format!("{k},{}\n", sig6(*v)));
        }
        out
    }
}

/// Default candidate floor `max(path_start + 1, ⌈√n⌉)`.
pub fn default_k_min(n: usize, estimator: EstimatorId) -> usize {
    let root = (n as f64).sqrt().ceil() as usize;
    root.max(estimator.min_k() + 1)
}

/// Scans `k ∈ [k_min, k_max]` and returns the minimizer of
/// `(1/k) Σ_{i=s}^{k} i^θ |γ̂(i) - med{γ̂(s), ..., γ̂(k)}|`, with `s` the
/// estimator's smallest admissible threshold. Ties go to the smaller `k`.
/// Thresholds where the estimator is undefined are left out of both the
/// median and the sum.
///
/// The path always starts at `s`, independent of `k_min`: at `k = s` the
/// criterion is identically zero, so letting the candidate range start
/// there selects `s` unconditionally.
pub fn reiss_thomas_k(
    s: &SortedCensoredSample,
    estimator: EstimatorId,
    theta: f64,
    k_min: usize,
    k_max: usize,
) -> Result<KSelection> {
    let n = s.len();
    if !(0.0..=0.5).contains(&theta) {
        return Err(Error::domain(format!(
            "theta must lie in [0, 0.5], got {theta}"
        )));
    }
    let start = estimator.min_k();
    if k_min < start || k_min >= k_max || k_max + 1 > n {
        return Err(Error::domain(format!(
            "need {start} <= k_min < k_max <= n-1 (n={n}), got k_min={k_min}, k_max={k_max}"
        )));
    }

    let path: Vec<Option<f64>> = (start..=k_max)
        .into_par_iter()
        .map(|i| estimator.evaluate(s, i).ok().filter(|v| v.is_finite()))
        .collect();

    let weights: Vec<f64> = (start..=k_max).map(|i| (i as f64).powf(theta)).collect();
    let mut sorted: Vec<f64> = Vec::with_capacity(path.len());
    let mut criterion_values = Vec::with_capacity(k_max - k_min + 1);
    let mut best: Option<(usize, f64)> = None;

    for k in start..=k_max {
        let idx = k - start;
        if let Some(v) = path[idx] {
            let pos = sorted.partition_point(|&x| x <= v);
            sorted.insert(pos, v);
        }
        if k < k_min || sorted.is_empty() {
            continue;
        }
        let median = sorted[(sorted.len() - 1) / 2];
        let sum: f64 = path[..=idx]
            .iter()
            .zip(&weights)
            .filter_map(|(g, w)| g.map(|g| w * (g - median).abs()))
            .sum();
        let value = sum / k as f64;
        criterion_values.push((k, value));
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((k, value));
        }
    }

    let (k_star, _) = best.ok_or_else(|| {
        Error::Undefined(format!(
            "{estimator} is undefined for every k in [{start}, {k_max}]"
        ))
    })?;
    Ok(KSelection {
        k_star,
        theta,
        estimator,
        path_start: start,
        criterion_values,
    })
}
