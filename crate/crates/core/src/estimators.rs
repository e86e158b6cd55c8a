//! Point estimators of the tail index `γ₁` of the lifetime distribution and of
//! the proportion `p` of uncensored extremes.
//!
//! All estimators read only ratios of order statistics above `Z_{n-k:n}` and
//! are therefore invariant under rescaling of the data.

use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma;

use crate::error::{check_k, Error, Result};
use crate::quad;
use crate::sample::SortedCensoredSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorId {
    Hill,
    Efg,
    Ww1,
    Ww2,
    New,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 5] = [Self::Hill, Self::Efg, Self::Ww1, Self::Ww2, Self::New];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hill => "hill",
            Self::Efg => "efg",
            Self::Ww1 => "ww1",
            Self::Ww2 => "ww2",
            Self::New => "new",
        }
    }

    /// Smallest admissible `k`.
    pub fn min_k(self) -> usize {
        match self {
            Self::New => 2,
            _ => 1,
        }
    }

    pub fn evaluate(self, s: &SortedCensoredSample, k: usize) -> Result<f64> {
        match self {
            Self::Hill => hill(s, k),
            Self::Efg => efg(s, k),
            Self::Ww1 => ww1(s, k),
            Self::Ww2 => ww2(s, k),
            Self::New => new_weighted(s, k),
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorId::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown estimator `{s}` (expected hill|efg|ww1|ww2|new)"
                ))
            })
    }
}

/// Hill estimator of the index `γ` of `Z`.
pub fn hill(s: &SortedCensoredSample, k: usize) -> Result<f64> {
    let n = s.len();
    check_k(k, n, 1, n.saturating_sub(1))?;
    let threshold = s.upper(k);
    let sum: f64 = (0..k).map(|i| (s.upper(i) / threshold).ln()).sum();
    Ok(sum / k as f64)
}

/// Fraction of uncensored observations among the top `k`.
pub fn p_hat(s: &SortedCensoredSample, k: usize) -> Result<f64> {
    let n = s.len();
    check_k(k, n, 1, n)?;
    Ok(s.top_uncensored(k) as f64 / k as f64)
}

/// Hill estimator adapted to censoring: `hill / p_hat`.
pub fn efg(s: &SortedCensoredSample, k: usize) -> Result<f64> {
    let h = hill(s, k)?;
    let p = p_hat(s, k)?;
    if p == 0.0 {
        return Err(Error::Undefined(format!(
            "no uncensored observation among the top {k}"
        )));
    }
    Ok(h / p)
}

/// Product-limit estimate of the lifetime cdf at each order statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct KaplanMeierCurve {
    pub support: Vec<f64>,
    pub values: Vec<f64>,
}

impl KaplanMeierCurve {
    /// Right-continuous evaluation `F_n(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.support.partition_point(|&z| z <= x);
        if idx == 0 {
            0.0
        } else {
            self.values[idx - 1]
        }
    }
}

/// `1 - F_n(Z_{i:n})` for every `i`, with tied order statistics sharing the
/// value of the right-continuous curve at their common point.
pub(crate) fn km_survivor_values(s: &SortedCensoredSample) -> Vec<f64> {
    let z = s.z_sorted();
    let delta = s.delta_concomitant();
    let n = z.len();
    let mut surv = Vec::with_capacity(n);
    let mut acc = 1.0_f64;
    for (j, &d) in delta.iter().enumerate() {
        if d {
            acc *= 1.0 - 1.0 / (n - j) as f64;
        }
        surv.push(acc);
    }
    // back-fill ties with the value after the last tied member
    for j in (0..n.saturating_sub(1)).rev() {
        if z[j] == z[j + 1] {
            surv[j] = surv[j + 1];
        }
    }
    surv
}

pub fn kaplan_meier(s: &SortedCensoredSample) -> KaplanMeierCurve {
    KaplanMeierCurve {
        support: s.z_sorted().to_vec(),
        values: s.km_survivor().iter().map(|v| 1.0 - v).collect(),
    }
}

fn km_threshold(s: &SortedCensoredSample, k: usize) -> Result<(&[f64], f64)> {
    let n = s.len();
    check_k(k, n, 1, n.saturating_sub(1))?;
    let surv = s.km_survivor();
    let t = surv[n - 1 - k];
    if t <= 0.0 {
        return Err(Error::Undefined(format!(
            "Kaplan-Meier survivor mass is zero at the threshold for k={k}"
        )));
    }
    Ok((surv, t))
}

/// Kaplan–Meier integration form of the Hill estimator.
pub fn ww1(s: &SortedCensoredSample, k: usize) -> Result<f64> {
    let (surv, t) = km_threshold(s, k)?;
    let n = s.len();
    let sum: f64 = (1..=k)
        .map(|i| surv[n - i] / t * (s.upper(i - 1) / s.upper(i)).ln())
        .sum();
    Ok(sum)
}

/// Synthetic-data form of the Hill estimator.
pub fn ww2(s: &SortedCensoredSample, k: usize) -> Result<f64> {
    let (surv, t) = km_threshold(s, k)?;
    let n = s.len();
    let threshold = s.upper(k);
    let sum: f64 = (1..=k)
        .filter(|&i| s.upper_delta(i - 1))
        .map(|i| surv[n - i] / t / i as f64 * (s.upper(i - 1) / threshold).ln())
        .sum();
    Ok(sum)
}

/// The weighted estimator
/// `(1/k) Σ_{i=1}^{k-1} i log(Z_{n-i:n}/Z_{n-k:n}) / (S_i + i/k)`.
///
/// The `i/k` term keeps every denominator positive, so the estimate is
/// finite even when the largest observations are all censored.
pub fn new_weighted(s: &SortedCensoredSample, k: usize) -> Result<f64> {
    let n = s.len();
    check_k(k, n, 2, n.saturating_sub(1))?;
    let kf = k as f64;
    let threshold = s.upper(k);
    let sum: f64 = (1..k)
        .map(|i| {
            let fi = i as f64;
            fi * (s.upper(i) / threshold).ln() / (s.top_uncensored(i) as f64 + fi / kf)
        })
        .sum();
    Ok(sum / kf)
}

/// Weight function `g` on (0, 1) for [`weighted_functional`].
#[derive(Clone, Copy)]
pub enum Weight<'a> {
    Constant(f64),
    Func(&'a dyn Fn(f64) -> f64),
}

impl Weight<'_> {
    fn at(&self, x: f64) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::Func(g) => g(x),
        }
    }

    /// `∫_0^1 g(x) (-log x)^α dx`.
    fn normalizer(&self, alpha: f64) -> Result<f64> {
        match self {
            Weight::Constant(c) => Ok(c * gamma_plus_one(alpha)),
            Weight::Func(g) => {
                // x = e^{-t}
                quad::integrate_to_infinity(
                    |t| g((-t).exp()) * t.powf(alpha) * (-t).exp(),
                    0.0,
                    1e-10,
                )
            }
        }
    }
}

fn gamma_plus_one(alpha: f64) -> f64 {
    if alpha.fract() == 0.0 && alpha <= 20.0 {
        (1..=alpha as u64).map(|v| v as f64).product()
    } else {
        gamma(alpha + 1.0)
    }
}

/// Generalized weighted functional with weights
/// `a_i = (i/k) g(i/(k+1)) / (S_i + i/k)`, normalized by
/// `∫_0^1 g(x)(-log x)^α dx`. With `g ≡ 1`, `α = 1` it is [`new_weighted`].
pub fn weighted_functional(
    s: &SortedCensoredSample,
    k: usize,
    g: Weight<'_>,
    alpha: f64,
) -> Result<f64> {
    let n = s.len();
    check_k(k, n, 2, n.saturating_sub(1))?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let norm = g.normalizer(alpha)?;
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::domain(format!(
            "weight normalizer must be finite and positive, got {norm}"
        )));
    }
    let kf = k as f64;
    let threshold = s.upper(k);
    let mut sum = 0.0;
    for i in 1..k {
        let fi = i as f64;
        let gi = g.at(fi / (kf + 1.0));
        if !(gi.is_finite() && gi >= 0.0) {
            return Err(Error::domain(format!(
                "weight g({}) = {gi} is not a nonnegative number",
                fi / (kf + 1.0)
            )));
        }
        let l = (s.upper(i) / threshold).ln();
        sum += fi * gi * l.powf(alpha) / (s.top_uncensored(i) as f64 + fi / kf);
    }
    Ok(sum / kf / norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub std_err: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Standard normal quantile.
pub fn normal_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(q)
}

/// Normal interval for the weighted estimator with asymptotic variance
/// `(9 - 8p) γ₁² / p`, ignoring the asymptotic bias. The lower end is
/// truncated at zero.
pub fn asymptotic_ci(
    gamma1_hat: f64,
    p_hat: f64,
    k: usize,
    level: f64,
) -> Result<ConfidenceInterval> {
    if !(p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::domain(format!(
            "p_hat must lie in (0, 1], got {p_hat}"
        )));
    }
    if !(gamma1_hat.is_finite() && gamma1_hat > 0.0) {
        return Err(Error::domain(format!(
            "gamma1_hat must be positive, got {gamma1_hat}"
        )));
    }
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    let std_err = gamma1_hat * ((9.0 - 8.0 * p_hat) / p_hat).sqrt() / (k as f64).sqrt();
    let half = normal_quantile(0.5 * (1.0 + level)) * std_err;
    Ok(ConfidenceInterval {
        std_err,
        lower: (gamma1_hat - half).max(0.0),
        upper: gamma1_hat + half,
        level,
    })
}

/// Asymptotic standard error where a closed form is available: Hill
/// (`γ/√k`), EFG (`γ₁/√(p k)`) and the weighted estimator.
pub fn std_error(id: EstimatorId, value: f64, p_hat: f64, k: usize) -> Option<f64> {
    let kf = k as f64;
    match id {
        EstimatorId::Hill => Some(value / kf.sqrt()),
        EstimatorId::Efg if p_hat > 0.0 => Some(value / (p_hat * kf).sqrt()),
        EstimatorId::New if p_hat > 0.0 => {
            Some(value * ((9.0 - 8.0 * p_hat) / p_hat).sqrt() / kf.sqrt())
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub estimator: EstimatorId,
    pub k: usize,
    pub value: f64,
    pub p_hat: f64,
    pub std_err: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub ci_level: Option<f64>,
}

/// Evaluates `id` at `k` and attaches `p_hat`, the standard error and, when
/// `ci_level` is given, a normal interval around the estimate.
pub fn estimate_report(
    s: &SortedCensoredSample,
    id: EstimatorId,
    k: usize,
    ci_level: Option<f64>,
) -> Result<EstimateReport> {
    let value = id.evaluate(s, k)?;
    let p = p_hat(s, k)?;
    let std_err = std_error(id, value, p, k).filter(|v| v.is_finite());
    let ci = match (ci_level, std_err) {
        (Some(level), Some(se)) => {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::domain(format!(
                    "level must lie in (0, 1), got {level}"
                )));
            }
            let half = normal_quantile(0.5 * (1.0 + level)) * se;
            Some(((value - half).max(0.0), value + half))
        }
        _ => None,
    };
    Ok(EstimateReport {
        estimator: id,
        k,
        value,
        p_hat: p,
        std_err,
        ci,
        ci_level: ci.and(ci_level),
    })
}
