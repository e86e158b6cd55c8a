//! The censored tail empirical process `Δ_n(x)`, `x >= 1`, as an exact step
//! function, plus the goodness-of-fit statistics built on it.
//!
//! `Δ_n` places mass `(1/k) · i / (S_i + i/k)` at each normalized order
//! statistic `Z_{n-i:n} / Z_{n-k:n}`, `i = 1..k-1`, and is evaluated as the
//! mass strictly above `x`. Its integral against `dx/x` over `[1, ∞)` is the
//! weighted estimator.

use rayon::prelude::*;

use crate::distributions::{censoring_index_for, HeavyTailModel};
use crate::error::{check_k, Error, Result};
use crate::estimators::{hill, p_hat};
use crate::format::{sig6, sig6_opt};
use crate::rng::replicate_streams;
use crate::sample::{generate_censored, SortedCensoredSample};

/// Right-continuous step function: `levels[0]` on `[1, x_1)`, `levels[j]` on
/// `[x_j, x_{j+1})`, and `levels[m] = 0` on `[x_m, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProcessCurve {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    pub k: usize,
    pub n: usize,
}

impl TailProcessCurve {
    /// `Δ_n(x)` for `x >= 1`.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        self.levels[idx]
    }

    /// `∫_1^∞ x^{-1} Δ_n(x) dx`, exact for the step function.
    pub fn integrate(&self) -> f64 {
        let mut prev = 0.0_f64;
        let mut total = 0.0;
        for (level, &b) in self.levels.iter().zip(&self.breakpoints) {
            let lb = b.ln();
            total += level * (lb - prev);
            prev = lb;
        }
        total
    }

    /// Endpoints `[a, b)` of each constant piece, `b = ∞` for the last.
    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let m = self.breakpoints.len();
        (0..=m).map(move |j| {
            let a = if j == 0 { 1.0 } else { self.breakpoints[j - 1] };
            let b = if j == m {
                f64::INFINITY
            } else {
                self.breakpoints[j]
            };
            (a, b, self.levels[j])
        })
    }

    /// `sup_{x>=1} |Δ_n(x) - x^{-1/γ}/p|`. The reference curve is continuous
    /// and decreasing, so on each piece the extremes sit at its two ends.
    pub fn sup_distance(&self, gamma: f64, p: f64) -> f64 {
        let reference = |x: f64| {
            if x.is_infinite() {
                0.0
            } else {
                x.powf(-1.0 / gamma) / p
            }
        };
        self.pieces()
            .map(|(a, b, c)| (c - reference(a)).abs().max((c - reference(b)).abs()))
            .fold(0.0, f64::max)
    }

    /// `∫_1^∞ x^{-1/γ-1} (Δ_n(x) - x^{-1/γ}/p)^2 dx` in closed form. With
    /// `u = x^{-1/γ}` each piece contributes
    /// `γ [c²(u_a-u_b) - c q (u_a²-u_b²) + q²(u_a³-u_b³)/3]`, `q = 1/p`.
    pub fn weighted_square_distance(&self, gamma: f64, p: f64) -> f64 {
        let a = 1.0 / gamma;
        let q = 1.0 / p;
        let u = |x: f64| if x.is_infinite() { 0.0 } else { x.powf(-a) };
        self.pieces()
            .map(|(lo, hi, c)| {
                let (ua, ub) = (u(lo), u(hi));
                c * c * (ua - ub) - c * q * (ua * ua - ub * ub)
                    + q * q * (ua * ua * ua - ub * ub * ub) / 3.0
            })
            .sum::<f64>()
            * gamma
    }
}

pub fn delta_curve(s: &SortedCensoredSample, k: usize) -> Result<TailProcessCurve> {
    let n = s.len();
    check_k(k, n, 2, n.saturating_sub(1))?;
    let kf = k as f64;
    let threshold = s.upper(k);

    // atoms in ascending ratio order: i = k-1 down to 1
    let mut breakpoints: Vec<f64> = Vec::with_capacity(k);
    let mut masses: Vec<f64> = Vec::with_capacity(k);
    for i in (1..k).rev() {
        let r = s.upper(i) / threshold;
        if r <= 1.0 {
            continue;
        }
        let fi = i as f64;
        let w = fi / (s.top_uncensored(i) as f64 + fi / kf) / kf;
        match breakpoints.last() {
            Some(&last) if last == r => *masses.last_mut().expect("paired with breakpoint") += w,
            _ => {
                breakpoints.push(r);
                masses.push(w);
            }
        }
    }
    let m = breakpoints.len();
    let mut levels = vec![0.0; m + 1];
    for j in (0..m).rev() {
        levels[j] = levels[j + 1] + masses[j];
    }
    Ok(TailProcessCurve {
        breakpoints,
        levels,
        k,
        n,
    })
}

pub fn integrate_delta(curve: &TailProcessCurve) -> f64 {
    curve.integrate()
}

fn check_gof_inputs(gamma_hat: f64, p_hat: f64) -> Result<()> {
    if !(p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::Undefined(format!(
            "p_hat must lie in (0, 1], got {p_hat}"
        )));
    }
    if !(gamma_hat.is_finite() && gamma_hat > 0.0) {
        return Err(Error::Undefined(format!(
            "gamma_hat must be positive, got {gamma_hat}"
        )));
    }
    Ok(())
}

/// `√k sup_{x>=1} |Δ_n(x) - p̂^{-1} x^{-1/γ̂}|`.
pub fn ks_stat(s: &SortedCensoredSample, k: usize, gamma_hat: f64, p_hat: f64) -> Result<f64> {
    check_gof_inputs(gamma_hat, p_hat)?;
    let curve = delta_curve(s, k)?;
    Ok((k as f64).sqrt() * curve.sup_distance(gamma_hat, p_hat))
}

/// `(p̂γ̂)^{-1} k ∫_1^∞ x^{-1/γ̂-1} (Δ_n(x) - p̂^{-1} x^{-1/γ̂})² dx`.
pub fn cvm_stat(s: &SortedCensoredSample, k: usize, gamma_hat: f64, p_hat: f64) -> Result<f64> {
    check_gof_inputs(gamma_hat, p_hat)?;
    let curve = delta_curve(s, k)?;
    Ok(k as f64 / (p_hat * gamma_hat) * curve.weighted_square_distance(gamma_hat, p_hat))
}

/// Both statistics with `γ̂ = hill(k)` and `p̂ = p_hat(k)`.
pub fn gof_statistics(s: &SortedCensoredSample, k: usize) -> Result<(f64, f64)> {
    let g = hill(s, k)?;
    let p = p_hat(s, k)?;
    check_gof_inputs(g, p)?;
    let curve = delta_curve(s, k)?;
    let kf = k as f64;
    Ok((
        kf.sqrt() * curve.sup_distance(g, p),
        kf / (p * g) * curve.weighted_square_distance(g, p),
    ))
}

/// Add-one Monte Carlo p-value `(1 + #{sim >= observed}) / (reps + 1)`.
pub fn mc_pvalue(observed: f64, simulated: &[f64]) -> f64 {
    let exceed = simulated.iter().filter(|&&v| v >= observed).count();
    (1 + exceed) as f64 / (simulated.len() + 1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub ks: f64,
    pub cvm: f64,
    pub p_value_ks: Option<f64>,
    pub p_value_cvm: Option<f64>,
    pub k: usize,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
}

impl GofReport {
    pub const CSV_HEADER: &'static str = "ks,cvm,p_ks,p_cvm,k,n,reps,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            sig6(self.ks),
            sig6(self.cvm),
            sig6_opt(self.p_value_ks),
            sig6_opt(self.p_value_cvm),
            self.k,
            self.n,
            self.reps,
            self.seed
        )
    }
}

/// Parametric-bootstrap p-values for the KS and CvM statistics.
///
/// Null datasets of the observed size are drawn from `Pareto(γ̂₁)` censored by
/// `Pareto(γ̂₂)`, where `γ̂₁ = γ̂ / p̂` and `γ̂₂ = γ̂₁ p̂ / (1 - p̂)` reproduce the
/// observed `(γ̂, p̂)`. Replicate `r` uses the stream pair `(seed, r)`. A
/// replicate whose statistics are undefined (no uncensored extremes) counts
/// as an exceedance.
pub fn gof_pvalue(s: &SortedCensoredSample, k: usize, reps: usize, seed: u64) -> Result<GofReport> {
    if reps < 100 {
        return Err(Error::domain(format!(
            "at least 100 replicates are required, got {reps}"
        )));
    }
    let n = s.len();
    let (ks, cvm) = gof_statistics(s, k)?;
    let g = hill(s, k)?;
    let p = p_hat(s, k)?;
    if p >= 1.0 {
        return Err(Error::DegenerateNull(
            "p_hat = 1: no censoring among the extremes".into(),
        ));
    }
    let gamma1 = g / p;
    let model_x = HeavyTailModel::pareto(gamma1)?;
    let model_y = HeavyTailModel::pareto(censoring_index_for(gamma1, p)?)?;

    let simulated: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let (mut rx, mut ry) = replicate_streams(seed, r);
            let obs = generate_censored(&model_x, &model_y, n, &mut rx, &mut ry);
            SortedCensoredSample::from_observations(&obs)
                .and_then(|sim| gof_statistics(&sim, k))
                .unwrap_or((f64::INFINITY, f64::INFINITY))
        })
        .collect();
    let (sim_ks, sim_cvm): (Vec<f64>, Vec<f64>) = simulated.into_iter().unzip();
    Ok(GofReport {
        ks,
        cvm,
        p_value_ks: Some(mc_pvalue(ks, &sim_ks)),
        p_value_cvm: Some(mc_pvalue(cvm, &sim_cvm)),
        k,
        n,
        reps,
        seed,
    })
}
