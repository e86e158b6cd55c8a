//! Heavy-tailed parametric models used for simulation and as null models.
//!
//! `LogGamma(a, b)` is parametrized so that `log X ~ Gamma(shape a, scale b)`;
//! its extreme value index is therefore the scale `b`. `Pareto(γ)` has support
//! `x >= 1` and survival function `x^(-1/γ)` exactly.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::rng::open01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeavyTailModel {
    Burr { beta: f64, tau: f64, lambda: f64 },
    Frechet { gamma: f64 },
    LogGamma { a: f64, b: f64 },
    Pareto { gamma: f64 },
}

/// Tail parameters of the observed pair `Z = min(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoringProfile {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma: f64,
    pub p: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl HeavyTailModel {
    pub fn burr(beta: f64, tau: f64, lambda: f64) -> Result<Self> {
        Ok(Self::Burr {
            beta: positive("beta", beta)?,
            tau: positive("tau", tau)?,
            lambda: positive("lambda", lambda)?,
        })
    }

    pub fn frechet(gamma: f64) -> Result<Self> {
        Ok(Self::Frechet {
            gamma: positive("gamma", gamma)?,
        })
    }

    pub fn log_gamma(a: f64, b: f64) -> Result<Self> {
        Ok(Self::LogGamma {
            a: positive("a", a)?,
            b: positive("b", b)?,
        })
    }

    pub fn pareto(gamma: f64) -> Result<Self> {
        Ok(Self::Pareto {
            gamma: positive("gamma", gamma)?,
        })
    }

    /// Burr(1, 1/γ, 1): the simplest Burr member with index `gamma`.
    pub fn burr_with_evi(gamma: f64) -> Result<Self> {
        Self::burr(1.0, 1.0 / positive("gamma", gamma)?, 1.0)
    }

    pub fn true_evi(&self) -> f64 {
        match *self {
            Self::Burr { tau, lambda, .. } => 1.0 / (tau * lambda),
            Self::Frechet { gamma } | Self::Pareto { gamma } => gamma,
            Self::LogGamma { b, .. } => b,
        }
    }

    fn check_x(x: f64) -> Result<()> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::domain(format!(
                "cdf argument must be finite and >= 0, got {x}"
            )));
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(match *self {
            Self::Burr { beta, tau, lambda } => -(-lambda * (x.powf(tau) / beta).ln_1p()).exp_m1(),
            Self::Frechet { gamma } => {
                if x == 0.0 {
                    0.0
                } else {
                    (-x.powf(-1.0 / gamma)).exp()
                }
            }
            Self::LogGamma { a, b } => {
                if x <= 1.0 {
                    0.0
                } else {
                    gamma_lr(a, x.ln() / b)
                }
            }
            Self::Pareto { gamma } => {
                if x <= 1.0 {
                    0.0
                } else {
                    -(-x.ln() / gamma).exp_m1()
                }
            }
        })
    }

    /// `1 - cdf(x)`, evaluated without cancellation where a closed form allows.
    pub fn survival(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(match *self {
            Self::Burr { beta, tau, lambda } => (-lambda * (x.powf(tau) / beta).ln_1p()).exp(),
            Self::Pareto { gamma } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-1.0 / gamma)
                }
            }
            Self::LogGamma { a, b } => {
                if x <= 1.0 {
                    1.0
                } else {
                    gamma_ur(a, x.ln() / b)
                }
            }
            Self::Frechet { .. } => -self.cdf(x)?.ln().exp_m1(),
        })
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!(
                "quantile level must lie in (0, 1), got {u}"
            )));
        }
        Ok(match *self {
            Self::Burr { beta, tau, lambda } => {
                (beta * (-(-u).ln_1p() / lambda).exp_m1()).powf(1.0 / tau)
            }
            Self::Frechet { gamma } => (-u.ln()).powf(-gamma),
            Self::LogGamma { a, b } => (b * inverse_gamma_lr(a, u)).exp(),
            Self::Pareto { gamma } => (-gamma * (-u).ln_1p()).exp(),
        })
    }

    /// Draws `count` variates. All families except log-gamma use inverse
    /// transform of one open-interval uniform per draw; log-gamma samples
    /// `log X` from a gamma variate directly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        match *self {
            Self::LogGamma { a, b } => {
                let g = Gamma::new(a, b).expect("validated gamma parameters");
                (0..count).map(|_| g.sample(rng).exp()).collect()
            }
            _ => (0..count)
                .map(|_| self.quantile(open01(rng)).expect("open01 lies in (0, 1)"))
                .collect(),
        }
    }

    /// Single draw; see [`HeavyTailModel::sample`].
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::LogGamma { a, b } => Gamma::new(a, b)
                .expect("validated gamma parameters")
                .sample(rng)
                .exp(),
            _ => self.quantile(open01(rng)).expect("open01 lies in (0, 1)"),
        }
    }
}

/// Solves `P(a, y) = p` for `y` by safeguarded Newton iteration on a bracket.
fn inverse_gamma_lr(a: f64, p: f64) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = a.max(1.0);
    while gamma_lr(a, hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    let ln_norm = ln_gamma(a);
    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = gamma_lr(a, y) - p;
        if f > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let dens = ((a - 1.0) * y.ln() - y - ln_norm).exp();
        let mut next = if dens > 0.0 { y - f / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-15 * y.max(1e-300) || hi - lo <= 1e-15 * hi {
            return next;
        }
        y = next;
    }
    y
}

/// Tail parameters of `min(X, Y)` for independent `X ~ model_x`, `Y ~ model_y`.
pub fn censoring_profile(model_x: &HeavyTailModel, model_y: &HeavyTailModel) -> CensoringProfile {
    profile_from_indices(model_x.true_evi(), model_y.true_evi())
}

pub fn profile_from_indices(gamma1: f64, gamma2: f64) -> CensoringProfile {
    CensoringProfile {
        gamma1,
        gamma2,
        gamma: gamma1 * gamma2 / (gamma1 + gamma2),
        p: gamma2 / (gamma1 + gamma2),
    }
}

/// The censoring index `γ₂` that yields proportion `p` against `γ₁`.
pub fn censoring_index_for(gamma1: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "proportion must lie in (0, 1), got {p}"
        )));
    }
    Ok(gamma1 * p / (1.0 - p))
}

impl fmt::Display for HeavyTailModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Burr { beta, tau, lambda } => write!(f, "burr:{beta},{tau},{lambda}"),
            Self::Frechet { gamma } => write!(f, "frechet:{gamma}"),
            Self::LogGamma { a, b } => write!(f, "loggamma:{a},{b}"),
            Self::Pareto { gamma } => write!(f, "pareto:{gamma}"),
        }
    }
}

impl FromStr for HeavyTailModel {
    type Err = Error;

    /// Grammar: `burr:<beta>,<tau>,<lambda>` | `frechet:<gamma>` |
    /// `loggamma:<a>,<b>` | `pareto:<gamma>`.
    fn from_str(spec: &str) -> Result<Self> {
        let err = |field: &str, reason: String| Error::ModelSpec {
            spec: spec.to_string(),
            field: field.to_string(),
            reason,
        };
        let (family, params) = spec
            .split_once(':')
            .ok_or_else(|| err("family", "expected `<family>:<params>`".into()))?;
        let names: &[&str] = match family.trim().to_ascii_lowercase().as_str() {
            "burr" => &["beta", "tau", "lambda"],
            "frechet" => &["gamma"],
            "loggamma" => &["a", "b"],
            "pareto" => &["gamma"],
            other => return Err(err("family", format!("unknown family `{other}`"))),
        };
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() != names.len() {
            return Err(err(
                "params",
                format!("expected {} parameter(s), got {}", names.len(), parts.len()),
            ));
        }
        let mut values = Vec::with_capacity(names.len());
        for (name, raw) in names.iter().zip(&parts) {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| err(name, format!("`{raw}` is not a number")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(err(name, format!("must be finite and > 0, got {raw}")));
            }
            values.push(v);
        }
        Ok(match names.len() {
            3 => Self::Burr {
                beta: values[0],
                tau: values[1],
                lambda: values[2],
            },
            2 => Self::LogGamma {
                a: values[0],
                b: values[1],
            },
            _ if family.trim().eq_ignore_ascii_case("frechet") => {
                Self::Frechet { gamma: values[0] }
            }
            _ => Self::Pareto { gamma: values[0] },
        })
    }
}
