//! f-DP trade-off curves.
//!
//! A trade-off curve `f` maps the type-I error `x` of a test between two
//! neighbouring outputs to the smallest achievable type-II error. Curves here
//! are closed-form: the (ε, δ) curve, the Gaussian (μ-GDP) curve, and the
//! τ-shift `g(s) = f(min(1, s + τ))` that absorbs a bounded total-variation
//! gap between the real and the proxy label distribution.
//!
//! Most callers work with `f̄(x) = 1 - f(x)`, the power of the best test at
//! level `x`, and with its generalized inverse.

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, Error, Result};
use crate::normal;

const INVERSE_TOLERANCE: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 100;

/// Number of log-spaced abscissae scanned by [`eps_from_tradeoff`].
const EPS_GRID_POINTS: usize = 20_000;
/// Smallest abscissa of that scan (log10).
const EPS_GRID_MIN_LOG10: f64 = -300.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TradeoffFunction {
    /// The symmetrized (ε, δ)-DP curve `max(0, 1-δ-e^ε x, e^-ε (1-δ-x))`.
    EpsDelta { eps: f64, delta: f64 },
    /// `Φ(Φ⁻¹(1-x) - μ)`.
    Gaussian { mu: f64 },
    /// `s ↦ base(min(1, s + τ))`.
    Shifted { base: Box<TradeoffFunction>, tau: f64 },
}

impl TradeoffFunction {
    pub fn eps_delta(eps: f64, delta: f64) -> Result<Self> {
        check_closed("eps", eps, 0.0, f64::INFINITY, "[0, inf]")?;
        check_closed("delta", delta, 0.0, 1.0, "[0, 1]")?;
        Ok(Self::EpsDelta { eps, delta })
    }

    pub fn gaussian(mu: f64) -> Result<Self> {
        check_closed("mu", mu, 0.0, f64::INFINITY, "[0, inf]")?;
        Ok(Self::Gaussian { mu })
    }

    /// Perfect privacy, `f(x) = 1 - x`.
    pub fn identity() -> Self {
        Self::EpsDelta {
            eps: 0.0,
            delta: 0.0,
        }
    }

    pub fn shifted(&self, tau: f64) -> Result<Self> {
        check_closed("tau", tau, 0.0, 1.0, "[0, 1]")?;
        Ok(Self::Shifted {
            base: Box::new(self.clone()),
            tau,
        })
    }

    /// `f(x)`; `x` is clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            Self::EpsDelta { eps, delta } => {
                let a = 1.0 - delta - eps.exp() * x;
                let b = (-eps).exp() * (1.0 - delta - x);
                a.max(b).max(0.0)
            }
            Self::Gaussian { mu } => {
                if x <= 0.0 {
                    1.0
                } else if x >= 1.0 {
                    0.0
                } else {
                    // Φ(Φ⁻¹(1-x) - μ) written without forming 1-x.
                    normal::cdf(-normal::quantile(x) - mu)
                }
            }
            Self::Shifted { base, tau } => base.eval((x + tau).min(1.0)),
        }
    }

    /// `f̄(x) = 1 - f(x)`, evaluated without cancellation for small `x`.
    pub fn fbar(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            Self::EpsDelta { eps, delta } => {
                let a = delta + eps.exp() * x;
                let b = 1.0 - (-eps).exp() * (1.0 - delta - x);
                a.min(b).min(1.0)
            }
            Self::Gaussian { mu } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    normal::cdf(normal::quantile(x) + mu)
                }
            }
            Self::Shifted { base, tau } => base.fbar((x + tau).min(1.0)),
        }
    }

    /// Closed-form `sup{x ∈ [0,1] : f̄(x) <= r}`.
    ///
    /// Agrees with the bisection in [`fbar_inverse`] up to its tolerance and
    /// is what the audit recursion calls in its inner loop.
    pub fn fbar_inverse_exact(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 1.0;
        }
        if r.is_nan() || r < 0.0 {
            return 0.0;
        }
        let x = match self {
            Self::EpsDelta { eps, delta } => {
                // f̄ is the minimum of two increasing lines (and 1), so the
                // sublevel set is the union of their sublevel sets.
                let first = if r >= *delta {
                    (r - delta) * (-eps).exp()
                } else {
                    f64::NEG_INFINITY
                };
                let second = 1.0 - delta - eps.exp() * (1.0 - r);
                first.max(second)
            }
            Self::Gaussian { mu } => normal::cdf(normal::quantile(r) - mu),
            // Every valid curve has f̄(1) = 1 > r here, so the base sublevel
            // set is [0, X] with X < 1.
            Self::Shifted { base, tau } => base.fbar_inverse_exact(r) - tau,
        };
        x.clamp(0.0, 1.0)
    }
}

/// A totally ordered family of Gaussian trade-off curves `f_μ`, `μ ∈ [mu_min, mu_max]`.
///
/// Smaller μ is stronger privacy: `μ₁ < μ₂ ⇒ f_μ₁ >= f_μ₂` pointwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffFamily {
    pub mu_min: f64,
    pub mu_max: f64,
    /// Bisection stops once the μ bracket is narrower than this.
    pub tolerance: f64,
}

impl Default for TradeoffFamily {
    fn default() -> Self {
        Self {
            mu_min: 1e-4,
            mu_max: 20.0,
            tolerance: 1e-3,
        }
    }
}

impl TradeoffFamily {
    pub fn gaussian(mu_min: f64, mu_max: f64, tolerance: f64) -> Result<Self> {
        check_closed("mu_min", mu_min, 0.0, f64::MAX, "[0, inf)")?;
        if !(mu_max > mu_min && mu_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mu range [{mu_min}, {mu_max}] is empty"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "search tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(Self {
            mu_min,
            mu_max,
            tolerance,
        })
    }

    pub fn member(&self, mu: f64) -> TradeoffFunction {
        TradeoffFunction::Gaussian { mu }
    }
}

pub fn eval_eps_delta(eps: f64, delta: f64, x: f64) -> Result<f64> {
    check_closed("x", x, 0.0, 1.0, "[0, 1]")?;
    Ok(TradeoffFunction::eps_delta(eps, delta)?.eval(x))
}

pub fn eval_gaussian(mu: f64, x: f64) -> Result<f64> {
    check_closed("x", x, 0.0, 1.0, "[0, 1]")?;
    Ok(TradeoffFunction::gaussian(mu)?.eval(x))
}

pub fn shift_tradeoff(f: &TradeoffFunction, tau: f64) -> Result<TradeoffFunction> {
    f.shifted(tau)
}

/// `sup{x ∈ [0,1] : 1 - f(x) <= r}` by bisection on the non-decreasing `f̄`.
///
/// Returns 0 when only `x = 0` (or nothing) qualifies and 1 when `f̄(1) <= r`.
pub fn fbar_inverse(f: &TradeoffFunction, r: f64) -> f64 {
    if f.fbar(1.0) <= r {
        return 1.0;
    }
    if !(f.fbar(0.0) <= r) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..INVERSE_MAX_ITER {
        if hi - lo <= INVERSE_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f.fbar(mid) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `max(0, sup_{x ∈ (0,1]} log((1 - f(x) - δ) / x))`: the ε at level δ
/// implied by a single trade-off curve.
///
/// A log-spaced scan locates the maximizer, then golden-section search
/// refines it between the neighbouring grid points. Points where
/// `1 - f(x) - δ` is within a relative 1e-9 of δ are skipped, since
/// cancellation makes the ratio meaningless there.
pub fn eps_from_tradeoff(f: &TradeoffFunction, delta: f64) -> Result<f64> {
    check_closed("delta", delta, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
    let objective = |log_x: f64| -> f64 {
        let x = log_x.exp();
        let power = f.fbar(x) - delta;
        // Below this the difference is dominated by rounding in `fbar`.
        if power > 1e-9 * delta {
            power.ln() - log_x
        } else {
            f64::NEG_INFINITY
        }
    };

    let lo = EPS_GRID_MIN_LOG10 * std::f64::consts::LN_10;
    let step = -lo / (EPS_GRID_POINTS - 1) as f64;
    let log_x = |i: usize| {
        if i + 1 == EPS_GRID_POINTS {
            0.0
        } else {
            lo + step * i as f64
        }
    };
    let (best_idx, best) = (0..EPS_GRID_POINTS)
        .map(|i| (i, objective(log_x(i))))
        .fold((0, f64::NEG_INFINITY), |acc, cur| {
            if cur.1 > acc.1 {
                cur
            } else {
                acc
            }
        });
    if best == f64::NEG_INFINITY {
        return Ok(0.0);
    }

    let mut a = log_x(best_idx.saturating_sub(1));
    let mut b = log_x((best_idx + 1).min(EPS_GRID_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    Ok(best.max(fc).max(fd).max(0.0))
}
