//! Turning a game tally into a decision about a trade-off curve, and into an
//! empirical ε.
//!
//! [`evaluate_audit`] runs the backward recursion over `i = c-1, …, 0`:
//!
//! ```text
//! r[c] = γ c / m,    h[c] = γ (c' - c) / m
//! h[i] = f̄⁻¹(r[i+1])
//! r[i] = r[i+1] + i / (c' - i) · (h[i] - h[i+1])
//! ```
//!
//! and rejects `f` when `r[0] + h[0] >= c' / m`: under `f`-DP, at least `c`
//! correct guesses out of `c'` would then have probability at most γ.
//! [`empirical_epsilon`] bisects the Gaussian family for the strongest curve
//! that is *not* rejected and reports its ε(δ).

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, Error, Result};
use crate::game::{outcomes_for_fractions, ScoredGame};
use crate::tradeoff::{eps_from_tradeoff, fbar_inverse, TradeoffFamily, TradeoffFunction};

pub const DEFAULT_GAMMA: f64 = 0.05;
pub const DEFAULT_DELTA: f64 = 1e-5;
const MU_SEARCH_MAX_ITER: usize = 40;

/// `(m, c', c)`: canaries, non-abstaining guesses, correct guesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub m: u64,
    pub c_prime: u64,
    pub c: u64,
}

impl AuditOutcome {
    pub fn new(m: u64, c_prime: u64, c: u64) -> Result<Self> {
        if m == 0 || c > c_prime || c_prime > m {
            return Err(Error::InvalidArgument(format!(
                "audit outcome needs 0 <= c <= c' <= m and m > 0, got m = {m}, c' = {c_prime}, c = {c}"
            )));
        }
        Ok(Self { m, c_prime, c })
    }

    /// `c / c'`, or `None` without guesses.
    pub fn accuracy(&self) -> Option<f64> {
        (self.c_prime > 0).then(|| self.c as f64 / self.c_prime as f64)
    }
}

/// How `f̄⁻¹` is evaluated inside the recursion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Inversion {
    /// [`TradeoffFunction::fbar_inverse_exact`].
    #[default]
    ClosedForm,
    /// [`fbar_inverse`].
    Bisection,
}

/// The arrays `r[0..=c]` and `h[0..=c]` of one recursion run.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditRecursionState {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
}

impl AuditRecursionState {
    pub fn rejects(&self, outcome: &AuditOutcome) -> bool {
        self.r[0] + self.h[0] >= outcome.c_prime as f64 / outcome.m as f64
    }
}

fn recurse(
    f: &TradeoffFunction,
    outcome: &AuditOutcome,
    gamma: f64,
    inversion: Inversion,
    mut record: impl FnMut(usize, f64, f64),
) -> (f64, f64) {
    let m = outcome.m as f64;
    let c = outcome.c as usize;
    let c_prime = outcome.c_prime as f64;
    let mut r = gamma * c as f64 / m;
    let mut h = gamma * (c_prime - c as f64) / m;
    record(c, r, h);
    for i in (0..c).rev() {
        let h_i = match inversion {
            Inversion::ClosedForm => f.fbar_inverse_exact(r),
            Inversion::Bisection => fbar_inverse(f, r),
        };
        // i < c <= c', so the denominator is at least 1.
        r += i as f64 / (c_prime - i as f64) * (h_i - h);
        h = h_i;
        record(i, r, h);
    }
    (r, h)
}

pub fn audit_recursion(
    f: &TradeoffFunction,
    outcome: &AuditOutcome,
    gamma: f64,
    inversion: Inversion,
) -> AuditRecursionState {
    let len = outcome.c as usize + 1;
    let mut state = AuditRecursionState {
        r: vec![0.0; len],
        h: vec![0.0; len],
    };
    recurse(f, outcome, gamma, inversion, |i, r, h| {
        state.r[i] = r;
        state.h[i] = h;
    });
    state
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            range: "(0, 1)",
        })
    }
}

/// `true` if `f` is consistent with the tally at level γ, `false` if the tally
/// rejects it.
pub fn evaluate_audit(f: &TradeoffFunction, outcome: &AuditOutcome, gamma: f64) -> Result<bool> {
    evaluate_audit_with(f, outcome, gamma, Inversion::ClosedForm)
}

pub fn evaluate_audit_with(
    f: &TradeoffFunction,
    outcome: &AuditOutcome,
    gamma: f64,
    inversion: Inversion,
) -> Result<bool> {
    check_gamma(gamma)?;
    if outcome.c_prime == 0 {
        return Ok(true);
    }
    let (r0, h0) = recurse(f, outcome, gamma, inversion, |_, _, _| {});
    Ok(r0 + h0 < outcome.c_prime as f64 / outcome.m as f64)
}

/// Audits `f` against a proxy within total-variation distance τ of the real
/// label distribution by testing `g(s) = f(min(1, s + τ))` instead.
pub fn audit_with_shift(f: &TradeoffFunction, tau: f64, outcome: &AuditOutcome, gamma: f64) -> Result<bool> {
    if tau == 0.0 {
        return evaluate_audit(f, outcome, gamma);
    }
    evaluate_audit(&f.shifted(tau)?, outcome, gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEpsilon {
    pub epsilon: f64,
    /// μ of the strongest accepted member of the family.
    pub mu: f64,
    /// Every μ in the family range was rejected; `epsilon` is that of `mu_max`
    /// and the true bound lies above it.
    pub saturated: bool,
}

/// ε(δ) of the strongest Gaussian curve the tally does not reject.
pub fn empirical_epsilon(
    outcome: &AuditOutcome,
    gamma: f64,
    delta: f64,
    tau: f64,
    family: &TradeoffFamily,
) -> Result<EmpiricalEpsilon> {
    check_gamma(gamma)?;
    check_closed("delta", delta, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
    check_closed("tau", tau, 0.0, 1.0, "[0, 1]")?;
    let accepts = |mu: f64| audit_with_shift(&family.member(mu), tau, outcome, gamma);

    if accepts(family.mu_min)? {
        return Ok(EmpiricalEpsilon {
            epsilon: 0.0,
            mu: family.mu_min,
            saturated: false,
        });
    }
    if !accepts(family.mu_max)? {
        return Ok(EmpiricalEpsilon {
            epsilon: eps_from_tradeoff(&family.member(family.mu_max), delta)?,
            mu: family.mu_max,
            saturated: true,
        });
    }

    let (mut lo, mut hi) = (family.mu_min, family.mu_max);
    for _ in 0..MU_SEARCH_MAX_ITER {
        if hi - lo <= family.tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if accepts(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Spot-check monotonicity on either side of the boundary.
    let above = 0.5 * (hi + family.mu_max);
    let below = 0.5 * (family.mu_min + lo);
    if !accepts(above)? || (below > family.mu_min && accepts(below)?) {
        return Err(Error::InconsistentFamily(format!(
            "boundary in [{lo}, {hi}] but probes at {below} / {above} disagree"
        )));
    }

    Ok(EmpiricalEpsilon {
        epsilon: eps_from_tradeoff(&family.member(hi), delta)?,
        mu: hi,
        saturated: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepBest {
    pub epsilon: EmpiricalEpsilon,
    pub fraction: f64,
    pub outcome: AuditOutcome,
}

/// Largest empirical ε over guess fractions; ties go to the smaller fraction.
///
/// A fraction that rounds to zero guesses contributes ε = 0. No correction
/// for testing several fractions is applied.
pub fn best_epsilon_over_guess_sweep(
    scored: &ScoredGame<'_>,
    fractions: &[f64],
    gamma: f64,
    delta: f64,
    tau: f64,
    family: &TradeoffFamily,
) -> Result<SweepBest> {
    if fractions.is_empty() {
        return Err(Error::InvalidArgument("guess-fraction sweep needs at least one fraction".into()));
    }
    let mut sorted = fractions.to_vec();
    sorted.sort_by(f64::total_cmp);
    let outcomes = outcomes_for_fractions(scored, &sorted)?;
    let mut best: Option<SweepBest> = None;
    for (&fraction, outcome) in sorted.iter().zip(outcomes) {
        let epsilon = empirical_epsilon(&outcome, gamma, delta, tau, family)?;
        if best.is_none_or(|b| epsilon.epsilon > b.epsilon.epsilon) {
            best = Some(SweepBest {
                epsilon,
                fraction,
                outcome,
            });
        }
    }
    Ok(best.expect("non-empty sweep"))
}
