//! Browser bindings for the auditing library.
//!
//! Three operations back the page in `www/`: plotting a (shifted) Gaussian
//! trade-off curve, converting a game tally into an empirical ε, and running
//! a small randomized-response audit end to end. Each has a plain Rust
//! function returning `Result<_, String>` and a thin exported wrapper.

use obsaudit::experiment::{run_experiment, ExperimentConfig};
use obsaudit::{empirical_epsilon, AuditOutcome, TradeoffFamily, TradeoffFunction};
use wasm_bindgen::prelude::*;

/// Largest dataset the page accepts; keeps a run to a few seconds.
pub const MAX_DEMO_SAMPLES: usize = 200_000;
pub const MAX_DEMO_REPETITIONS: usize = 50;

/// `f(x)` of μ-GDP shifted by τ, at `points` evenly spaced `x` in `[0, 1]`.
pub fn tradeoff_curve(mu: f64, tau: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 {
        return Err("need at least two points".into());
    }
    let f = TradeoffFunction::gaussian(mu).map_err(|e| e.to_string())?;
    let f = f.shifted(tau).map_err(|e| e.to_string())?;
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| f.eval(i as f64 / last)).collect())
}

#[wasm_bindgen]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonEstimate {
    pub epsilon: f64,
    pub mu: f64,
    pub saturated: bool,
}

pub fn epsilon_from_tally(
    m: u32,
    c_prime: u32,
    c: u32,
    gamma: f64,
    delta: f64,
    tau: f64,
) -> Result<EpsilonEstimate, String> {
    let outcome = AuditOutcome::new(m.into(), c_prime.into(), c.into()).map_err(|e| e.to_string())?;
    let e = empirical_epsilon(&outcome, gamma, delta, tau, &TradeoffFamily::default()).map_err(|e| e.to_string())?;
    Ok(EpsilonEstimate {
        epsilon: e.epsilon,
        mu: e.mu,
        saturated: e.saturated,
    })
}

#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    mean: f64,
    std: f64,
    accuracy: f64,
    per_repetition: Vec<f64>,
}

#[wasm_bindgen]
impl SimulationSummary {
    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> f64 {
        self.mean
    }

    #[wasm_bindgen(getter)]
    pub fn std(&self) -> f64 {
        self.std
    }

    /// Mean share of correct guesses; NaN when no repetition guessed.
    #[wasm_bindgen(getter)]
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    #[wasm_bindgen(getter, js_name = perRepetition)]
    pub fn per_repetition(&self) -> Vec<f64> {
        self.per_repetition.clone()
    }
}

/// Audits k-ary randomized response at ε on `n` mixture samples with the
/// ground-truth proxy.
pub fn simulate(
    n: usize,
    k: usize,
    eps: f64,
    fraction: f64,
    repetitions: usize,
    seed: u64,
) -> Result<SimulationSummary, String> {
    if n > MAX_DEMO_SAMPLES || repetitions > MAX_DEMO_REPETITIONS {
        return Err(format!(
            "demo limits: n <= {MAX_DEMO_SAMPLES}, repetitions <= {MAX_DEMO_REPETITIONS}"
        ));
    }
    let cfg = ExperimentConfig {
        n,
        k: vec![k],
        eps_list: vec![eps],
        guess_fractions: vec![fraction],
        repetitions,
        base_seed: seed,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let s = &report.summaries[0];
    Ok(SimulationSummary {
        mean: s.mean_emp_eps,
        std: s.std_emp_eps,
        accuracy: s.mean_accuracy.unwrap_or(f64::NAN),
        per_repetition: s.per_repetition.clone(),
    })
}

#[wasm_bindgen(js_name = tradeoffCurve)]
pub fn tradeoff_curve_js(mu: f64, tau: f64, points: usize) -> Result<Vec<f64>, JsError> {
    tradeoff_curve(mu, tau, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = epsilonFromTally)]
pub fn epsilon_from_tally_js(
    m: u32,
    c_prime: u32,
    c: u32,
    gamma: f64,
    delta: f64,
    tau: f64,
) -> Result<EpsilonEstimate, JsError> {
    epsilon_from_tally(m, c_prime, c, gamma, delta, tau).map_err(|e| JsError::new(&e))
}

/// The seed crosses the boundary as f64 because JS numbers are doubles.
#[wasm_bindgen(js_name = simulateAudit)]
pub fn simulate_js(
    n: usize,
    k: usize,
    eps: f64,
    fraction: f64,
    repetitions: usize,
    seed: f64,
) -> Result<SimulationSummary, JsError> {
    simulate(n, k, eps, fraction, repetitions, seed as u64).map_err(|e| JsError::new(&e))
}
