//! Repeated randomized-response audits on synthetic mixture data.
//!
//! For every `(k, ε)` the runner samples one dataset and one mechanism output,
//! then replays the game `repetitions` times with fresh hidden bits and
//! counterfactual labels. All randomness comes from [`crate::seeding`]
//! streams, so a report is a pure function of its config.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audit::{best_epsilon_over_guess_sweep, empirical_epsilon, AuditOutcome, DEFAULT_DELTA, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::game::{
    draw_artifacts, outcomes_for_fractions, score_with_probs, PosteriorPrior, ScoredGame, DEFAULT_SCORE_EXPONENT,
};
use crate::mechanism::{LabelMechanism, RandomizedResponse};
use crate::proxy::{train_logistic, LogisticConfig, ProxyModel};
use crate::seeding::{stream, Purpose};
use crate::synthdata::{sample_mixture, LabeledDataset, DEFAULT_DIM};
use crate::tradeoff::TradeoffFamily;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str =
    "k,theoretical_eps,proxy_kind,tau,guess_fraction,repetition,c_prime,c,empirical_eps,saturated";

/// Where counterfactual labels come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProxyKind {
    GroundTruth,
    /// Binary only.
    Shifted { tau: f64 },
    /// Logistic regression fitted on an independent sample of the same size.
    Logistic,
}

impl fmt::Display for ProxyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GroundTruth => f.write_str("ground_truth"),
            Self::Shifted { tau } => write!(f, "shifted:{tau}"),
            Self::Logistic => f.write_str("logistic"),
        }
    }
}

impl FromStr for ProxyKind {
    type Err = Error;

    /// Accepts `ground_truth`, `logistic`, `shifted:TAU` and `shifted(TAU)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "ground_truth" | "ground-truth" => return Ok(Self::GroundTruth),
            "logistic" => return Ok(Self::Logistic),
            _ => {}
        }
        let tau = s
            .strip_prefix("shifted:")
            .or_else(|| s.strip_prefix("shifted(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::parse("proxy_kind", format!("unknown proxy kind {s:?}")))?;
        let tau = parse_f64("proxy_kind", tau)?;
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::parse("proxy_kind", format!("shift {tau} outside [0, 1]")));
        }
        Ok(Self::Shifted { tau })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Class counts; each gets its own dataset.
    pub k: Vec<usize>,
    /// Feature dimension, raised to `k` where smaller.
    pub d: usize,
    pub eps_list: Vec<f64>,
    pub proxy_kind: ProxyKind,
    pub tau_audit: f64,
    pub guess_fractions: Vec<f64>,
    pub t: f64,
    pub posterior_prior: PosteriorPrior,
    pub gamma: f64,
    pub delta: f64,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Report only the best fraction per repetition instead of every one.
    pub sweep: bool,
    /// Redraw dataset and mechanism noise in every repetition.
    pub resample_all: bool,
    pub logistic: LogisticConfig,
    pub family: TradeoffFamily,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1_000_000,
            k: vec![2, 5, 10],
            d: DEFAULT_DIM,
            eps_list: vec![0.5, 1.0, 2.0, 3.0, 4.0],
            proxy_kind: ProxyKind::GroundTruth,
            tau_audit: 0.0,
            guess_fractions: vec![0.001, 0.01],
            t: DEFAULT_SCORE_EXPONENT,
            posterior_prior: PosteriorPrior::default(),
            gamma: DEFAULT_GAMMA,
            delta: DEFAULT_DELTA,
            repetitions: 100,
            base_seed: 0,
            sweep: false,
            resample_all: false,
            logistic: LogisticConfig::default(),
            family: TradeoffFamily::default(),
        }
    }
}

/// Every key accepted by [`ExperimentConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "n",
    "k",
    "d",
    "eps_list",
    "proxy_kind",
    "tau_audit",
    "guess_fractions",
    "t",
    "posterior_prior",
    "gamma",
    "delta",
    "repetitions",
    "base_seed",
    "sweep",
    "resample_all",
    "learning_rate",
    "iterations",
    "l2",
    "mu_min",
    "mu_max",
    "mu_tolerance",
];

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|e| Error::parse("config", format!("{key}: {v:?}: {e}")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    let v = v.trim();
    // Allow `1e6` style integers.
    if let Ok(n) = v.parse::<usize>() {
        return Ok(n);
    }
    let x = parse_f64(key, v)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::parse("config", format!("{key}: {v:?} is not a non-negative integer")))
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::parse("config", format!("{key}: {other:?} is not a boolean"))),
    }
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    let v = v.trim();
    let inner = v.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(v);
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

impl ExperimentConfig {
    /// The reference defaults shrunk for quick runs.
    pub fn smoke() -> Self {
        Self {
            n: 100_000,
            repetitions: 20,
            ..Self::default()
        }
    }

    /// Sets one key from its textual value; hyphens in `key` are accepted in
    /// place of underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        match k {
            "n" => self.n = parse_usize(k, value)?,
            "k" => self.k = parse_list(k, value, parse_usize)?,
            "d" => self.d = parse_usize(k, value)?,
            "eps_list" | "eps" => self.eps_list = parse_list(k, value, parse_f64)?,
            "proxy_kind" | "proxy" => self.proxy_kind = value.parse()?,
            "tau_audit" | "tau" => self.tau_audit = parse_f64(k, value)?,
            "guess_fractions" | "fractions" => self.guess_fractions = parse_list(k, value, parse_f64)?,
            "t" => self.t = parse_f64(k, value)?,
            "posterior_prior" => self.posterior_prior = value.parse()?,
            "gamma" => self.gamma = parse_f64(k, value)?,
            "delta" => self.delta = parse_f64(k, value)?,
            "repetitions" | "reps" => self.repetitions = parse_usize(k, value)?,
            "base_seed" | "seed" => {
                self.base_seed = value
                    .trim()
                    .parse()
                    .map_err(|e| Error::parse("config", format!("{k}: {value:?}: {e}")))?
            }
            "sweep" => self.sweep = parse_bool(k, value)?,
            "resample_all" => self.resample_all = parse_bool(k, value)?,
            "learning_rate" => self.logistic.learning_rate = parse_f64(k, value)?,
            "iterations" => self.logistic.iterations = parse_usize(k, value)?,
            "l2" => self.logistic.l2 = parse_f64(k, value)?,
            "mu_min" => self.family.mu_min = parse_f64(k, value)?,
            "mu_max" => self.family.mu_max = parse_f64(k, value)?,
            "mu_tolerance" => self.family.tolerance = parse_f64(k, value)?,
            _ => return Err(Error::parse("config", format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are skipped; lists are comma or space separated, optionally
    /// bracketed.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| Error::parse("config", format!("line {}: expected `key = value`", no + 1)))?;
            self.set(key, value).map_err(|e| match e {
                Error::Parse { what, detail } => Error::parse(what, format!("line {}: {detail}", no + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders the config in the format [`Self::from_text`] reads.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let ks = self.k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        format!(
            "n = {}\nk = {ks}\nd = {}\neps_list = {}\nproxy_kind = {}\ntau_audit = {}\n\
             guess_fractions = {}\nt = {}\nposterior_prior = {}\ngamma = {}\ndelta = {}\nrepetitions = {}\n\
             base_seed = {}\nsweep = {}\nresample_all = {}\nlearning_rate = {}\n\
             iterations = {}\nl2 = {}\nmu_min = {}\nmu_max = {}\nmu_tolerance = {}\n",
            self.n,
            self.d,
            list(&self.eps_list),
            self.proxy_kind,
            self.tau_audit,
            list(&self.guess_fractions),
            self.t,
            self.posterior_prior,
            self.gamma,
            self.delta,
            self.repetitions,
            self.base_seed,
            self.sweep,
            self.resample_all,
            self.logistic.learning_rate,
            self.logistic.iterations,
            self.logistic.l2,
            self.family.mu_min,
            self.family.mu_max,
            self.family.tolerance,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.n > u32::MAX as usize {
            return bad(format!("n = {} exceeds the supported maximum {}", self.n, u32::MAX));
        }
        if self.k.is_empty() || self.k.iter().any(|&k| k < 2) {
            return bad(format!("k needs at least one value, each >= 2, got {:?}", self.k));
        }
        if self.d == 0 {
            return bad("d must be positive".into());
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return bad(format!("eps_list needs finite non-negative values, got {:?}", self.eps_list));
        }
        if let ProxyKind::Shifted { tau } = self.proxy_kind {
            if !(0.0..=1.0).contains(&tau) {
                return bad(format!("proxy shift {tau} outside [0, 1]"));
            }
            if self.k.iter().any(|&k| k != 2) {
                return bad("the shifted proxy is binary only; set k = 2".into());
            }
        }
        if !(0.0..=1.0).contains(&self.tau_audit) {
            return bad(format!("tau_audit {} outside [0, 1]", self.tau_audit));
        }
        if self.guess_fractions.is_empty() || self.guess_fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return bad(format!("guess_fractions need values in (0, 1], got {:?}", self.guess_fractions));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return bad(format!("t must be finite and non-negative, got {}", self.t));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma {} outside (0, 1)", self.gamma));
        }
        if !(self.delta >= 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} outside [0, 1)", self.delta));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        TradeoffFamily::gaussian(self.family.mu_min, self.family.mu_max, self.family.tolerance)?;
        if self.proxy_kind == ProxyKind::Logistic {
            let c = self.logistic;
            if !(c.learning_rate > 0.0 && c.learning_rate.is_finite()) || !(c.l2 >= 0.0 && c.l2.is_finite()) {
                return bad(format!("invalid logistic settings {c:?}"));
            }
        }
        Ok(())
    }

    fn dim(&self, k: usize) -> usize {
        self.d.max(k)
    }
}

/// One audited game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: usize,
    pub theoretical_eps: f64,
    pub proxy_kind: String,
    pub tau: f64,
    pub guess_fraction: f64,
    pub repetition: usize,
    pub c_prime: u64,
    pub c: u64,
    pub empirical_eps: f64,
    pub saturated: bool,
}

/// Statistics over repetitions for one `(k, ε, fraction)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub k: usize,
    pub theoretical_eps: f64,
    /// `None` for sweep runs, where every repetition picks its own fraction.
    pub guess_fraction: Option<f64>,
    pub mean_emp_eps: f64,
    /// Population standard deviation over repetitions.
    pub std_emp_eps: f64,
    pub per_repetition: Vec<f64>,
    /// Mean of `c / c'` over repetitions that made at least one guess.
    pub mean_accuracy: Option<f64>,
    pub saturated_repetitions: usize,
}

impl Summary {
    fn from_rows(rows: &[&ReportRow], guess_fraction: Option<f64>) -> Self {
        let values: Vec<f64> = rows.iter().map(|r| r.empirical_eps).collect();
        let (mean, std) = mean_std(&values);
        let accs: Vec<f64> = rows
            .iter()
            .filter(|r| r.c_prime > 0)
            .map(|r| r.c as f64 / r.c_prime as f64)
            .collect();
        Self {
            k: rows[0].k,
            theoretical_eps: rows[0].theoretical_eps,
            guess_fraction,
            mean_emp_eps: mean,
            std_emp_eps: std,
            per_repetition: values,
            mean_accuracy: (!accs.is_empty()).then(|| mean_std(&accs).0),
            saturated_repetitions: rows.iter().filter(|r| r.saturated).count(),
        }
    }

    /// Repetitions whose empirical ε is strictly above the theoretical one.
    pub fn exceedances(&self) -> usize {
        self.per_repetition.iter().filter(|&&e| e > self.theoretical_eps).count()
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub summaries: Vec<Summary>,
}

impl ExperimentReport {
    pub fn any_saturated(&self) -> bool {
        self.rows.iter().any(|r| r.saturated)
    }

    pub fn summary(&self, k: usize, eps: f64, fraction: Option<f64>) -> Option<&Summary> {
        self.summaries
            .iter()
            .find(|s| s.k == k && s.theoretical_eps == eps && s.guess_fraction == fraction)
    }
}

/// The per-`k` inputs shared by every repetition.
struct Setting {
    dataset: LabeledDataset,
    probs: Vec<f64>,
    proxy: ProxyModel,
}

fn build_proxy(cfg: &ExperimentConfig, k: usize) -> Result<ProxyModel> {
    match cfg.proxy_kind {
        ProxyKind::GroundTruth => Ok(ProxyModel::ground_truth(k)),
        ProxyKind::Shifted { tau } => ProxyModel::shifted(tau),
        ProxyKind::Logistic => {
            let fresh = sample_mixture(
                cfg.n,
                k,
                cfg.dim(k),
                &mut stream(cfg.base_seed, Purpose::ProxyTraining, &[k as u64]),
            )?;
            train_logistic(&fresh, &cfg.logistic)
        }
    }
}

fn setting(cfg: &ExperimentConfig, k: usize, proxy: ProxyModel, dataset_parts: &[u64]) -> Result<Setting> {
    let dataset = sample_mixture(
        cfg.n,
        k,
        cfg.dim(k),
        &mut stream(cfg.base_seed, Purpose::Dataset, dataset_parts),
    )?;
    let probs = proxy.predict_dataset(&dataset)?;
    Ok(Setting { dataset, probs, proxy })
}

/// Scores one game and audits it at every configured fraction (or the best).
fn audit_repetition(
    cfg: &ExperimentConfig,
    setting: &Setting,
    mech: &RandomizedResponse,
    noisy: &[usize],
    rep: usize,
) -> Result<Vec<ReportRow>> {
    let k = mech.k();
    let mut rng = stream(cfg.base_seed, Purpose::Game, &[k as u64, mech.eps().to_bits(), rep as u64]);
    let artifacts = draw_artifacts(&setting.probs, k, &mut rng);
    let shown = artifacts.challenge_labels(setting.dataset.labels());
    let scored = ScoredGame {
        scores: score_with_probs(noisy, &shown, &setting.probs, mech, cfg.t, cfg.posterior_prior),
        shown_labels: &shown,
        artifacts: &artifacts,
    };
    let row = |fraction: f64, outcome: AuditOutcome, eps: f64, saturated: bool| ReportRow {
        k,
        theoretical_eps: mech.eps(),
        proxy_kind: setting.proxy.to_string(),
        tau: cfg.tau_audit,
        guess_fraction: fraction,
        repetition: rep,
        c_prime: outcome.c_prime,
        c: outcome.c,
        empirical_eps: eps,
        saturated,
    };
    if cfg.sweep {
        let best = best_epsilon_over_guess_sweep(&scored, &cfg.guess_fractions, cfg.gamma, cfg.delta, cfg.tau_audit, &cfg.family)?;
        return Ok(vec![row(best.fraction, best.outcome, best.epsilon.epsilon, best.epsilon.saturated)]);
    }
    let outcomes = outcomes_for_fractions(&scored, &cfg.guess_fractions)?;
    cfg.guess_fractions
        .iter()
        .zip(outcomes)
        .map(|(&fraction, outcome)| {
            let e = empirical_epsilon(&outcome, cfg.gamma, cfg.delta, cfg.tau_audit, &cfg.family)?;
            Ok(row(fraction, outcome, e.epsilon, e.saturated))
        })
        .collect()
}

/// Evaluates `f` for every repetition, in repetition order.
#[cfg(feature = "parallel")]
fn map_repetitions<T, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..reps).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_repetitions<T, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    (0..reps).map(f).collect()
}

fn mechanism_noise(cfg: &ExperimentConfig, mech: &RandomizedResponse, labels: &[usize], extra: &[u64]) -> Result<Vec<usize>> {
    let mut parts = vec![mech.k() as u64, mech.eps().to_bits()];
    parts.extend_from_slice(extra);
    mech.apply(labels, &mut stream(cfg.base_seed, Purpose::Mechanism, &parts))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &k in &cfg.k {
        let proxy = build_proxy(cfg, k)?;
        let shared = if cfg.resample_all {
            None
        } else {
            Some(setting(cfg, k, proxy.clone(), &[k as u64])?)
        };
        for &eps in &cfg.eps_list {
            let mech = RandomizedResponse::new(eps, k)?;
            let per_rep: Vec<Vec<ReportRow>> = match &shared {
                Some(s) => {
                    let noisy = mechanism_noise(cfg, &mech, s.dataset.labels(), &[])?;
                    map_repetitions(cfg.repetitions, |rep| audit_repetition(cfg, s, &mech, &noisy, rep))?
                }
                None => map_repetitions(cfg.repetitions, |rep| {
                    let parts = [k as u64, eps.to_bits(), rep as u64];
                    let s = setting(cfg, k, proxy.clone(), &parts)?;
                    let noisy = mechanism_noise(cfg, &mech, s.dataset.labels(), &[rep as u64])?;
                    audit_repetition(cfg, &s, &mech, &noisy, rep)
                })?,
            };
            rows.extend(per_rep.into_iter().flatten());
        }
    }
    let summaries = summarize(cfg, &rows);
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        rows,
        summaries,
    })
}

fn summarize(cfg: &ExperimentConfig, rows: &[ReportRow]) -> Vec<Summary> {
    let fractions: Vec<Option<f64>> = if cfg.sweep {
        vec![None]
    } else {
        cfg.guess_fractions.iter().map(|&f| Some(f)).collect()
    };
    let mut out = Vec::new();
    for &k in &cfg.k {
        for &eps in &cfg.eps_list {
            for &fraction in &fractions {
                let group: Vec<&ReportRow> = rows
                    .iter()
                    .filter(|r| r.k == k && r.theoretical_eps == eps && fraction.is_none_or(|f| r.guess_fraction == f))
                    .collect();
                if !group.is_empty() {
                    out.push(Summary::from_rows(&group, fraction));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::parse("format", format!("expected csv or json, got {other:?}"))),
        }
    }
}

impl ReportFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

pub fn write_report_to<W: Write>(report: &ExperimentReport, mut w: W, format: ReportFormat) -> std::io::Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(w, "{CSV_HEADER}")?;
            for r in &report.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.k,
                    r.theoretical_eps,
                    r.proxy_kind,
                    r.tau,
                    r.guess_fraction,
                    r.repetition,
                    r.c_prime,
                    r.c,
                    r.empirical_eps,
                    r.saturated
                )?;
            }
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut w, report)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn write_report(report: &ExperimentReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_report_to(report, BufWriter::new(file), format).map_err(|e| Error::io(path, e))
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<ExperimentReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse("report", e.to_string()))
}
