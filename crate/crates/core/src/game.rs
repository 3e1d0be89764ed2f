//! The observational one-run attribute-inference game.
//!
//! The mechanism runs once on the real labels `y⁰`. Only afterwards does the
//! challenger draw, for every sample, a hidden bit `bᵢ` and a counterfactual
//! label `y¹ᵢ ~ D' | xᵢ`, and show the adversary `y^{bᵢ}`. The adversary
//! scores every sample, guesses on the most confident fraction and abstains
//! on the rest; the tally `(m, c', c)` feeds the audit.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::audit::AuditOutcome;
use crate::error::{Error, Result};
use crate::mechanism::{LabelMechanism, RandomizedResponse};
use crate::proxy::{sample_class, ProxyModel};
use crate::synthdata::LabeledDataset;

/// Default exponent on the `s₂` score component.
pub const DEFAULT_SCORE_EXPONENT: f64 = 2.0;

/// Hidden bits and counterfactual labels, one per canary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameArtifacts {
    /// `true` means the adversary is shown the counterfactual label.
    pub bits: Vec<bool>,
    pub y1: Vec<usize>,
}

impl GameArtifacts {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `y^{bᵢ}` for every sample.
    pub fn challenge_labels(&self, y0: &[usize]) -> Vec<usize> {
        y0.iter()
            .zip(&self.bits)
            .zip(&self.y1)
            .map(|((&real, &b), &cf)| if b { cf } else { real })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTranscript {
    pub noisy_labels: Vec<usize>,
    pub artifacts: GameArtifacts,
    pub shown_labels: Vec<usize>,
}

/// Per-sample adversary scores together with what they were computed on.
#[derive(Clone, Debug)]
pub struct ScoredGame<'a> {
    pub scores: Vec<f64>,
    pub shown_labels: &'a [usize],
    pub artifacts: &'a GameArtifacts,
}

impl ScoredGame<'_> {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Guess {
    /// The shown label is the real training label.
    Real,
    /// The shown label is the counterfactual one.
    Counterfactual,
    Abstain,
}

impl Guess {
    fn matches(self, bit: bool) -> bool {
        match self {
            Guess::Real => !bit,
            Guess::Counterfactual => bit,
            Guess::Abstain => false,
        }
    }

    fn from_score(score: f64) -> Self {
        if score > 0.0 {
            Guess::Real
        } else {
            Guess::Counterfactual
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessVector {
    guesses: Vec<Guess>,
}

impl GuessVector {
    pub fn guesses(&self) -> &[Guess] {
        &self.guesses
    }

    pub fn num_guesses(&self) -> usize {
        self.guesses.iter().filter(|g| **g != Guess::Abstain).count()
    }

    pub fn len(&self) -> usize {
        self.guesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guesses.is_empty()
    }
}

impl From<Vec<Guess>> for GuessVector {
    fn from(guesses: Vec<Guess>) -> Self {
        Self { guesses }
    }
}

/// Draws `(bᵢ, y¹ᵢ) ~ Bernoulli(1/2) × Multinoulli(probsᵢ)` for every row of
/// the row-major `m × k` probability table.
pub fn draw_artifacts<R: Rng + ?Sized>(proxy_probs: &[f64], k: usize, rng: &mut R) -> GameArtifacts {
    let m = proxy_probs.len() / k;
    let mut bits = Vec::with_capacity(m);
    let mut y1 = Vec::with_capacity(m);
    for probs in proxy_probs.chunks_exact(k) {
        bits.push(rng.random::<bool>());
        y1.push(sample_class(probs, rng));
    }
    GameArtifacts { bits, y1 }
}

/// Runs the mechanism on the real labels, then draws the game artifacts.
///
/// Every sample is a canary. The mechanism call happens before any
/// counterfactual is sampled and sees only `dataset.labels()`.
pub fn play_game<M, R>(dataset: &LabeledDataset, mech: &M, proxy: &ProxyModel, rng: &mut R) -> Result<GameTranscript>
where
    M: LabelMechanism,
    R: Rng + ?Sized,
{
    let noisy_labels = mech.apply(dataset.labels(), rng)?;
    let probs = proxy.predict_dataset(dataset)?;
    let artifacts = draw_artifacts(&probs, dataset.k(), rng);
    let shown_labels = artifacts.challenge_labels(dataset.labels());
    Ok(GameTranscript {
        noisy_labels,
        artifacts,
        shown_labels,
    })
}

/// Prior used when reading `Pr[y⁰ = y^b | noisy label]` off the mechanism.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosteriorPrior {
    /// Uniform over classes: the normalized likelihood `K(z | ·)`, i.e. the
    /// mechanism's output read as a probability vector over labels.
    #[default]
    Uniform,
    /// Bayes posterior with the proxy probabilities as prior.
    Proxy,
}

impl fmt::Display for PosteriorPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Proxy => "proxy",
        })
    }
}

impl FromStr for PosteriorPrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(Self::Uniform),
            "proxy" => Ok(Self::Proxy),
            other => Err(Error::parse("posterior_prior", format!("expected uniform or proxy, got {other:?}"))),
        }
    }
}

/// `s = s₁ · s₂ᵗ` with
/// `s₁ = Pr[y⁰ = y^b | noisy] - Pr_{D'}[y^b]` and `s₂ = 1 - Pr_{D'}[y^b]`.
pub fn score_with_probs(
    noisy_labels: &[usize],
    shown_labels: &[usize],
    proxy_probs: &[f64],
    mech: &RandomizedResponse,
    t: f64,
    prior: PosteriorPrior,
) -> Vec<f64> {
    let k = mech.k();
    noisy_labels
        .iter()
        .zip(shown_labels)
        .zip(proxy_probs.chunks_exact(k))
        .map(|((&z, &shown), probs)| {
            let q = probs[shown];
            let post = match prior {
                // The kernel's column sums are 1, so the uniform-prior
                // posterior is the kernel entry itself.
                PosteriorPrior::Uniform => mech.kernel(z, shown),
                PosteriorPrior::Proxy => mech.posterior_of(z, shown, q, probs[z]),
            };
            (post - q) * (1.0 - q).powf(t)
        })
        .collect()
}

/// Scores with the default [`PosteriorPrior`].
pub fn score_samples<'a>(
    transcript: &'a GameTranscript,
    dataset: &LabeledDataset,
    mech: &RandomizedResponse,
    proxy: &ProxyModel,
    t: f64,
) -> Result<ScoredGame<'a>> {
    score_samples_with(transcript, dataset, mech, proxy, t, PosteriorPrior::default())
}

pub fn score_samples_with<'a>(
    transcript: &'a GameTranscript,
    dataset: &LabeledDataset,
    mech: &RandomizedResponse,
    proxy: &ProxyModel,
    t: f64,
    prior: PosteriorPrior,
) -> Result<ScoredGame<'a>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    if mech.k() != dataset.k() {
        return Err(Error::DimensionMismatch {
            expected: dataset.k(),
            got: mech.k(),
        });
    }
    let probs = proxy.predict_dataset(dataset)?;
    let scores = score_with_probs(&transcript.noisy_labels, &transcript.shown_labels, &probs, mech, t, prior);
    Ok(ScoredGame {
        scores,
        shown_labels: &transcript.shown_labels,
        artifacts: &transcript.artifacts,
    })
}

/// `round(fraction · m)`, rounding halves up.
pub fn guess_count(fraction: f64, m: usize) -> usize {
    ((fraction * m as f64 + 0.5).floor() as usize).min(m)
}

fn check_fraction(fraction: f64) -> Result<f64> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(fraction)
    } else {
        Err(Error::OutOfRange {
            name: "fraction",
            value: fraction,
            range: "(0, 1]",
        })
    }
}

/// Indices of the `count` largest `|score|`, ties broken by ascending index,
/// in rank order.
fn top_ranked(scores: &[f64], count: usize) -> Vec<u32> {
    let cmp = |a: &u32, b: &u32| {
        scores[*b as usize]
            .abs()
            .total_cmp(&scores[*a as usize].abs())
            .then(a.cmp(b))
    };
    let mut order: Vec<u32> = (0..scores.len() as u32).collect();
    if count == 0 {
        return Vec::new();
    }
    if count < order.len() {
        order.select_nth_unstable_by(count - 1, cmp);
        order.truncate(count);
    }
    order.sort_unstable_by(cmp);
    order
}

pub fn make_guesses(scored: &ScoredGame<'_>, fraction: f64) -> Result<GuessVector> {
    check_fraction(fraction)?;
    let count = guess_count(fraction, scored.len());
    let mut guesses = vec![Guess::Abstain; scored.len()];
    for i in top_ranked(&scored.scores, count) {
        guesses[i as usize] = Guess::from_score(scored.scores[i as usize]);
    }
    Ok(guesses.into())
}

pub fn tally(guesses: &GuessVector, artifacts: &GameArtifacts) -> Result<AuditOutcome> {
    if guesses.len() != artifacts.len() {
        return Err(Error::DimensionMismatch {
            expected: artifacts.len(),
            got: guesses.len(),
        });
    }
    let c_prime = guesses.num_guesses() as u64;
    let c = guesses
        .guesses()
        .iter()
        .zip(&artifacts.bits)
        .filter(|(g, &b)| g.matches(b))
        .count() as u64;
    AuditOutcome::new(guesses.len() as u64, c_prime, c)
}

/// The tallies `make_guesses` + `tally` would give for each fraction, from a
/// single ranking of the scores.
pub fn outcomes_for_fractions(scored: &ScoredGame<'_>, fractions: &[f64]) -> Result<Vec<AuditOutcome>> {
    let m = scored.len();
    if scored.artifacts.len() != m {
        return Err(Error::DimensionMismatch {
            expected: scored.artifacts.len(),
            got: m,
        });
    }
    let counts = fractions
        .iter()
        .map(|&f| check_fraction(f).map(|f| guess_count(f, m)))
        .collect::<Result<Vec<_>>>()?;
    let max = counts.iter().copied().max().unwrap_or(0);
    let ranked = top_ranked(&scored.scores, max);
    let mut correct_prefix = Vec::with_capacity(max + 1);
    correct_prefix.push(0u64);
    for &i in &ranked {
        let i = i as usize;
        let hit = Guess::from_score(scored.scores[i]).matches(scored.artifacts.bits[i]);
        correct_prefix.push(correct_prefix.last().unwrap() + hit as u64);
    }
    counts
        .into_iter()
        .map(|cp| AuditOutcome::new(m as u64, cp as u64, correct_prefix[cp]))
        .collect()
}

/// Per-sample transcript as CSV: `i,b,y0,y1,noisy,shown,score,guess`, where
/// guess is `0`, `1` or `-` for an abstention.
pub fn write_transcript(
    path: impl AsRef<Path>,
    dataset: &LabeledDataset,
    transcript: &GameTranscript,
    scored: &ScoredGame<'_>,
    guesses: &GuessVector,
) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "i,b,y0,y1,noisy,shown,score,guess").map_err(io)?;
    for i in 0..dataset.len() {
        let guess = match guesses.guesses()[i] {
            Guess::Real => "0",
            Guess::Counterfactual => "1",
            Guess::Abstain => "-",
        };
        writeln!(
            w,
            "{i},{},{},{},{},{},{},{guess}",
            transcript.artifacts.bits[i] as u8,
            dataset.labels()[i],
            transcript.artifacts.y1[i],
            transcript.noisy_labels[i],
            transcript.shown_labels[i],
            scored.scores[i],
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
