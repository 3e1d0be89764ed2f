//! Proxy label distributions `D' | x` used to draw counterfactual labels.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_closed, Error, Result};
use crate::synthdata::{self, LabeledDataset};

const MODEL_MAGIC: &str = "# obsaudit logistic v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProxyModel {
    /// The mixture's exact posterior.
    GroundTruth { k: usize },
    /// Binary only: class 1 gets `min(Pr[y = 1 | x] + τ, 1)`.
    Shifted { tau: f64 },
    Logistic(LogisticModel),
}

/// Multinomial logistic regression on standardized features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    k: usize,
    d: usize,
    mean: Vec<f64>,
    scale: Vec<f64>,
    /// `k` rows of `d` feature weights followed by the bias.
    weights: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 500,
            l2: 1e-4,
        }
    }
}

impl fmt::Display for ProxyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GroundTruth { .. } => write!(f, "ground_truth"),
            Self::Shifted { tau } => write!(f, "shifted:{tau}"),
            Self::Logistic(_) => write!(f, "logistic"),
        }
    }
}

impl ProxyModel {
    pub fn ground_truth(k: usize) -> Self {
        Self::GroundTruth { k }
    }

    pub fn shifted(tau: f64) -> Result<Self> {
        check_closed("tau", tau, 0.0, 1.0, "[0, 1]")?;
        Ok(Self::Shifted { tau })
    }

    pub fn num_classes(&self) -> usize {
        match self {
            Self::GroundTruth { k } => *k,
            Self::Shifted { .. } => 2,
            Self::Logistic(m) => m.k,
        }
    }

    /// Writes the class probabilities for `x` into `out` (length `k`).
    pub fn predict_proba_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let k = self.num_classes();
        if out.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: out.len(),
            });
        }
        match self {
            Self::GroundTruth { .. } | Self::Shifted { .. } => {
                if x.len() < k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        got: x.len(),
                    });
                }
                synthdata::true_posterior_into(x, out);
                if let Self::Shifted { tau } = self {
                    let p1 = (out[1] + tau).min(1.0);
                    out[0] = 1.0 - p1;
                    out[1] = p1;
                }
            }
            Self::Logistic(m) => m.predict_into(x, out)?,
        }
        Ok(())
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.num_classes()];
        self.predict_proba_into(x, &mut out)?;
        Ok(out)
    }

    /// Probabilities for every row of `data`, row-major `n × k`.
    pub fn predict_dataset(&self, data: &LabeledDataset) -> Result<Vec<f64>> {
        let k = self.num_classes();
        if k != data.k() {
            return Err(Error::DimensionMismatch {
                expected: data.k(),
                got: k,
            });
        }
        let mut out = vec![0.0; data.len() * k];
        for (row, slot) in data.rows().zip(out.chunks_exact_mut(k)) {
            self.predict_proba_into(row, slot)?;
        }
        Ok(out)
    }
}

/// Inverse-CDF draw from a probability vector.
pub fn sample_class<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (c, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = c;
            if u < acc {
                return c;
            }
        }
    }
    last
}

/// Draws `y¹ ~ Multinoulli(predict_proba(model, x))`.
pub fn sample_counterfactual<R: Rng + ?Sized>(model: &ProxyModel, x: &[f64], rng: &mut R) -> Result<usize> {
    Ok(sample_class(&model.predict_proba(x)?, rng))
}

pub fn predict_proba(model: &ProxyModel, x: &[f64]) -> Result<Vec<f64>> {
    model.predict_proba(x)
}

impl LogisticModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn predict_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        let mut z = vec![0.0; self.d];
        for j in 0..self.d {
            z[j] = (x[j] - self.mean[j]) / self.scale[j];
        }
        logits_into(&self.weights, &z, out);
        softmax_in_place(out);
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        writeln!(w, "{MODEL_MAGIC}").map_err(io)?;
        writeln!(w, "k {} d {}", self.k, self.d).map_err(io)?;
        writeln!(w, "mean {}", join(&self.mean)).map_err(io)?;
        writeln!(w, "scale {}", join(&self.scale)).map_err(io)?;
        for row in self.weights.chunks_exact(self.d + 1) {
            writeln!(w, "w {}", join(row)).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let lines: Vec<String> = BufReader::new(File::open(path).map_err(io)?)
            .lines()
            .collect::<std::result::Result<_, _>>()
            .map_err(io)?;
        let bad = |detail: &str| Error::parse("logistic model", detail.to_string());
        if lines.first().map(|l| l.trim()) != Some(MODEL_MAGIC) {
            return Err(bad("missing '# obsaudit logistic v1' header"));
        }
        let shape: Vec<&str> = lines.get(1).ok_or_else(|| bad("missing shape"))?.split_whitespace().collect();
        let (k, d) = match shape[..] {
            ["k", k, "d", d] => (
                k.parse::<usize>().map_err(|e| bad(&e.to_string()))?,
                d.parse::<usize>().map_err(|e| bad(&e.to_string()))?,
            ),
            _ => return Err(bad("shape line must be 'k <k> d <d>'")),
        };
        let row = |idx: usize, tag: &str, len: usize| -> Result<Vec<f64>> {
            let line = lines.get(idx).ok_or_else(|| bad(&format!("missing '{tag}' line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(tag) {
                return Err(bad(&format!("line {} should start with '{tag}'", idx + 1)));
            }
            let vals: Vec<f64> = parts
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e: std::num::ParseFloatError| bad(&e.to_string()))?;
            if vals.len() != len || vals.iter().any(|v| !v.is_finite()) {
                return Err(bad(&format!("line {} needs {len} finite values", idx + 1)));
            }
            Ok(vals)
        };
        let mean = row(2, "mean", d)?;
        let scale = row(3, "scale", d)?;
        let mut weights = Vec::with_capacity(k * (d + 1));
        for c in 0..k {
            weights.extend(row(4 + c, "w", d + 1)?);
        }
        if k < 2 || scale.iter().any(|s| *s <= 0.0) {
            return Err(bad("need k >= 2 and positive scales"));
        }
        Ok(Self {
            k,
            d,
            mean,
            scale,
            weights,
        })
    }
}

fn logits_into(weights: &[f64], z: &[f64], out: &mut [f64]) {
    let d = z.len();
    for (o, w) in out.iter_mut().zip(weights.chunks_exact(d + 1)) {
        *o = w[d] + w[..d].iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
    }
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    v.iter_mut().for_each(|x| *x /= total);
}

/// Standardized design matrix and labels.
struct Design<'a> {
    z: Vec<f64>,
    y: &'a [usize],
    k: usize,
    d: usize,
}

impl Design<'_> {
    /// Mean cross-entropy plus `l2/2 ‖W‖²` (biases unpenalized) and its gradient.
    fn objective(&self, weights: &[f64], l2: f64) -> (f64, Vec<f64>) {
        let (k, d) = (self.k, self.d);
        let n = self.y.len() as f64;
        let mut grad = vec![0.0; weights.len()];
        let mut logits = vec![0.0; k];
        let mut loss = 0.0;
        for (z, &y) in self.z.chunks_exact(d).zip(self.y) {
            logits_into(weights, z, &mut logits);
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
            loss += lse - logits[y];
            for c in 0..k {
                let resid = (logits[c] - lse).exp() - (c == y) as u8 as f64;
                let g = &mut grad[c * (d + 1)..(c + 1) * (d + 1)];
                for j in 0..d {
                    g[j] += resid * z[j];
                }
                g[d] += resid;
            }
        }
        loss /= n;
        grad.iter_mut().for_each(|g| *g /= n);
        for c in 0..k {
            for j in 0..d {
                let idx = c * (d + 1) + j;
                loss += 0.5 * l2 * weights[idx] * weights[idx];
                grad[idx] += l2 * weights[idx];
            }
        }
        (loss, grad)
    }
}

fn standardize(data: &LabeledDataset) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (n, d) = (data.len() as f64, data.d());
    let mut mean = vec![0.0; d];
    for row in data.rows() {
        for j in 0..d {
            mean[j] += row[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut scale = vec![0.0; d];
    for row in data.rows() {
        for j in 0..d {
            scale[j] += (row[j] - mean[j]).powi(2);
        }
    }
    for s in scale.iter_mut() {
        *s = (*s / n).sqrt();
        if !(*s > 0.0) {
            *s = 1.0;
        }
    }
    let z = data
        .rows()
        .flat_map(|row| (0..d).map(|j| (row[j] - mean[j]) / scale[j]).collect::<Vec<_>>())
        .collect();
    (mean, scale, z)
}

/// Full-batch gradient descent with step halving whenever a step would raise
/// the loss. Returns the model and the accepted loss after every iteration.
pub fn fit_logistic(data: &LabeledDataset, config: &LogisticConfig) -> Result<(LogisticModel, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be positive and finite, got {}",
            config.learning_rate
        )));
    }
    check_closed("l2", config.l2, 0.0, f64::MAX, "[0, inf)")?;

    let (k, d) = (data.k(), data.d());
    let (mean, scale, z) = standardize(data);
    let design = Design {
        z,
        y: data.labels(),
        k,
        d,
    };
    let mut weights = vec![0.0; k * (d + 1)];
    let (mut loss, mut grad) = design.objective(&weights, config.l2);
    let mut history = vec![loss];
    let mut lr = config.learning_rate;

    'outer: for iteration in 0..config.iterations {
        loop {
            let trial: Vec<f64> = weights.iter().zip(&grad).map(|(w, g)| w - lr * g).collect();
            let (trial_loss, trial_grad) = design.objective(&trial, config.l2);
            if !trial_loss.is_finite() {
                return Err(Error::TrainingDiverged {
                    iteration,
                    loss: trial_loss,
                });
            }
            if trial_loss <= loss {
                weights = trial;
                loss = trial_loss;
                grad = trial_grad;
                break;
            }
            lr *= 0.5;
            if lr < 1e-12 {
                // No descent step left at machine precision.
                break 'outer;
            }
        }
        history.push(loss);
    }

    Ok((
        LogisticModel {
            k,
            d,
            mean,
            scale,
            weights,
        },
        history,
    ))
}

/// Largest absolute gap between the analytic training-loss gradient at
/// `weights` and its central finite-difference estimate.
pub fn gradient_check(data: &LabeledDataset, weights: &[f64], l2: f64) -> Result<f64> {
    let (k, d) = (data.k(), data.d());
    if weights.len() != k * (d + 1) {
        return Err(Error::DimensionMismatch {
            expected: k * (d + 1),
            got: weights.len(),
        });
    }
    let (_, _, z) = standardize(data);
    let design = Design {
        z,
        y: data.labels(),
        k,
        d,
    };
    let (_, grad) = design.objective(weights, l2);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut probe = weights.to_vec();
    for i in 0..weights.len() {
        probe[i] = weights[i] + h;
        let plus = design.objective(&probe, l2).0;
        probe[i] = weights[i] - h;
        let minus = design.objective(&probe, l2).0;
        probe[i] = weights[i];
        worst = worst.max(((plus - minus) / (2.0 * h) - grad[i]).abs());
    }
    Ok(worst)
}

pub fn train_logistic(data: &LabeledDataset, config: &LogisticConfig) -> Result<ProxyModel> {
    fit_logistic(data, config).map(|(m, _)| ProxyModel::Logistic(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthdata::{sample_mixture, true_posterior};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn predict_examples() {
        let gt = ProxyModel::ground_truth(5);
        for p in gt.predict_proba(&[0.0; 5]).unwrap() {
            assert!((p - 0.2).abs() < 1e-15);
        }
        let sh = ProxyModel::shifted(0.05).unwrap();
        let p = sh.predict_proba(&[0.7, 0.7, 0.0]).unwrap();
        assert!((p[0] - 0.45).abs() < 1e-12 && (p[1] - 0.55).abs() < 1e-12);

        let flat = ProxyModel::Logistic(LogisticModel {
            k: 3,
            d: 4,
            mean: vec![0.0; 4],
            scale: vec![1.0; 4],
            weights: vec![0.0; 15],
        });
        for p in flat.predict_proba(&[1.0, -2.0, 3.0, 0.5]).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(matches!(
            flat.predict_proba(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 4, got: 2 })
        ));
        assert!(gt.predict_proba(&[1.0, 2.0]).is_err());
        assert!(ProxyModel::shifted(2.0).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = sample_mixture(50, 3, 4, &mut rng(21)).unwrap();
        let mut r = rng(22);
        let weights: Vec<f64> = (0..15).map(|_| r.random_range(-1.5..1.5)).collect();
        let err = gradient_check(&data, &weights, 0.03).unwrap();
        assert!(err < 1e-6, "max deviation {err}");
        assert!(gradient_check(&data, &weights[..3], 0.03).is_err());
    }

    #[test]
    fn separable_data_is_fit_perfectly() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut r = rng(4);
        for i in 0..100 {
            let class = i % 2;
            for j in 0..3 {
                let base = if j == class { 10.0 } else { 0.0 };
                x.push(base + r.random_range(-0.5..0.5));
            }
            y.push(class);
        }
        let data = LabeledDataset::new(x, y, 2, 3).unwrap();
        let model = train_logistic(&data, &LogisticConfig::default()).unwrap();
        let correct = data
            .rows()
            .zip(data.labels())
            .filter(|(row, &label)| {
                let p = model.predict_proba(row).unwrap();
                (p[1] > p[0]) == (label == 1)
            })
            .count();
        assert_eq!(correct, 100);
    }

    #[test]
    fn symmetric_data_gives_uniform_predictions() {
        let n = 40;
        let data = LabeledDataset::new(vec![0.0; n * 2], (0..n).map(|i| i % 2).collect(), 2, 2).unwrap();
        let (model, _) = fit_logistic(&data, &LogisticConfig::default()).unwrap();
        assert!(model.weights().iter().all(|w| w.abs() < 1e-9));
        let p = ProxyModel::Logistic(model).predict_proba(&[3.0, -1.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn loss_never_increases() {
        let data = sample_mixture(2_000, 5, 5, &mut rng(9)).unwrap();
        let config = LogisticConfig {
            learning_rate: 5.0,
            iterations: 200,
            l2: 1e-3,
        };
        let (_, history) = fit_logistic(&data, &config).unwrap();
        assert!(history.windows(2).all(|w| w[1] <= w[0]));
        assert!(history.last().unwrap() < &history[0]);
    }

    #[test]
    #[allow(clippy::field_reassign_with_default)]
    fn bad_configs_are_rejected() {
        let data = sample_mixture(10, 2, 2, &mut rng(1)).unwrap();
        let empty = LabeledDataset::new(vec![], vec![], 2, 2).unwrap();
        assert!(train_logistic(&empty, &LogisticConfig::default()).is_err());
        let mut cfg = LogisticConfig::default();
        cfg.learning_rate = f64::NAN;
        assert!(train_logistic(&data, &cfg).is_err());
        cfg.learning_rate = 0.1;
        cfg.l2 = -1.0;
        assert!(train_logistic(&data, &cfg).is_err());
    }

    #[test]
    fn overflowing_step_is_reported_as_divergence() {
        let data = sample_mixture(20, 2, 2, &mut rng(2)).unwrap();
        let cfg = LogisticConfig {
            learning_rate: f64::MAX,
            iterations: 5,
            l2: 1.0,
        };
        assert!(matches!(
            train_logistic(&data, &cfg),
            Err(Error::TrainingDiverged { .. })
        ));
    }

    #[test]
    fn logistic_approximates_true_posterior() {
        let train = sample_mixture(100_000, 2, 5, &mut rng(31)).unwrap();
        let model = train_logistic(&train, &LogisticConfig::default()).unwrap();
        let fresh = sample_mixture(10_000, 2, 5, &mut rng(32)).unwrap();
        let mut tv = 0.0;
        for row in fresh.rows() {
            let p = model.predict_proba(row).unwrap();
            let q = true_posterior(row, 2);
            tv += 0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
        }
        let mean_tv = tv / fresh.len() as f64;
        assert!(mean_tv < 0.02, "mean TV {mean_tv}");
    }

    #[test]
    fn sampling_follows_probabilities() {
        assert!((0..100).all(|_| sample_class(&[0.0, 1.0, 0.0], &mut rng(5)) == 1));
        let n = 1_000_000;
        let k = 4;
        let mut r = rng(6);
        let mut counts = vec![0usize; k];
        let probs = vec![0.25; k];
        for _ in 0..n {
            counts[sample_class(&probs, &mut r)] += 1;
        }
        let sigma = (0.25 * 0.75 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 4.0 * sigma);
        }
        let model = ProxyModel::ground_truth(3);
        let x = [0.1, 0.5, -0.2];
        let a: Vec<usize> = {
            let mut r = rng(7);
            (0..20).map(|_| sample_counterfactual(&model, &x, &mut r).unwrap()).collect()
        };
        let b: Vec<usize> = {
            let mut r = rng(7);
            (0..20).map(|_| sample_counterfactual(&model, &x, &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn model_file_round_trip() {
        let data = sample_mixture(500, 3, 4, &mut rng(12)).unwrap();
        let (model, _) = fit_logistic(&data, &LogisticConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("proxy.txt");
        model.save(&path).unwrap();
        assert_eq!(LogisticModel::load(&path).unwrap(), model);
        std::fs::write(&path, "# obsaudit logistic v1\nk 2 d 1\nmean 0\n").unwrap();
        assert!(matches!(LogisticModel::load(&path), Err(Error::Parse { .. })));
    }
}
