//! Synthetic Gaussian-mixture label data.
//!
//! Labels are uniform over `k` classes and features are `x | y ~ N(e_y, I_d)`
//! with `e_y` the `y`-th standard basis vector. Because every class mean has
//! unit norm and the covariance is shared, the exact posterior is
//! `softmax(x[0..k])`.
//!
//! Datasets can be written to and read from a small CSV file:
//!
//! ```text
//! # obsaudit dataset v1
//! n,k,d
//! 3,2,5
//! x0,x1,x2,x3,x4,label
//! 0.25,1.5,-0.3,0.1,0.7,1
//! ...
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_closed, Error, Result};

pub const DEFAULT_DIM: usize = 5;
const FILE_MAGIC: &str = "# obsaudit dataset v1";

/// Row-major features plus the real labels `y⁰`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    x: Vec<f64>,
    y0: Vec<usize>,
    k: usize,
    d: usize,
}

impl LabeledDataset {
    pub fn new(x: Vec<f64>, y0: Vec<usize>, k: usize, d: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("need k >= 2, got {k}")));
        }
        if d < k {
            return Err(Error::InvalidArgument(format!(
                "feature dimension {d} is smaller than the number of classes {k}"
            )));
        }
        if x.len() != y0.len() * d {
            return Err(Error::DimensionMismatch {
                expected: y0.len() * d,
                got: x.len(),
            });
        }
        if let Some(&label) = y0.iter().find(|&&y| y >= k) {
            return Err(Error::LabelOutOfRange { label, k });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("features must be finite".into()));
        }
        Ok(Self { x, y0, k, d })
    }

    pub fn len(&self) -> usize {
        self.y0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y0.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> &[usize] {
        &self.y0
    }

    pub fn features(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.x.chunks_exact(self.d)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(w, "{FILE_MAGIC}").map_err(io)?;
        writeln!(w, "n,k,d").map_err(io)?;
        writeln!(w, "{},{},{}", self.len(), self.k, self.d).map_err(io)?;
        let header: Vec<String> = (0..self.d).map(|j| format!("x{j}")).collect();
        writeln!(w, "{},label", header.join(",")).map_err(io)?;
        for (row, y) in self.rows().zip(&self.y0) {
            for v in row {
                write!(w, "{v},").map_err(io)?;
            }
            writeln!(w, "{y}").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut lines = BufReader::new(File::open(path).map_err(io)?).lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::parse("dataset", format!("missing {what}")))?
                .map_err(io)
        };
        if next("magic line")?.trim() != FILE_MAGIC {
            return Err(Error::parse("dataset", "missing '# obsaudit dataset v1' header"));
        }
        next("shape header")?;
        let shape: Vec<usize> = next("shape")?
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse("dataset", format!("shape line: {e}")))?;
        let [n, k, d] = shape[..] else {
            return Err(Error::parse("dataset", "shape line must be n,k,d"));
        };
        next("column header")?;
        let mut x = Vec::with_capacity(n * d);
        let mut y0 = Vec::with_capacity(n);
        for i in 0..n {
            let line = next("data row")?;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(Error::parse(
                    "dataset",
                    format!("row {i} has {} fields, expected {}", fields.len(), d + 1),
                ));
            }
            for f in &fields[..d] {
                x.push(
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::parse("dataset", format!("row {i}: {e}")))?,
                );
            }
            y0.push(
                fields[d]
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::parse("dataset", format!("row {i} label: {e}")))?,
            );
        }
        Self::new(x, y0, k, d)
    }
}

pub fn sample_mixture<R: Rng + ?Sized>(n: usize, k: usize, d: usize, rng: &mut R) -> Result<LabeledDataset> {
    if k < 2 || d < k {
        return Err(Error::InvalidArgument(format!(
            "mixture needs 2 <= k <= d, got k = {k}, d = {d}"
        )));
    }
    let mut x = Vec::with_capacity(n * d);
    let mut y0 = Vec::with_capacity(n);
    for _ in 0..n {
        let y = rng.random_range(0..k);
        y0.push(y);
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            x.push(if j == y { 1.0 + z } else { z });
        }
    }
    LabeledDataset::new(x, y0, k, d)
}

/// Writes `softmax(x[0..k])` into `out`.
pub fn true_posterior_into(x: &[f64], out: &mut [f64]) {
    let logits = &x[..out.len()];
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// Exact class posterior of the mixture. Panics if `x.len() < k`.
pub fn true_posterior(x: &[f64], k: usize) -> Vec<f64> {
    assert!(x.len() >= k, "feature vector shorter than the number of classes");
    let mut out = vec![0.0; k];
    true_posterior_into(x, &mut out);
    out
}

/// `min(Pr[y = 1 | x] + τ, 1)` for the binary mixture.
pub fn shifted_posterior(x: &[f64], k: usize, tau: f64) -> Result<f64> {
    if k != 2 {
        return Err(Error::Unsupported(format!(
            "the shifted posterior is defined for binary labels only, got k = {k}"
        )));
    }
    check_closed("tau", tau, 0.0, 1.0, "[0, 1]")?;
    if x.len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.len(),
        });
    }
    Ok((true_posterior(x, 2)[1] + tau).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn rejects_too_few_dimensions() {
        assert!(sample_mixture(10, 5, 4, &mut rng(0)).is_err());
        assert!(sample_mixture(10, 1, 4, &mut rng(0)).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_mixture(1, 2, 5, &mut rng(99)).unwrap();
        let b = sample_mixture(1, 2, 5, &mut rng(99)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.row(0).len(), 5);
    }

    #[test]
    fn mixture_moments() {
        let n = 1_000_000;
        let d = 5;
        let data = sample_mixture(n, 2, d, &mut rng(3)).unwrap();
        let ones = data.labels().iter().filter(|&&y| y == 1).count() as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((ones / n as f64 - 0.5).abs() < 4.0 * sigma);

        for class in 0..2 {
            let rows: Vec<&[f64]> = data
                .rows()
                .zip(data.labels())
                .filter(|(_, &y)| y == class)
                .map(|(r, _)| r)
                .collect();
            let m = rows.len() as f64;
            let mut mean = vec![0.0; d];
            for r in &rows {
                for (acc, v) in mean.iter_mut().zip(r.iter()) {
                    *acc += v / m;
                }
            }
            for (j, &got) in mean.iter().enumerate() {
                let want = if j == class { 1.0 } else { 0.0 };
                assert!((got - want).abs() < 4.0 / m.sqrt(), "class {class} dim {j}: {got}");
            }
            let mut frob = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let cov: f64 = rows.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>() / (m - 1.0);
                    let want = if a == b { 1.0 } else { 0.0 };
                    frob += (cov - want).powi(2);
                }
            }
            assert!(frob.sqrt() < 0.02, "class {class} covariance deviation {}", frob.sqrt());
        }
    }

    #[test]
    fn posterior_examples() {
        for p in true_posterior(&[0.0; 5], 5) {
            assert!((p - 0.2).abs() < 1e-15);
        }
        let p = true_posterior(&[0.3, 0.3, 9.0], 2);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = true_posterior(&[1.0, 0.0, 0.0], 2);
        let e = std::f64::consts::E;
        assert!((p[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((p[1] - 1.0 / (e + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn posterior_is_normalized_and_equivariant() {
        let mut r = rng(5);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..6).map(|_| r.random_range(-30.0..30.0)).collect();
            let p = true_posterior(&x, 6);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mut rev = x.clone();
            rev.reverse();
            let q = true_posterior(&rev, 6);
            for i in 0..6 {
                assert!((p[i] - q[5 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn posterior_is_calibrated() {
        let n = 1_000_000;
        let data = sample_mixture(n, 2, 5, &mut rng(17)).unwrap();
        let bins = 10;
        let mut count = vec![0f64; bins];
        let mut hits = vec![0f64; bins];
        let mut mass = vec![0f64; bins];
        for (row, &y) in data.rows().zip(data.labels()) {
            let p1 = true_posterior(row, 2)[1];
            let b = ((p1 * bins as f64) as usize).min(bins - 1);
            count[b] += 1.0;
            mass[b] += p1;
            hits[b] += (y == 1) as u8 as f64;
        }
        for b in 0..bins {
            let mean_p = mass[b] / count[b];
            let freq = hits[b] / count[b];
            let sigma = (mean_p * (1.0 - mean_p) / count[b]).sqrt();
            assert!((freq - mean_p).abs() <= 3.0 * sigma, "bin {b}: freq {freq} vs {mean_p}");
        }
    }

    #[test]
    fn shifted_posterior_examples() {
        let x = [0.4, -0.2, 1.0];
        assert_eq!(shifted_posterior(&x, 2, 0.0).unwrap(), true_posterior(&x, 2)[1]);
        // logit gap ln(19) gives Pr[y = 1] = 0.95.
        let x = [0.0, 19f64.ln()];
        assert_eq!(shifted_posterior(&x, 2, 0.1).unwrap(), 1.0);
        assert!(matches!(shifted_posterior(&[0.0; 5], 5, 0.1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn shift_stays_within_tv_budget() {
        let mut r = rng(8);
        for _ in 0..10_000 {
            let x = [r.random_range(-6.0..6.0), r.random_range(-6.0..6.0)];
            let tau = r.random_range(0.0..0.3);
            let gap = shifted_posterior(&x, 2, tau).unwrap() - true_posterior(&x, 2)[1];
            assert!((0.0..=tau + 1e-15).contains(&gap));
        }
    }

    #[test]
    fn csv_round_trip() {
        let data = sample_mixture(50, 3, 4, &mut rng(1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        data.write_csv(&path).unwrap();
        assert_eq!(LabeledDataset::read_csv(&path).unwrap(), data);

        std::fs::write(&path, "not a dataset\n").unwrap();
        assert!(matches!(LabeledDataset::read_csv(&path), Err(Error::Parse { .. })));
        assert!(matches!(
            LabeledDataset::read_csv(dir.path().join("missing.csv")),
            Err(Error::Io { .. })
        ));
    }
}
