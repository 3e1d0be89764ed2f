//! Label mechanisms under audit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_closed, Error, Result};

/// A mechanism that releases a noisy version of each training label.
///
/// The game only ever runs the mechanism on the real labels; the adversary
/// additionally needs the posterior over the real label given one released
/// label, which is what [`LabelMechanism::posterior`] supplies.
pub trait LabelMechanism {
    fn num_classes(&self) -> usize;

    fn apply<R: Rng + ?Sized>(&self, labels: &[usize], rng: &mut R) -> Result<Vec<usize>>;

    /// Bayes posterior over the input label after observing `released`,
    /// starting from `prior`.
    fn posterior(&self, released: usize, prior: &[f64]) -> Result<Vec<f64>>;
}

/// k-ary randomized response: keep the label with probability
/// `e^ε / (e^ε + k - 1)`, otherwise replace it with a uniformly chosen other
/// class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomizedResponse {
    eps: f64,
    k: usize,
}

impl RandomizedResponse {
    pub fn new(eps: f64, k: usize) -> Result<Self> {
        check_closed("eps", eps, 0.0, f64::INFINITY, "[0, inf]")?;
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "randomized response needs at least 2 classes, got {k}"
            )));
        }
        Ok(Self { eps, k })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn k(&self) -> usize {
        self.k
    }

    // Both probabilities are written in terms of e^-ε so that ε = ∞ is exact.
    pub fn keep_prob(&self) -> f64 {
        1.0 / (1.0 + (self.k - 1) as f64 * (-self.eps).exp())
    }

    /// Probability of reporting one particular other class.
    pub fn flip_prob(&self) -> f64 {
        let e = (-self.eps).exp();
        e / (1.0 + (self.k - 1) as f64 * e)
    }

    /// `K(released | input)`.
    pub fn kernel(&self, released: usize, input: usize) -> f64 {
        if released == input {
            self.keep_prob()
        } else {
            self.flip_prob()
        }
    }

    /// Largest log-likelihood ratio `log K(z|y) / K(z|y')` over all
    /// `z, y, y'`; equals ε for every k.
    pub fn max_log_ratio(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for z in 0..self.k {
            for y in 0..self.k {
                for y2 in 0..self.k {
                    worst = worst.max(self.kernel(z, y).ln() - self.kernel(z, y2).ln());
                }
            }
        }
        worst
    }

    /// Posterior probability that the input was `candidate`, given `released`
    /// and the prior mass `prior_candidate` / `prior_released` on `candidate`
    /// and `released`. Allocation-free form of [`LabelMechanism::posterior`].
    #[inline]
    pub fn posterior_of(
        &self,
        released: usize,
        candidate: usize,
        prior_candidate: f64,
        prior_released: f64,
    ) -> f64 {
        let keep = self.keep_prob();
        let flip = self.flip_prob();
        let evidence = prior_released * keep + (1.0 - prior_released) * flip;
        if evidence <= 0.0 {
            return 0.0;
        }
        prior_candidate * self.kernel(released, candidate) / evidence
    }
}

impl LabelMechanism for RandomizedResponse {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn apply<R: Rng + ?Sized>(&self, labels: &[usize], rng: &mut R) -> Result<Vec<usize>> {
        let keep = self.keep_prob();
        labels
            .iter()
            .map(|&y| {
                if y >= self.k {
                    return Err(Error::LabelOutOfRange { label: y, k: self.k });
                }
                if rng.random::<f64>() < keep {
                    Ok(y)
                } else {
                    let other = rng.random_range(0..self.k - 1);
                    Ok(if other >= y { other + 1 } else { other })
                }
            })
            .collect()
    }

    fn posterior(&self, released: usize, prior: &[f64]) -> Result<Vec<f64>> {
        if prior.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: prior.len(),
            });
        }
        if released >= self.k {
            return Err(Error::LabelOutOfRange {
                label: released,
                k: self.k,
            });
        }
        let mut post: Vec<f64> = prior
            .iter()
            .enumerate()
            .map(|(y, p)| p * self.kernel(released, y))
            .collect();
        let total: f64 = post.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Numerical(format!(
                "posterior has total mass {total} for released label {released}"
            )));
        }
        post.iter_mut().for_each(|p| *p /= total);
        Ok(post)
    }
}

pub fn rr_apply<R: Rng + ?Sized>(
    mech: &RandomizedResponse,
    labels: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>> {
    mech.apply(labels, rng)
}

pub fn rr_posterior(mech: &RandomizedResponse, noisy_label: usize, prior: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = prior.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || prior.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "prior is not a probability vector (sum {sum})"
        )));
    }
    mech.posterior(noisy_label, prior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn keep_probabilities() {
        let rr = RandomizedResponse::new(3f64.ln(), 2).unwrap();
        assert!((rr.keep_prob() - 0.75).abs() < 1e-15);
        for &k in &[2, 5, 10] {
            for &eps in &[0.0, 0.5, 2.0, 50.0, f64::INFINITY] {
                let rr = RandomizedResponse::new(eps, k).unwrap();
                let total = rr.keep_prob() + (k - 1) as f64 * rr.flip_prob();
                assert!((total - 1.0).abs() < 1e-15);
                assert!(rr.keep_prob() >= 1.0 / k as f64 - 1e-15);
            }
        }
        assert!(RandomizedResponse::new(1.0, 1).is_err());
        assert!(RandomizedResponse::new(-1.0, 2).is_err());
    }

    #[test]
    fn near_noiseless_output_is_identity() {
        let rr = RandomizedResponse::new(50.0, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let labels: Vec<usize> = (0..10_000).map(|i| i % 5).collect();
        assert_eq!(rr.apply(&labels, &mut rng).unwrap(), labels);
    }

    #[test]
    fn out_of_range_label_is_rejected() {
        let rr = RandomizedResponse::new(1.0, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            rr.apply(&[0, 3], &mut rng),
            Err(Error::LabelOutOfRange { label: 3, k: 3 })
        ));
    }

    #[test]
    fn zero_eps_keeps_half_of_binary_labels() {
        let rr = RandomizedResponse::new(0.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let out = rr.apply(&vec![0; n], &mut rng).unwrap();
        let kept = out.iter().filter(|&&z| z == 0).count() as f64 / n as f64;
        assert!((kept - 0.5).abs() < 0.002, "kept {kept}");
    }

    #[test]
    fn empirical_kernel_matches_analytic() {
        let n = 1_000_000;
        for &(eps, k) in &[(1.0, 2), (0.7, 5), (2.0, 10)] {
            let rr = RandomizedResponse::new(eps, k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11 + k as u64);
            for input in [0, k - 1] {
                let out = rr.apply(&vec![input; n], &mut rng).unwrap();
                let mut counts = vec![0usize; k];
                out.iter().for_each(|&z| counts[z] += 1);
                for (z, &c) in counts.iter().enumerate() {
                    let p = rr.kernel(z, input);
                    let sigma = (p * (1.0 - p) / n as f64).sqrt();
                    let freq = c as f64 / n as f64;
                    assert!((freq - p).abs() <= 4.0 * sigma, "eps={eps} k={k} z={z}: {freq} vs {p}");
                }
            }
        }
    }

    #[test]
    fn exact_label_dp() {
        for &k in &[2, 5, 10] {
            for &eps in &[0.0, 0.25, 1.0, 4.0] {
                let rr = RandomizedResponse::new(eps, k).unwrap();
                assert!((rr.max_log_ratio() - eps).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn posterior_examples() {
        let prior = [0.1, 0.2, 0.3, 0.4];
        let flat = RandomizedResponse::new(0.0, 4).unwrap();
        let post = rr_posterior(&flat, 2, &prior).unwrap();
        for (a, b) in post.iter().zip(prior) {
            assert!((a - b).abs() < 1e-15);
        }

        let sharp = RandomizedResponse::new(50.0, 5).unwrap();
        let post = rr_posterior(&sharp, 2, &[0.2; 5]).unwrap();
        for (y, p) in post.iter().enumerate() {
            let want = if y == 2 { 1.0 } else { 0.0 };
            assert!((p - want).abs() < 1e-15);
        }

        let rr = RandomizedResponse::new(3f64.ln(), 2).unwrap();
        let post = rr_posterior(&rr, 1, &[0.5, 0.5]).unwrap();
        assert!((post[0] - 0.25).abs() < 1e-15 && (post[1] - 0.75).abs() < 1e-15);
        assert!((rr.posterior_of(1, 1, 0.5, 0.5) - 0.75).abs() < 1e-15);
        assert!((rr.posterior_of(1, 0, 0.5, 0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn posterior_errors() {
        let rr = RandomizedResponse::new(1.0, 3).unwrap();
        assert!(rr_posterior(&rr, 0, &[0.5, 0.6, 0.0]).is_err());
        assert!(rr_posterior(&rr, 0, &[0.5, 0.5]).is_err());
        let hard = RandomizedResponse::new(f64::INFINITY, 3).unwrap();
        assert!(matches!(
            hard.posterior(0, &[0.0, 0.5, 0.5]),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn posterior_sums_to_one() {
        let rr = RandomizedResponse::new(1.3, 5).unwrap();
        let prior = [0.05, 0.4, 0.15, 0.3, 0.1];
        for z in 0..5 {
            let s: f64 = rr_posterior(&rr, z, &prior).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
