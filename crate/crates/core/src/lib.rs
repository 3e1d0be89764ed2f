//! Observational one-run auditing of label differential privacy.
//!
//! The crate plays the attribute-inference game against a label mechanism
//! without touching its training data: counterfactual labels are drawn from a
//! proxy of the label distribution, the adversary tries to tell real labels
//! from counterfactual ones, and the resulting `(c, c')` tally is turned into a
//! lower bound on ε by testing Gaussian trade-off curves.
//!
//! Module map:
//!
//! * [`tradeoff`]: trade-off curves, τ-shift, inversion, ε(δ) conversion.
//! * [`audit`]: the rejection recursion and empirical-ε search.
//! * [`mechanism`]: k-ary randomized response.
//! * [`synthdata`]: Gaussian-mixture datasets and their exact posteriors.
//! * [`proxy`]: counterfactual label distributions, including logistic regression.
//! * [`game`]: the one-run game: artifacts, scores, abstention, tally.
//! * [`experiment`]: repeated-game runner and reports.
//! * [`checks`]: the acceptance criteria as runnable checks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod checks;
pub mod error;
pub mod experiment;
pub mod game;
pub mod mechanism;
pub mod normal;
pub mod proxy;
pub mod seeding;
pub mod synthdata;
pub mod tradeoff;


pub use error::{Error, Result};
pub use tradeoff::{TradeoffFamily, TradeoffFunction};
pub use audit::{
    audit_with_shift, best_epsilon_over_guess_sweep, empirical_epsilon, evaluate_audit,
    AuditOutcome, EmpiricalEpsilon,
};
pub use game::{make_guesses, play_game, score_samples, tally, GameArtifacts, Guess, ScoredGame};
pub use mechanism::{LabelMechanism, RandomizedResponse};
pub use proxy::{LogisticConfig, ProxyModel};
pub use synthdata::LabeledDataset;
