//! Set-valued classification with a fixed or averaged set-size budget.
//!
//! A top-K classifier predicts, for every sample, the set of the K
//! highest-scoring classes. An average-K classifier instead predicts
//! variable-size sets chosen by a global score threshold, constrained so
//! that the *mean* set size over the data equals K. Whenever the ambiguity
//! of the task varies across inputs, the adaptive strategy captures strictly
//! more probability mass with the same budget.
//!
//! This crate provides:
//!
//! - [`predictors`]: set construction from a score matrix — per-row top-K
//!   selection and the exact quantile-threshold algorithm for average-K,
//!   including deterministic tie handling.
//! - [`metrics`]: set error rates, set-size statistics and error-vs-K curves.
//! - [`oracle`]: exact closed-form analysis on finite-zone distributions
//!   (mixtures of regions with constant class-conditional probabilities):
//!   optimal error rates, adaptive gain, straddle strengths, the
//!   top-K-optimality test, seeded sampling and noise injection.
//! - [`losses`]: proper scoring rules (log loss, Brier, one-vs-all) with
//!   their regret identities, strong-properness bounds and the plug-in
//!   regret bounds that connect score estimation error to set-prediction
//!   regret.
//! - [`calibration`]: post-hoc temperature scaling of logits by 1-D
//!   likelihood minimization.
//! - [`verify`]: seeded randomized corpora and check drivers used by the
//!   command-line `verify` subcommand and the acceptance test suite.
//!
//! Class indices are 0-based everywhere. The crate is `no_std`-compatible
//! (requires `alloc`); disable the default `std` feature for embedded use.
//!
//! ```
//! use avgk_core::matrix::ScoreMatrix;
//! use avgk_core::predictors::{average_k_sets, top_k_sets};
//!
//! let scores = ScoreMatrix::from_rows(&[
//!     vec![1.0, 0.0, 0.0],
//!     vec![0.0, 0.5, 0.5],
//! ])
//! .unwrap();
//!
//! // Fixed-size sets: two classes per row.
//! let top2 = top_k_sets(&scores, 2).unwrap();
//! assert_eq!(top2.row_size(0), 2);
//!
//! // Budgeted sets: two classes per row *on average*.
//! let avg2 = average_k_sets(&scores, 2.0).unwrap();
//! assert_eq!(avg2.sets.total_selected(), 4);
//! ```

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod calibration;
pub mod error;
pub mod losses;
pub mod matrix;
pub mod metrics;
pub mod oracle;
pub mod predictors;
pub mod verify;

pub(crate) mod math;
pub(crate) mod rng;

pub use error::Error;
pub use matrix::{LabelVector, ScoreMatrix, SetPrediction};

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
