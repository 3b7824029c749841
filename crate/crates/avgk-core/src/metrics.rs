//! Evaluation of set predictions: error rates, size statistics, curves.
//!
//! Error rates are accumulated as integer miss counts and divided once at
//! the end, so results are exact rational values wherever the inputs allow.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use serde::Serialize;

use crate::matrix::{LabelVector, ScoreMatrix, SetPrediction};
use crate::predictors::{average_k_sets_budget, top_k_sets};
use crate::{Error, Result};

/// Distribution of predicted set sizes: size -> number of rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SizeHistogram {
    counts: BTreeMap<usize, usize>,
}

impl SizeHistogram {
    pub fn from_sets(sets: &SetPrediction) -> Self {
        let mut counts = BTreeMap::new();
        for i in 0..sets.n_samples() {
            *counts.entry(sets.row_size(i)).or_insert(0) += 1;
        }
        SizeHistogram { counts }
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    /// Total number of rows covered by the histogram.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Total selected entries, `sum(size * count)`.
    pub fn total_selected(&self) -> usize {
        self.counts.iter().map(|(size, count)| size * count).sum()
    }

    /// Mean set size computed from the histogram.
    pub fn mean(&self) -> f64 {
        self.total_selected() as f64 / self.total() as f64
    }
}

fn check_dims(sets: &SetPrediction, labels: &LabelVector) -> Result<()> {
    if sets.n_samples() != labels.len() || sets.n_classes() != labels.n_classes() {
        return Err(Error::domain(format!(
            "dimension mismatch: sets are {}x{}, labels are {} entries over {} classes",
            sets.n_samples(),
            sets.n_classes(),
            labels.len(),
            labels.n_classes()
        )));
    }
    Ok(())
}

fn miss_count(sets: &SetPrediction, labels: &LabelVector) -> usize {
    labels
        .labels()
        .iter()
        .enumerate()
        .filter(|&(i, &label)| !sets.contains(i, label))
        .count()
}

/// Fraction of rows whose true label is **not** in the predicted set.
pub fn set_error_rate(sets: &SetPrediction, labels: &LabelVector) -> Result<f64> {
    check_dims(sets, labels)?;
    Ok(miss_count(sets, labels) as f64 / labels.len() as f64)
}

/// Mean predicted set size, `total selected / N`.
pub fn average_set_size(sets: &SetPrediction) -> f64 {
    sets.total_selected() as f64 / sets.n_samples() as f64
}

/// Empirical adaptive gain at set size `k`: top-K error minus average-K
/// error on the same scores and labels.
///
/// Unlike the exact-distribution quantity, this may be negative when the
/// scores are imperfect estimates.
pub fn adaptive_gain_empirical(
    scores: &ScoreMatrix,
    labels: &LabelVector,
    k: usize,
) -> Result<f64> {
    let top = top_k_sets(scores, k)?;
    check_dims(&top, labels)?;
    let avg = average_k_sets_budget(scores, scores.n_samples() * k)?;
    let n = labels.len() as f64;
    let top_error = miss_count(&top, labels) as f64 / n;
    let avg_error = miss_count(&avg.sets, labels) as f64 / n;
    Ok(top_error - avg_error)
}

/// One evaluated budget level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCurve {
    pub k: usize,
    pub top_k_error: f64,
    pub avg_k_error: f64,
    pub adaptive_gain: f64,
    /// Size distribution of the average-K prediction at this budget.
    pub size_histogram: SizeHistogram,
}

/// Error-vs-K curves plus their means over K.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub n: usize,
    pub c: usize,
    pub curves: Vec<KCurve>,
    pub mean_top_k_error: f64,
    pub mean_avg_k_error: f64,
}

/// Evaluates both strategies for every `K = 1..=k_max`.
pub fn evaluate_curves(
    scores: &ScoreMatrix,
    labels: &LabelVector,
    k_max: usize,
) -> Result<EvaluationReport> {
    let (n, c) = (scores.n_samples(), scores.n_classes());
    if k_max == 0 || k_max > c {
        return Err(Error::domain(format!(
            "k_max must be in [1, {c}], got {k_max}"
        )));
    }
    if n != labels.len() || c != labels.n_classes() {
        return Err(Error::domain(format!(
            "dimension mismatch: scores are {n}x{c}, labels are {} entries over {} classes",
            labels.len(),
            labels.n_classes()
        )));
    }

    let mut curves = Vec::with_capacity(k_max);
    let mut top_misses = 0usize;
    let mut avg_misses = 0usize;
    for k in 1..=k_max {
        let top = top_k_sets(scores, k)?;
        let avg = average_k_sets_budget(scores, n * k)?;
        let top_miss = miss_count(&top, labels);
        let avg_miss = miss_count(&avg.sets, labels);
        top_misses += top_miss;
        avg_misses += avg_miss;
        let top_k_error = top_miss as f64 / n as f64;
        let avg_k_error = avg_miss as f64 / n as f64;
        curves.push(KCurve {
            k,
            top_k_error,
            avg_k_error,
            adaptive_gain: top_k_error - avg_k_error,
            size_histogram: SizeHistogram::from_sets(&avg.sets),
        });
    }

    Ok(EvaluationReport {
        n,
        c,
        curves,
        mean_top_k_error: top_misses as f64 / (k_max * n) as f64,
        mean_avg_k_error: avg_misses as f64 / (k_max * n) as f64,
    })
}
