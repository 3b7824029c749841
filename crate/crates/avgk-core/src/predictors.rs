//! Set construction: per-row top-K selection and budgeted threshold sets.
//!
//! The average-K construction follows the finite-sample recipe exactly:
//! flatten the score matrix, take the B-th largest value as the threshold
//! (B = floor(N * K)), keep everything strictly above it, then fill the
//! remaining budget from the tied entries in row-major order. Both selection
//! steps run on a partial sort, O(N * C) expected.
//!
//! All tie handling is deterministic: within a row, top-K ties at the K-th
//! value are broken by the lowest class index; the average-K tie fill scans
//! row 0 class 0 first.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::matrix::{ScoreMatrix, SetPrediction};
use crate::{Error, Result};

/// Which of the two set-prediction strategies to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionMode {
    /// Fixed-size sets: the K highest-scoring classes of every row.
    TopK,
    /// Variable-size sets with mean size K over the matrix.
    AvgK,
}

/// Result of the average-K construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageKSolution {
    /// The selection threshold: the B-th largest flattened score.
    pub threshold: f64,
    /// The selected sets; exactly B entries in total.
    pub sets: SetPrediction,
    /// Entries strictly above the threshold.
    pub n_strict: usize,
    /// Tied entries (score equal to the threshold) used to fill the budget.
    pub n_tie_used: usize,
}

fn check_k_range(k: usize, c: usize) -> Result<()> {
    if k == 0 || k > c {
        return Err(Error::domain(format!(
            "set size must be in [1, {c}], got {k}"
        )));
    }
    Ok(())
}

/// Reorders `order` (must hold `0..row.len()`) so that its first `k`
/// entries are the row's top-k classes: descending by score, ascending by
/// class index on ties.
pub(crate) fn select_top_k(row: &[f64], order: &mut [usize], k: usize) {
    let by_rank = |&a: &usize, &b: &usize| {
        row[b]
            .partial_cmp(&row[a])
            .expect("scores are finite")
            .then_with(|| a.cmp(&b))
    };
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, by_rank);
    }
}

/// The k top-ranked class indices of a single score row, with the same tie
/// rule as [`top_k_sets`].
pub(crate) fn top_indices(row: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    select_top_k(row, &mut order, k);
    order.truncate(k);
    order
}

/// Marks, for every row, the `k` largest scores of that row.
///
/// Ties at the k-th value are broken by the lowest class index first.
pub fn top_k_sets(scores: &ScoreMatrix, k: usize) -> Result<SetPrediction> {
    let (n, c) = (scores.n_samples(), scores.n_classes());
    check_k_range(k, c)?;
    let mut sets = SetPrediction::empty(n, c);
    let mut order: Vec<usize> = Vec::with_capacity(c);
    for i in 0..n {
        order.clear();
        order.extend(0..c);
        select_top_k(scores.row(i), &mut order, k);
        for &class in &order[..k] {
            sets.set(i, class);
        }
    }
    Ok(sets)
}

/// The B-th largest element (1-indexed) of the flattened score array.
///
/// Guarantees `count(> threshold) < B <= count(>= threshold)`, which is what
/// the budgeted set construction needs.
pub fn average_k_threshold(scores: &ScoreMatrix, budget: usize) -> Result<f64> {
    let total = scores.n_samples() * scores.n_classes();
    if budget == 0 || budget > total {
        return Err(Error::domain(format!(
            "budget must be in [1, {total}], got {budget}"
        )));
    }
    let mut values: Vec<f64> = scores.values().to_vec();
    values.select_nth_unstable_by(budget - 1, |a, b| {
        b.partial_cmp(a).expect("scores are finite")
    });
    Ok(values[budget - 1])
}

/// Budgeted threshold sets with a mean set size of `avg_size`.
///
/// The integer budget is `B = floor(N * avg_size)`; the achieved mean size
/// `B / N` may differ from `avg_size` by less than `1 / N`.
pub fn average_k_sets(scores: &ScoreMatrix, avg_size: f64) -> Result<AverageKSolution> {
    let (n, c) = (scores.n_samples(), scores.n_classes());
    if !(avg_size > 0.0 && avg_size <= c as f64) {
        return Err(Error::domain(format!(
            "average set size must be in (0, {c}], got {avg_size}"
        )));
    }
    let budget = math::floor(n as f64 * avg_size) as usize;
    if budget == 0 {
        return Err(Error::domain(format!(
            "budget floor({n} * {avg_size}) must be at least 1"
        )));
    }
    average_k_sets_budget(scores, budget)
}

/// Budgeted threshold sets selecting exactly `budget` entries.
pub fn average_k_sets_budget(scores: &ScoreMatrix, budget: usize) -> Result<AverageKSolution> {
    let (n, c) = (scores.n_samples(), scores.n_classes());
    let threshold = average_k_threshold(scores, budget)?;

    let mut sets = SetPrediction::empty(n, c);
    let mut n_strict = 0;
    for (idx, &v) in scores.values().iter().enumerate() {
        if v > threshold {
            sets.set(idx / c, idx % c);
            n_strict += 1;
        }
    }
    debug_assert!(n_strict <= budget);

    // Fill the deficit from tied entries, row 0 class 0 first.
    let mut n_tie_used = 0;
    let deficit = budget - n_strict;
    if deficit > 0 {
        for (idx, &v) in scores.values().iter().enumerate() {
            if v == threshold {
                sets.set(idx / c, idx % c);
                n_tie_used += 1;
                if n_tie_used == deficit {
                    break;
                }
            }
        }
    }
    debug_assert_eq!(n_strict + n_tie_used, budget);

    Ok(AverageKSolution {
        threshold,
        sets,
        n_strict,
        n_tie_used,
    })
}

/// Mean number of entries strictly above `lambda`, `count(> lambda) / N`.
///
/// This is the empirical mean set size of thresholding at `lambda`: weakly
/// decreasing and right-continuous in `lambda`.
pub fn empirical_mean_set_size(scores: &ScoreMatrix, lambda: f64) -> f64 {
    let above = scores.values().iter().filter(|&&v| v > lambda).count();
    above as f64 / scores.n_samples() as f64
}
