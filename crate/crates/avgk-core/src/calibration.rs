//! Post-hoc temperature scaling of logits.
//!
//! A single scalar temperature divides every logit before the softmax; it
//! is fitted by minimizing the mean negative log-likelihood on held-out
//! data. The objective is convex in `1 / T`, hence unimodal in `T`, so a
//! coarse log-spaced grid scan followed by golden-section refinement of the
//! best bracket finds the optimum deterministically.
//!
//! Rescaling never changes the within-row ranking of scores, so fixed-size
//! top-K sets are invariant to it; budgeted average-K sets, which compare
//! scores *across* rows, are not.

use alloc::format;
use alloc::vec::Vec;

use serde::Serialize;

use crate::math;
use crate::matrix::{row_normalize_softmax, LabelVector, ScoreMatrix};
use crate::{Error, Result};

/// Search domain for the temperature.
pub const TEMPERATURE_MIN: f64 = 1e-3;
pub const TEMPERATURE_MAX: f64 = 1e3;
const GRID_POINTS: usize = 200;
const REFINE_LOG_TOL: f64 = 1e-6;

/// Non-fatal conditions detected while fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitWarning {
    /// Every logit row is constant: the likelihood does not depend on the
    /// temperature at all, so the identity temperature is returned.
    DegenerateLogits,
    /// The objective kept decreasing down to the smallest allowed
    /// temperature.
    LowerBoundary,
    /// The objective kept decreasing up to the largest allowed temperature.
    UpperBoundary,
}

/// Result of a temperature fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureFit {
    /// Fitted temperature, in `[1e-3, 1e3]`.
    pub temperature: f64,
    /// Mean negative log-likelihood at the identity temperature.
    pub nll_before: f64,
    /// Mean negative log-likelihood at the fitted temperature.
    pub nll_after: f64,
    /// Golden-section iterations spent refining the grid optimum.
    pub iterations: u32,
    pub warning: Option<FitWarning>,
}

/// Mean negative log-likelihood of `softmax(logits / t)` against `labels`.
///
/// Evaluated in log space (max-shifted log-sum-exp), so the result is
/// finite for any finite logits.
fn mean_nll(logits: &ScoreMatrix, labels: &LabelVector, t: f64) -> f64 {
    let n = logits.n_samples();
    let mut total = 0.0;
    for i in 0..n {
        let row = logits.row(i);
        let mut max = f64::NEG_INFINITY;
        for &z in row {
            max = max.max(z / t);
        }
        let mut sum = 0.0;
        for &z in row {
            sum += math::exp(z / t - max);
        }
        total += max - row[labels.get(i)] / t + math::ln(sum);
    }
    total / n as f64
}

/// Fits the temperature minimizing the mean negative log-likelihood.
///
/// The objective is evaluated on a 200-point log-spaced grid over
/// `[1e-3, 1e3]`; the bracket around the grid optimum is then refined by
/// golden-section search until the log-temperature is pinned to `1e-6`.
/// Ties prefer the lowest temperature. Deterministic.
pub fn fit_temperature(logits: &ScoreMatrix, labels: &LabelVector) -> Result<TemperatureFit> {
    if logits.n_samples() != labels.len() || logits.n_classes() != labels.n_classes() {
        return Err(Error::domain(format!(
            "dimension mismatch: logits are {}x{}, labels are {} entries over {} classes",
            logits.n_samples(),
            logits.n_classes(),
            labels.len(),
            labels.n_classes()
        )));
    }

    let degenerate = (0..logits.n_samples()).all(|i| {
        let row = logits.row(i);
        row.iter().all(|&z| z == row[0])
    });
    if degenerate {
        let nll = mean_nll(logits, labels, 1.0);
        return Ok(TemperatureFit {
            temperature: 1.0,
            nll_before: nll,
            nll_after: nll,
            iterations: 0,
            warning: Some(FitWarning::DegenerateLogits),
        });
    }

    let lo = math::ln(TEMPERATURE_MIN);
    let hi = math::ln(TEMPERATURE_MAX);
    let objective = |u: f64| mean_nll(logits, labels, math::exp(u));

    let mut best_idx = 0;
    let mut best = (lo, objective(lo));
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    for (i, &u) in grid.iter().enumerate().skip(1) {
        let f = objective(u);
        if f < best.1 {
            best = (u, f);
            best_idx = i;
        }
    }

    // Golden-section refinement of the bracket around the grid optimum.
    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(GRID_POINTS - 1)];
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    let mut iterations = 0u32;
    while b - a > REFINE_LOG_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = objective(x2);
        }
        iterations += 1;
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
    }

    let temperature = math::exp(best.0).clamp(TEMPERATURE_MIN, TEMPERATURE_MAX);
    let warning = if best_idx == 0 {
        Some(FitWarning::LowerBoundary)
    } else if best_idx == GRID_POINTS - 1 {
        Some(FitWarning::UpperBoundary)
    } else {
        None
    };

    Ok(TemperatureFit {
        temperature,
        nll_before: mean_nll(logits, labels, 1.0),
        nll_after: best.1,
        iterations,
        warning,
    })
}

/// Softmax of `logits / t`; same contract as
/// [`row_normalize_softmax`](crate::matrix::row_normalize_softmax).
pub fn apply_temperature(logits: &ScoreMatrix, t: f64) -> Result<ScoreMatrix> {
    row_normalize_softmax(logits, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FiniteZoneDistribution;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Two-class mixture with genuinely graded confidence, so the scaled
    /// likelihood has an interior optimum.
    fn graded_distribution() -> FiniteZoneDistribution {
        FiniteZoneDistribution::new(
            2,
            vec![(0.5, vec![0.8, 0.2]), (0.5, vec![0.3, 0.7])],
        )
        .unwrap()
    }

    fn scaled_log_eta(scores: &ScoreMatrix, factor: f64) -> ScoreMatrix {
        let rows: Vec<Vec<f64>> = (0..scores.n_samples())
            .map(|i| {
                scores
                    .row(i)
                    .iter()
                    .map(|&p| factor * p.max(1e-300).ln())
                    .collect()
            })
            .collect();
        ScoreMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn degenerate_rows_return_identity() {
        let logits = ScoreMatrix::from_rows(&[vec![0.5, 0.5], vec![-2.0, -2.0]]).unwrap();
        let labels = LabelVector::new(vec![0, 1], 2).unwrap();
        let fit = fit_temperature(&logits, &labels).unwrap();
        assert_eq!(fit.temperature, 1.0);
        assert_eq!(fit.warning, Some(FitWarning::DegenerateLogits));
        assert_eq!(fit.nll_before, fit.nll_after);
    }

    #[test]
    fn single_confident_row_hits_the_lower_boundary() {
        // With the label on the unique argmax, sharpening always helps, so
        // the fit runs into the smallest allowed temperature.
        let logits = ScoreMatrix::from_rows(&[vec![2.0, 0.0, -1.0]]).unwrap();
        let labels = LabelVector::new(vec![0], 3).unwrap();
        let fit = fit_temperature(&logits, &labels).unwrap();
        assert_eq!(fit.warning, Some(FitWarning::LowerBoundary));
        assert!(fit.temperature <= TEMPERATURE_MIN * 1.01);
        assert!(fit.nll_after <= fit.nll_before + 1e-12);
    }

    #[test]
    fn identity_logits_fit_near_one() {
        let dist = graded_distribution();
        let (scores, labels) = dist.sample(20_000, 17).unwrap();
        let logits = scaled_log_eta(&scores, 1.0);
        let fit = fit_temperature(&logits, &labels).unwrap();
        assert!(
            (fit.temperature - 1.0).abs() <= 0.1,
            "fitted {}",
            fit.temperature
        );
        assert!(fit.warning.is_none());
        assert!(fit.nll_after <= fit.nll_before + 1e-12);
    }

    #[test]
    fn doubled_log_eta_recovers_two() {
        let dist = graded_distribution();
        let (scores, labels) = dist.sample(20_000, 23).unwrap();
        let logits = scaled_log_eta(&scores, 2.0);
        let fit = fit_temperature(&logits, &labels).unwrap();
        assert!(
            (fit.temperature - 2.0).abs() <= 0.15,
            "fitted {}",
            fit.temperature
        );
        assert!(fit.nll_after <= fit.nll_before + 1e-12);
    }

    // Temperature recovery needs rows whose probabilities are graded, not
    // uniform on their support: rescaling a support-uniform row is a no-op,
    // so such rows carry no information about the scale. Example 4's first
    // zone is graded (2/3 + 0.01 vs 1/3 - 0.01), which is enough.
    #[test]
    fn doubled_log_eta_recovers_two_on_six_class_mixture() {
        let dist = FiniteZoneDistribution::builtin_example(4).unwrap();
        let (scores, labels) = dist.sample(100_000, 31).unwrap();
        let logits = scaled_log_eta(&scores, 2.0);
        let fit = fit_temperature(&logits, &labels).unwrap();
        assert!(
            (fit.temperature - 2.0).abs() <= 0.2,
            "fitted {}",
            fit.temperature
        );
        assert!(fit.warning.is_none());
    }

    #[test]
    fn fit_is_invariant_to_row_constant_shifts() {
        let dist = graded_distribution();
        let (scores, labels) = dist.sample(2_000, 29).unwrap();
        let logits = scaled_log_eta(&scores, 2.0);
        let shifted_rows: Vec<Vec<f64>> = (0..logits.n_samples())
            .map(|i| logits.row(i).iter().map(|&z| z + 8.0).collect())
            .collect();
        let shifted = ScoreMatrix::from_rows(&shifted_rows).unwrap();
        let fit = fit_temperature(&logits, &labels).unwrap();
        let fit_shifted = fit_temperature(&shifted, &labels).unwrap();
        let rel = (fit.temperature - fit_shifted.temperature).abs() / fit.temperature;
        assert!(rel <= 1e-4, "{} vs {}", fit.temperature, fit_shifted.temperature);
    }

    // Rescaling preserves within-row order but not cross-row order, so the
    // budgeted selection can change with the temperature even though the
    // fixed-size one cannot.
    #[test]
    fn budgeted_sets_can_change_with_temperature() {
        use crate::predictors::{average_k_sets_budget, top_k_sets};
        let logits = ScoreMatrix::from_rows(&[
            vec![6.0, 0.0, 0.0],
            vec![5.0, 4.0, -4.0],
            vec![1.0, 0.9, 0.8],
        ])
        .unwrap();
        let cool = apply_temperature(&logits, 1.0).unwrap();
        let warm = apply_temperature(&logits, 10.0).unwrap();
        for k in 1..=3 {
            assert_eq!(
                top_k_sets(&cool, k).unwrap(),
                top_k_sets(&warm, k).unwrap()
            );
        }
        assert_ne!(
            average_k_sets_budget(&cool, 3).unwrap().sets,
            average_k_sets_budget(&warm, 3).unwrap().sets
        );
    }

    #[test]
    fn apply_matches_softmax() {
        let logits = ScoreMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let a = apply_temperature(&logits, 2.0).unwrap();
        let b = row_normalize_softmax(&logits, 2.0).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.is_probabilistic());
    }
}
