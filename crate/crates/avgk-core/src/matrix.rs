//! Shared data model: score matrices, label vectors, set predictions.
//!
//! All types are immutable after construction and validated up front, so
//! downstream algorithms never re-check shapes or finiteness. Class indices
//! are 0-based; row numbers in error messages are 1-based.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Tolerance on probabilistic row sums. Rows are never silently
/// renormalized; a violation is an input error.
pub const PROB_ROW_SUM_TOL: f64 = 1e-9;

/// An `N x C` matrix of per-sample class scores, row-major.
///
/// Scores may be probabilities or arbitrary finite reals (logits). A matrix
/// flagged `probabilistic` additionally guarantees entries in `[0, 1]` with
/// each row summing to 1 within [`PROB_ROW_SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n_samples: usize,
    n_classes: usize,
    values: Vec<f64>,
    probabilistic: bool,
}

impl ScoreMatrix {
    /// Builds a matrix from a row-major buffer, checking shape and
    /// finiteness.
    pub fn new(n_samples: usize, n_classes: usize, values: Vec<f64>) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::validation("score matrix must have at least one row"));
        }
        if n_classes < 2 {
            return Err(Error::validation(format!(
                "score matrix must have at least 2 classes, got {n_classes}"
            )));
        }
        if values.len() != n_samples * n_classes {
            return Err(Error::validation(format!(
                "expected {n_samples}x{n_classes}={} values, got {}",
                n_samples * n_classes,
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::validation(format!(
                    "non-finite score {v} at row {}, class {}",
                    i / n_classes + 1,
                    i % n_classes
                )));
            }
        }
        Ok(ScoreMatrix {
            n_samples,
            n_classes,
            values,
            probabilistic: false,
        })
    }

    /// Builds a matrix from per-row slices of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("score matrix must have at least one row"));
        }
        let c = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::validation(format!(
                    "row {} has {} fields, expected {c}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let mut values = Vec::with_capacity(rows.len() * c);
        for row in rows {
            values.extend_from_slice(row);
        }
        ScoreMatrix::new(rows.len(), c, values)
    }

    /// Checks the probabilistic invariants and flags the matrix.
    ///
    /// Every entry must lie in `[0, 1]` and every row must sum to 1 within
    /// [`PROB_ROW_SUM_TOL`]. The offending row (1-based) is named on failure.
    pub fn into_probabilistic(mut self) -> Result<Self> {
        for i in 0..self.n_samples {
            let row = self.row(i);
            let mut sum = 0.0;
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::validation(format!(
                        "row {}: entry {v} outside [0, 1]",
                        i + 1
                    )));
                }
                sum += v;
            }
            if math::abs(sum - 1.0) > PROB_ROW_SUM_TOL {
                return Err(Error::validation(format!(
                    "row {}: probabilities sum to {sum}, expected 1",
                    i + 1
                )));
            }
        }
        self.probabilistic = true;
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Whether the probabilistic invariants were verified at construction.
    pub fn is_probabilistic(&self) -> bool {
        self.probabilistic
    }

    /// Row `i` as a slice of length `n_classes`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_classes..(i + 1) * self.n_classes]
    }

    /// The full row-major buffer.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Ground-truth class indices, one per sample, each in `[0, n_classes)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    n_classes: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("label vector is empty"));
        }
        for (i, &l) in labels.iter().enumerate() {
            if l >= n_classes {
                return Err(Error::validation(format!(
                    "line {}: label {l} out of range for {n_classes} classes",
                    i + 1
                )));
            }
        }
        Ok(LabelVector { labels, n_classes })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }
}

/// An `N x C` boolean membership mask representing predicted label sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPrediction {
    n_samples: usize,
    n_classes: usize,
    mask: Vec<bool>,
}

impl SetPrediction {
    /// An all-false mask of the given shape.
    pub fn empty(n_samples: usize, n_classes: usize) -> Self {
        SetPrediction {
            n_samples,
            n_classes,
            mask: vec![false; n_samples * n_classes],
        }
    }

    pub fn from_mask(n_samples: usize, n_classes: usize, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != n_samples * n_classes {
            return Err(Error::validation(format!(
                "expected {n_samples}x{n_classes}={} mask entries, got {}",
                n_samples * n_classes,
                mask.len()
            )));
        }
        Ok(SetPrediction {
            n_samples,
            n_classes,
            mask,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn contains(&self, sample: usize, class: usize) -> bool {
        self.mask[sample * self.n_classes + class]
    }

    pub(crate) fn set(&mut self, sample: usize, class: usize) {
        self.mask[sample * self.n_classes + class] = true;
    }

    /// Class indices of row `i`'s set, ascending.
    pub fn row_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let base = i * self.n_classes;
        self.mask[base..base + self.n_classes]
            .iter()
            .enumerate()
            .filter_map(|(k, &m)| m.then_some(k))
    }

    /// Number of classes in row `i`'s set.
    pub fn row_size(&self, i: usize) -> usize {
        self.row_indices(i).count()
    }

    /// Total number of selected entries across all rows.
    pub fn total_selected(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Row-wise softmax of `logits / temperature` with max-shift for stability.
///
/// Exact ties in logits map to exactly equal probabilities, which matters
/// for the deterministic tie handling downstream. The output is flagged
/// probabilistic.
pub fn row_normalize_softmax(logits: &ScoreMatrix, temperature: f64) -> Result<ScoreMatrix> {
    if temperature <= 0.0 || !temperature.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be a positive finite real, got {temperature}"
        )));
    }
    let (n, c) = (logits.n_samples(), logits.n_classes());
    let mut values = Vec::with_capacity(n * c);
    let mut scaled = vec![0.0; c];
    for i in 0..n {
        let row = logits.row(i);
        let mut max = f64::NEG_INFINITY;
        for (s, &z) in scaled.iter_mut().zip(row) {
            *s = z / temperature;
            if *s > max {
                max = *s;
            }
        }
        let mut sum = 0.0;
        let start = values.len();
        for &s in &scaled {
            let e = math::exp(s - max);
            values.push(e);
            sum += e;
        }
        for v in &mut values[start..] {
            *v /= sum;
        }
    }
    let mut out = ScoreMatrix::new(n, c, values)?;
    out.probabilistic = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(ScoreMatrix::new(0, 3, vec![]).is_err());
        assert!(ScoreMatrix::new(1, 1, vec![1.0]).is_err());
        assert!(ScoreMatrix::new(2, 2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = ScoreMatrix::new(1, 2, vec![0.5, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(ScoreMatrix::new(1, 2, vec![f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn probabilistic_check_names_the_row() {
        let m = ScoreMatrix::from_rows(&[vec![0.2, 0.3, 0.5], vec![0.5, 0.6, 0.2]]).unwrap();
        let err = m.into_probabilistic().unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("row 2"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn probabilistic_flag_set_on_valid_rows() {
        let m = ScoreMatrix::from_rows(&[vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0]])
            .unwrap()
            .into_probabilistic()
            .unwrap();
        assert!(m.is_probabilistic());
    }

    #[test]
    fn labels_validate_range() {
        assert!(LabelVector::new(vec![0, 2, 1], 3).is_ok());
        let err = LabelVector::new(vec![3], 3).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("line 1"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(LabelVector::new(vec![], 3).is_err());
    }

    #[test]
    fn softmax_symmetric_row() {
        let m = ScoreMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let p = row_normalize_softmax(&m, 1.0).unwrap();
        assert_eq!(p.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn softmax_analytic_row() {
        let m = ScoreMatrix::from_rows(&[vec![2.0f64.ln(), 0.0]]).unwrap();
        let p = row_normalize_softmax(&m, 1.0).unwrap();
        assert_close(p.row(0)[0], 2.0 / 3.0, 1e-15);
        assert_close(p.row(0)[1], 1.0 / 3.0, 1e-15);
    }

    #[test]
    fn softmax_with_temperature() {
        // Independent arithmetic: softmax((4, 0) / 2) = (e^2, 1) / (e^2 + 1).
        let m = ScoreMatrix::from_rows(&[vec![4.0, 0.0]]).unwrap();
        let p = row_normalize_softmax(&m, 2.0).unwrap();
        let e2 = 2.0f64.exp();
        assert_close(p.row(0)[0], e2 / (e2 + 1.0), 1e-15);
        assert_close(p.row(0)[1], 1.0 / (e2 + 1.0), 1e-15);
        assert_close(p.row(0)[0], 0.8808, 1e-4);
        assert_close(p.row(0)[1], 0.1192, 1e-4);
    }

    #[test]
    fn softmax_rejects_bad_temperature() {
        let m = ScoreMatrix::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            row_normalize_softmax(&m, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(row_normalize_softmax(&m, -1.0).is_err());
        assert!(row_normalize_softmax(&m, f64::NAN).is_err());
    }

    #[test]
    fn softmax_ties_give_equal_probabilities() {
        let m = ScoreMatrix::from_rows(&[vec![3.0, 3.0, -1.0]]).unwrap();
        let p = row_normalize_softmax(&m, 0.7).unwrap();
        assert_eq!(p.row(0)[0], p.row(0)[1]);
    }
}
