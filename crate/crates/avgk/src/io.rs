//! Parsing, formatting and loading of the on-disk formats.

use std::fs;
use std::path::Path;

use avgk_core::matrix::{LabelVector, ScoreMatrix, SetPrediction};
use avgk_core::oracle::{FiniteZoneDistribution, NoiseGroups};
use serde::Serialize;

/// Errors from loading or saving files.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Structural problem in a text file: ragged rows, unparsable fields.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] avgk_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-empty lines with their 1-based file line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty())
}

/// Parses a scores CSV. With `expect_probabilistic`, additionally checks
/// that every row is a probability vector.
pub fn parse_scores(text: &str, expect_probabilistic: bool) -> Result<ScoreMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n_fields = None;
    for (line_no, line) in data_lines(text) {
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("not a number: {field:?}"),
            })?;
            row.push(value);
        }
        let expected = *n_fields.get_or_insert(row.len());
        if row.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {expected} fields, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    let matrix = ScoreMatrix::from_rows(&rows)?;
    if expect_probabilistic {
        Ok(matrix.into_probabilistic()?)
    } else {
        Ok(matrix)
    }
}

pub fn load_scores(path: impl AsRef<Path>, expect_probabilistic: bool) -> Result<ScoreMatrix> {
    parse_scores(&fs::read_to_string(path)?, expect_probabilistic)
}

/// Parses a labels file: one base-10 class index per line, in
/// `[0, n_classes)`.
pub fn parse_labels(text: &str, n_classes: usize) -> Result<LabelVector> {
    let mut labels = Vec::new();
    for (line_no, line) in data_lines(text) {
        let label: usize = line.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("not a class index: {line:?}"),
        })?;
        if label >= n_classes {
            return Err(avgk_core::Error::Validation(format!(
                "line {line_no}: label {label} out of range for {n_classes} classes"
            ))
            .into());
        }
        labels.push(label);
    }
    Ok(LabelVector::new(labels, n_classes)?)
}

pub fn load_labels(path: impl AsRef<Path>, n_classes: usize) -> Result<LabelVector> {
    parse_labels(&fs::read_to_string(path)?, n_classes)
}

/// Scores CSV text; shortest round-trip decimal representation per value.
pub fn format_scores(matrix: &ScoreMatrix) -> String {
    let mut out = String::new();
    for i in 0..matrix.n_samples() {
        let row: Vec<String> = matrix.row(i).iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn save_scores(path: impl AsRef<Path>, matrix: &ScoreMatrix) -> Result<()> {
    Ok(fs::write(path, format_scores(matrix))?)
}

pub fn format_labels(labels: &LabelVector) -> String {
    let mut out = String::new();
    for &label in labels.labels() {
        out.push_str(&label.to_string());
        out.push('\n');
    }
    out
}

pub fn save_labels(path: impl AsRef<Path>, labels: &LabelVector) -> Result<()> {
    Ok(fs::write(path, format_labels(labels))?)
}

/// Set output: line `i` lists row `i`'s classes ascending, separated by
/// semicolons; an empty line is an empty set.
pub fn format_sets(sets: &SetPrediction) -> String {
    let mut out = String::new();
    for i in 0..sets.n_samples() {
        let row: Vec<String> = sets.row_indices(i).map(|c| c.to_string()).collect();
        out.push_str(&row.join(";"));
        out.push('\n');
    }
    out
}

/// Mask output: an `N x C` CSV of 0/1 memberships.
pub fn format_mask(sets: &SetPrediction) -> String {
    let mut out = String::new();
    for i in 0..sets.n_samples() {
        let row: Vec<&str> = (0..sets.n_classes())
            .map(|c| if sets.contains(i, c) { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_distribution(text: &str) -> Result<FiniteZoneDistribution> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_distribution(path: impl AsRef<Path>) -> Result<FiniteZoneDistribution> {
    parse_distribution(&fs::read_to_string(path)?)
}

pub fn parse_noise_groups(text: &str) -> Result<NoiseGroups> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_noise_groups(path: impl AsRef<Path>) -> Result<NoiseGroups> {
    parse_noise_groups(&fs::read_to_string(path)?)
}

/// Pretty-printed JSON with lexicographically sorted object keys, for
/// diff-stable golden files. Ends with a newline.
pub fn to_json_sorted<T: Serialize>(value: &T) -> Result<String> {
    // Routing through `Value` sorts the keys: its object map is a BTreeMap.
    let value = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}
