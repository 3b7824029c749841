//! Exact analysis of finite-zone distributions.
//!
//! A finite-zone distribution is a mixture of finitely many regions, each
//! with a constant class-conditional probability vector. On such a
//! distribution every quantity of interest has a closed form: the mean set
//! size reached by a threshold, the optimal threshold for a target mean
//! size, the optimal top-K and average-K error rates, the adaptive gain
//! between them, and the straddle strengths that lower-bound that gain.
//!
//! The mean-set-size function is a right-continuous step function whose
//! breakpoints are the distinct conditional-probability values, so its
//! generalized inverse is found exactly by scanning the finite candidate
//! grid `{0} union {distinct values}` — no root finding, no tolerances.
//!
//! Where a target mean size falls between steps, the optimal classifier
//! must split tied entries. Zones here stand for a continuum of inputs
//! sharing one probability vector, so a tie entry may be included
//! *fractionally*: [`ZoneAssignment`] carries per-entry membership grades
//! in `[0, 1]`, and each unit of tied set size contributes exactly the
//! threshold's worth of captured probability.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::matrix::{LabelVector, ScoreMatrix};
use crate::rng;
use crate::{Error, Result};

/// Tolerance on zone-weight and eta sums at construction.
pub const DIST_SUM_TOL: f64 = 1e-12;

/// One mixture component: a region weight and its conditional probability
/// vector over the classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Zone {
    weight: f64,
    eta: Vec<f64>,
}

impl Zone {
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }
}

/// An exact joint distribution: weighted zones with fixed conditional
/// probability vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct FiniteZoneDistribution {
    n_classes: usize,
    zones: Vec<Zone>,
}

#[derive(Deserialize)]
struct RawDistribution {
    n_classes: usize,
    zones: Vec<RawZone>,
}

#[derive(Deserialize)]
struct RawZone {
    weight: f64,
    eta: Vec<f64>,
}

impl TryFrom<RawDistribution> for FiniteZoneDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        FiniteZoneDistribution::new(
            raw.n_classes,
            raw.zones.into_iter().map(|z| (z.weight, z.eta)).collect(),
        )
    }
}

impl FiniteZoneDistribution {
    /// Builds and validates a distribution.
    ///
    /// Weights must be in `(0, 1]` and sum to 1 within [`DIST_SUM_TOL`];
    /// each eta must have `n_classes` entries in `[0, 1]` summing to 1
    /// within the same tolerance.
    pub fn new(n_classes: usize, zones: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        if n_classes < 2 {
            return Err(Error::validation(format!(
                "distribution needs at least 2 classes, got {n_classes}"
            )));
        }
        if zones.is_empty() {
            return Err(Error::validation("distribution has no zones"));
        }
        let mut weight_sum = 0.0;
        for (i, (weight, eta)) in zones.iter().enumerate() {
            if !(*weight > 0.0 && *weight <= 1.0) {
                return Err(Error::validation(format!(
                    "zone {i}: weight {weight} outside (0, 1]"
                )));
            }
            weight_sum += weight;
            if eta.len() != n_classes {
                return Err(Error::validation(format!(
                    "zone {i}: eta has {} entries, expected {n_classes}",
                    eta.len()
                )));
            }
            let mut eta_sum = 0.0;
            for &p in eta {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::validation(format!(
                        "zone {i}: eta entry {p} outside [0, 1]"
                    )));
                }
                eta_sum += p;
            }
            if math::abs(eta_sum - 1.0) > DIST_SUM_TOL {
                return Err(Error::validation(format!(
                    "zone {i}: eta sums to {eta_sum}, expected 1"
                )));
            }
        }
        if math::abs(weight_sum - 1.0) > DIST_SUM_TOL {
            return Err(Error::validation(format!(
                "zone weights sum to {weight_sum}, expected 1"
            )));
        }
        Ok(FiniteZoneDistribution {
            n_classes,
            zones: zones
                .into_iter()
                .map(|(weight, eta)| Zone { weight, eta })
                .collect(),
        })
    }

    /// The four built-in 6-class example distributions.
    ///
    /// 1. Three equal-weight zones, each ambiguous between one pair of
    ///    classes with probabilities (0.55, 0.45): homogeneous ambiguity,
    ///    so a fixed set size of 2 is already optimal.
    /// 2. Equal-weight zones with 1-, 2- and 3-way ambiguity: the adaptive
    ///    strategy resolves each zone exactly and wins outright.
    /// 3. Example 2 with the unambiguous zone shrunk to weight 3/100: the
    ///    straddle is *rare*, so the gain nearly vanishes.
    /// 4. Example 2 with the unambiguous zone flattened to
    ///    (2/3 + 0.01, 1/3 - 0.01): the straddle is *shallow*, same effect.
    pub fn builtin_example(id: u8) -> Result<Self> {
        let third = 1.0 / 3.0;
        match id {
            1 => FiniteZoneDistribution::new(
                6,
                vec![
                    (third, vec![0.55, 0.45, 0.0, 0.0, 0.0, 0.0]),
                    (third, vec![0.0, 0.0, 0.55, 0.45, 0.0, 0.0]),
                    (third, vec![0.0, 0.0, 0.0, 0.0, 0.55, 0.45]),
                ],
            ),
            2 => FiniteZoneDistribution::new(
                6,
                vec![
                    (third, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
                    (third, vec![0.0, 0.5, 0.5, 0.0, 0.0, 0.0]),
                    (third, vec![0.0, 0.0, 0.0, third, third, third]),
                ],
            ),
            3 => FiniteZoneDistribution::new(
                6,
                vec![
                    (3.0 / 100.0, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
                    (2.0 / 3.0 - 3.0 / 100.0, vec![0.0, 0.5, 0.5, 0.0, 0.0, 0.0]),
                    (third, vec![0.0, 0.0, 0.0, third, third, third]),
                ],
            ),
            4 => FiniteZoneDistribution::new(
                6,
                vec![
                    (
                        third,
                        vec![2.0 / 3.0 + 0.01, 1.0 / 3.0 - 0.01, 0.0, 0.0, 0.0, 0.0],
                    ),
                    (third, vec![0.0, 0.5, 0.5, 0.0, 0.0, 0.0]),
                    (third, vec![0.0, 0.0, 0.0, third, third, third]),
                ],
            ),
            other => Err(Error::domain(format!(
                "unknown built-in example {other}, expected 1..=4"
            ))),
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    /// Per-zone etas sorted in descending order.
    pub fn sorted_etas(&self) -> Vec<Vec<f64>> {
        self.zones
            .iter()
            .map(|z| {
                let mut eta = z.eta.clone();
                eta.sort_unstable_by(|a, b| b.partial_cmp(a).expect("etas are finite"));
                eta
            })
            .collect()
    }

    /// Mean optimal set size when thresholding at `lambda`:
    /// the weighted count of conditional probabilities strictly above it.
    pub fn mean_set_size(&self, lambda: f64) -> f64 {
        self.zones
            .iter()
            .map(|z| z.weight * z.eta.iter().filter(|&&p| p > lambda).count() as f64)
            .sum()
    }

    /// Smallest threshold whose mean set size is at most `avg_size`.
    ///
    /// The mean-set-size function only steps at distinct eta values, so the
    /// minimum over `[0, 1]` is attained on the finite candidate grid
    /// `{0} union {distinct eta values}` and is found exactly.
    pub fn threshold_for_size(&self, avg_size: f64) -> Result<f64> {
        self.check_avg_size(avg_size)?;
        let mut candidates: Vec<f64> = self
            .zones
            .iter()
            .flat_map(|z| z.eta.iter().copied())
            .chain(core::iter::once(0.0))
            .collect();
        candidates.sort_unstable_by(|a, b| a.partial_cmp(b).expect("etas are finite"));
        candidates.dedup();
        for lambda in candidates {
            if self.mean_set_size(lambda) <= avg_size {
                return Ok(lambda);
            }
        }
        // The largest eta value always qualifies: nothing is strictly above it.
        unreachable!("mean set size at the top candidate is 0")
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_classes {
            return Err(Error::domain(format!(
                "set size must be in [1, {}], got {k}",
                self.n_classes
            )));
        }
        Ok(())
    }

    fn check_avg_size(&self, avg_size: f64) -> Result<()> {
        if !(avg_size > 0.0 && avg_size <= self.n_classes as f64) {
            return Err(Error::domain(format!(
                "average set size must be in (0, {}], got {avg_size}",
                self.n_classes
            )));
        }
        Ok(())
    }

    /// Error rate of the optimal fixed-size-K classifier:
    /// one minus the expected mass of the K largest conditional
    /// probabilities.
    pub fn top_k_error(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        let captured: f64 = self
            .sorted_etas()
            .iter()
            .zip(&self.zones)
            .map(|(sorted, z)| z.weight * sorted[..k].iter().sum::<f64>())
            .sum();
        Ok(1.0 - captured)
    }

    /// Error rate of the optimal average-K classifier at mean size
    /// `avg_size`.
    ///
    /// With threshold `lambda`, strictly-above entries contribute their full
    /// probability; the remaining set-size deficit is filled from entries
    /// tied at `lambda`, each unit of which captures exactly `lambda`.
    pub fn avg_k_error(&self, avg_size: f64) -> Result<f64> {
        let lambda = self.threshold_for_size(avg_size)?;
        let mass: f64 = self
            .zones
            .iter()
            .map(|z| {
                z.weight
                    * z.eta
                        .iter()
                        .filter(|&&p| p > lambda)
                        .sum::<f64>()
            })
            .sum();
        let deficit = avg_size - self.mean_set_size(lambda);
        Ok(1.0 - mass - deficit * lambda)
    }

    /// Adaptive gain at budget `k`: optimal top-K error minus optimal
    /// average-K error. Non-negative for every distribution.
    pub fn adaptive_gain(&self, k: usize) -> Result<f64> {
        Ok(self.top_k_error(k)? - self.avg_k_error(k as f64)?)
    }

    /// Straddle strength of the given order at budget `k`.
    ///
    /// For order `j` this is the expected positive part of the (k+j)-th
    /// ranked probability of one input minus the (k+1-j)-th ranked
    /// probability of an independent input. It measures how often, and by
    /// how much, the ambiguity level straddles rank `k` across inputs.
    pub fn straddle_strength(&self, k: usize, order: usize) -> Result<f64> {
        if order == 0 || order > k || k + order > self.n_classes {
            return Err(Error::domain(format!(
                "straddle order must satisfy 1 <= order <= {k} and {k} + order <= {}, got {order}",
                self.n_classes
            )));
        }
        let sorted = self.sorted_etas();
        let mut total = 0.0;
        for (za, a) in sorted.iter().zip(&self.zones) {
            let high = za[k + order - 1];
            for (zb, b) in sorted.iter().zip(&self.zones) {
                let low = zb[k - order];
                total += a.weight * b.weight * math::pos(high - low);
            }
        }
        Ok(total)
    }

    /// Probability that the (k+1)-th ranked probability of one input
    /// exceeds the k-th ranked probability of an independent input — the
    /// "weight" factor of the order-1 straddle strength.
    pub fn straddle_weight(&self, k: usize) -> Result<f64> {
        if k == 0 || k >= self.n_classes {
            return Err(Error::domain(format!(
                "straddle weight needs 1 <= k < {}, got {k}",
                self.n_classes
            )));
        }
        let sorted = self.sorted_etas();
        let mut total = 0.0;
        for (za, a) in sorted.iter().zip(&self.zones) {
            for (zb, b) in sorted.iter().zip(&self.zones) {
                if za[k] > zb[k - 1] {
                    total += a.weight * b.weight;
                }
            }
        }
        Ok(total)
    }

    /// Whether a single threshold separates the k-th and (k+1)-th ranked
    /// conditional probabilities across all zones.
    ///
    /// This holds exactly when the fixed-size-K classifier is already
    /// optimal (zero adaptive gain).
    pub fn support_gap(&self, k: usize) -> Result<bool> {
        if k == 0 || k >= self.n_classes {
            return Err(Error::domain(format!(
                "support gap needs 1 <= k < {}, got {k}",
                self.n_classes
            )));
        }
        let sorted = self.sorted_etas();
        let min_kth = sorted
            .iter()
            .map(|s| s[k - 1])
            .fold(f64::INFINITY, f64::min);
        let max_next = sorted.iter().map(|s| s[k]).fold(0.0, f64::max);
        Ok(min_kth >= max_next)
    }

    /// Full closed-form analysis at budget `k`.
    pub fn analyze(&self, k: usize) -> Result<OracleAnalysis> {
        self.check_k(k)?;
        let c = self.n_classes;
        let top_k_error = self.top_k_error(k)?;
        let avg_k_error = self.avg_k_error(k as f64)?;
        let lambda_k = self.threshold_for_size(k as f64)?;
        let adaptive_gain = top_k_error - avg_k_error;

        let max_order = k.min(c.saturating_sub(k));
        let straddle: Vec<f64> = (1..=max_order)
            .map(|order| self.straddle_strength(k, order))
            .collect::<Result<_>>()?;
        // The summed bound needs 2k <= C; otherwise only order 1 applies.
        let straddle_lower_bound = if 2 * k <= c {
            straddle.iter().sum()
        } else {
            straddle.first().copied().unwrap_or(0.0)
        };
        let support_gap = if k < c { self.support_gap(k)? } else { true };

        Ok(OracleAnalysis {
            k,
            lambda_k,
            top_k_error,
            avg_k_error,
            adaptive_gain,
            straddle,
            straddle_lower_bound,
            support_gap,
        })
    }

    /// Draws `n` samples: each row's scores are its zone's exact
    /// conditional probabilities and its label is drawn from them.
    ///
    /// One counter-based generator stream per row, so output is
    /// bit-identical for a given seed regardless of evaluation order.
    pub fn sample(&self, n: usize, seed: u64) -> Result<(ScoreMatrix, LabelVector)> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let c = self.n_classes;
        let weights: Vec<f64> = self.zones.iter().map(|z| z.weight).collect();
        let mut values = Vec::with_capacity(n * c);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let mut stream = rng::stream_rng(seed, i as u64);
            let zone = rng::categorical(&mut stream, &weights);
            let eta = &self.zones[zone].eta;
            labels.push(rng::categorical(&mut stream, eta));
            values.extend_from_slice(eta);
        }
        let scores = ScoreMatrix::new(n, c, values)?.into_probabilistic()?;
        Ok((scores, LabelVector::new(labels, c)?))
    }

    /// Optimal fractional set assignment for the given per-zone scores.
    ///
    /// Entries strictly above the generalized-inverse threshold get grade 1;
    /// the set-size deficit is filled from entries tied at the threshold in
    /// zone-major order (zone 0 class 0 first), the last one fractionally.
    /// The weighted mean set size equals `avg_size` exactly (up to float
    /// rounding). Scoring with the distribution's own etas yields the
    /// optimal average-K classifier; scoring with estimates yields the
    /// plug-in classifier.
    pub fn zone_assignment(&self, scores: &[Vec<f64>], avg_size: f64) -> Result<ZoneAssignment> {
        self.check_avg_size(avg_size)?;
        if scores.len() != self.zones.len() {
            return Err(Error::domain(format!(
                "expected {} score vectors, got {}",
                self.zones.len(),
                scores.len()
            )));
        }
        for (i, s) in scores.iter().enumerate() {
            if s.len() != self.n_classes {
                return Err(Error::domain(format!(
                    "score vector {i} has {} entries, expected {}",
                    s.len(),
                    self.n_classes
                )));
            }
            if s.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::domain(format!(
                    "score vector {i} has entries outside [0, 1]"
                )));
            }
        }

        let size_at = |lambda: f64| -> f64 {
            scores
                .iter()
                .zip(&self.zones)
                .map(|(s, z)| z.weight * s.iter().filter(|&&v| v > lambda).count() as f64)
                .sum()
        };
        let mut candidates: Vec<f64> = scores
            .iter()
            .flat_map(|s| s.iter().copied())
            .chain(core::iter::once(0.0))
            .collect();
        candidates.sort_unstable_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
        candidates.dedup();
        let threshold = candidates
            .into_iter()
            .find(|&lambda| size_at(lambda) <= avg_size)
            .expect("top candidate reaches size 0");

        let mut membership: Vec<Vec<f64>> = scores
            .iter()
            .map(|s| s.iter().map(|&v| f64::from(v > threshold)).collect())
            .collect();
        // Deficit is a probability mass over X; tied entries absorb it in
        // zone-major order, each with capacity equal to its zone weight.
        let mut remaining = avg_size - size_at(threshold);
        'fill: for (zi, s) in scores.iter().enumerate() {
            let weight = self.zones[zi].weight;
            for (ki, &v) in s.iter().enumerate() {
                if v == threshold {
                    if remaining <= 0.0 {
                        break 'fill;
                    }
                    let grade = (remaining / weight).min(1.0);
                    membership[zi][ki] = grade;
                    remaining -= grade * weight;
                }
            }
        }

        Ok(ZoneAssignment {
            threshold,
            membership,
        })
    }

    /// Error rate of a fractional assignment measured under this
    /// distribution's true etas.
    pub fn assignment_error(&self, assignment: &ZoneAssignment) -> f64 {
        let captured: f64 = assignment
            .membership
            .iter()
            .zip(&self.zones)
            .map(|(grades, z)| {
                z.weight
                    * grades
                        .iter()
                        .zip(&z.eta)
                        .map(|(g, p)| g * p)
                        .sum::<f64>()
            })
            .sum();
        1.0 - captured
    }
}

/// A fractional set assignment at the distribution level: one membership
/// grade in `[0, 1]` per zone and class.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneAssignment {
    /// Threshold that produced the assignment.
    pub threshold: f64,
    /// Per-zone membership grades, `zones x n_classes`.
    pub membership: Vec<Vec<f64>>,
}

impl ZoneAssignment {
    /// Weighted mean set size of the assignment.
    pub fn mean_size(&self, dist: &FiniteZoneDistribution) -> f64 {
        self.membership
            .iter()
            .zip(dist.zones())
            .map(|(grades, z)| z.weight() * grades.iter().sum::<f64>())
            .sum()
    }
}

/// Closed-form analysis of one budget level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleAnalysis {
    pub k: usize,
    /// Optimal threshold for mean set size `k`.
    pub lambda_k: f64,
    pub top_k_error: f64,
    pub avg_k_error: f64,
    /// `top_k_error - avg_k_error`; non-negative.
    pub adaptive_gain: f64,
    /// Straddle strengths of order 1, 2, ... as far as the class count
    /// allows.
    pub straddle: Vec<f64>,
    /// The provable lower bound on the gain: the summed straddle strengths
    /// when `2k <= C`, otherwise the order-1 strength alone.
    pub straddle_lower_bound: f64,
    /// True exactly when the fixed-size strategy is already optimal.
    pub support_gap: bool,
}

/// One row of the built-in heterogeneity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeterogeneityRow {
    pub example: u8,
    pub top_k_error: f64,
    pub avg_k_error: f64,
    /// Probability of the straddle event.
    pub weight: f64,
    /// Mean exceedance when the straddle event occurs.
    pub magnitude: f64,
    /// Order-1 straddle strength, `weight * magnitude`.
    pub measure: f64,
}

/// Weight/magnitude decomposition of the order-1 straddle strength for
/// built-in examples 2-4 at budget `k = 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeterogeneityTable {
    pub k: usize,
    pub rows: Vec<HeterogeneityRow>,
}

/// Builds the example 2-4 comparison at budget 2: identical top-2 error
/// rates, very different adaptive gains, explained by the straddle
/// decomposition.
pub fn heterogeneity_table() -> Result<HeterogeneityTable> {
    let k = 2;
    let mut rows = Vec::new();
    for example in 2..=4u8 {
        let dist = FiniteZoneDistribution::builtin_example(example)?;
        let measure = dist.straddle_strength(k, 1)?;
        let weight = dist.straddle_weight(k)?;
        let magnitude = if weight > 0.0 { measure / weight } else { 0.0 };
        rows.push(HeterogeneityRow {
            example,
            top_k_error: dist.top_k_error(k)?,
            avg_k_error: dist.avg_k_error(k as f64)?,
            weight,
            magnitude,
            measure,
        });
    }
    Ok(HeterogeneityTable { k, rows })
}

/// Blends each probabilistic score row with a fresh uniform-simplex draw:
/// `(1 - epsilon) * row + epsilon * u`. Output rows remain on the simplex;
/// the L1 distortion per row is at most `2 * epsilon`.
pub fn corrupt_eta(scores: &ScoreMatrix, epsilon: f64, seed: u64) -> Result<ScoreMatrix> {
    if !scores.is_probabilistic() {
        return Err(Error::domain(
            "corruption requires a probabilistic score matrix",
        ));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::domain(format!(
            "epsilon must be in [0, 1], got {epsilon}"
        )));
    }
    let (n, c) = (scores.n_samples(), scores.n_classes());
    let mut values = Vec::with_capacity(n * c);
    for i in 0..n {
        let mut stream = rng::stream_rng(seed, i as u64);
        let noise = rng::simplex(&mut stream, c);
        for (&p, &u) in scores.row(i).iter().zip(&noise) {
            values.push((1.0 - epsilon) * p + epsilon * u);
        }
    }
    ScoreMatrix::new(n, c, values)?.into_probabilistic()
}

/// A partition of the class indices into disjoint covering groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGroups")]
pub struct NoiseGroups {
    groups: Vec<Vec<usize>>,
    n_classes: usize,
}

#[derive(Deserialize)]
struct RawGroups {
    groups: Vec<Vec<usize>>,
}

impl TryFrom<RawGroups> for NoiseGroups {
    type Error = Error;

    fn try_from(raw: RawGroups) -> Result<Self> {
        NoiseGroups::new(raw.groups)
    }
}

impl NoiseGroups {
    /// Validates that the groups are non-empty, disjoint, and cover
    /// `0..n_classes` without gaps.
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::validation("noise groups must be non-empty"));
        }
        let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
        all.sort_unstable();
        for (expected, &got) in all.iter().enumerate() {
            if got != expected {
                return Err(Error::validation(format!(
                    "groups must partition 0..C exactly; problem near class {got}"
                )));
            }
        }
        let n_classes = all.len();
        Ok(NoiseGroups { groups, n_classes })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// Replaces each label with a uniform draw from its group (possibly
/// itself). Deterministic given the seed; one generator stream per label.
pub fn inject_label_noise(
    labels: &LabelVector,
    groups: &NoiseGroups,
    seed: u64,
) -> Result<LabelVector> {
    if labels.n_classes() != groups.n_classes() {
        return Err(Error::validation(format!(
            "groups cover {} classes but labels use {}",
            groups.n_classes(),
            labels.n_classes()
        )));
    }
    let mut group_of = vec![0usize; groups.n_classes()];
    for (gi, group) in groups.groups().iter().enumerate() {
        for &class in group {
            group_of[class] = gi;
        }
    }
    let noisy: Vec<usize> = labels
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            let group = &groups.groups()[group_of[label]];
            let mut stream = rng::stream_rng(seed, i as u64);
            let pick = (rng::unit(&mut stream) * group.len() as f64) as usize;
            group[pick.min(group.len() - 1)]
        })
        .collect();
    LabelVector::new(noisy, labels.n_classes())
}
