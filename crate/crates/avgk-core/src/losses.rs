//! Proper scoring rules and the regret machinery around them.
//!
//! A proper loss is minimized in conditional risk by the true conditional
//! probability vector, which is what makes probability estimates trained on
//! it usable for set prediction. The losses here are *strongly* proper:
//! their pointwise regret dominates `(mu / 2) * ||eta - eta_hat||_1^2`, so a
//! small surrogate regret forces the estimate close to the truth in L1, and
//! the plug-in regret bounds then cap the top-K / average-K regret by that
//! same L1 error.
//!
//! Natural logarithms throughout; the Pinsker constant `mu = 1` for the log
//! loss assumes nats. Infinite values (log loss at zero probability,
//! Kullback-Leibler blow-ups) are data conditions, not errors: they are
//! returned as `f64::INFINITY` and propagate through comparisons.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::oracle::FiniteZoneDistribution;
use crate::predictors::{top_indices, PredictionMode};
use crate::{Error, Result};

/// Tolerance accepted when checking that a vector lies on the simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Binary proper loss used as the building block of one-vs-all losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryBase {
    /// Squared loss `(indicator - p)^2`, unit-strongly proper.
    Squared,
}

impl BinaryBase {
    fn value(self, positive: bool, p: f64) -> f64 {
        let target = f64::from(positive);
        match self {
            BinaryBase::Squared => {
                let d = target - p;
                d * d
            }
        }
    }

    fn regret(self, eta: f64, p: f64) -> f64 {
        match self {
            BinaryBase::Squared => {
                let d = eta - p;
                d * d
            }
        }
    }
}

/// The supported conditional-probability-estimation losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// Negative log-likelihood, `-ln(p[label])`.
    NegLogLikelihood,
    /// Brier score, `0.5 * sum((indicator - p)^2)`.
    Brier,
    /// One-vs-all reduction over a binary base loss.
    OneVsAll(BinaryBase),
}

impl LossKind {
    /// Strong-properness constant `mu` for `c` classes: the regret of the
    /// loss dominates `(mu / 2) * ||eta - eta_hat||_1^2`.
    pub fn strong_properness_mu(&self, c: usize) -> f64 {
        match self {
            LossKind::NegLogLikelihood => 1.0,
            LossKind::Brier | LossKind::OneVsAll(_) => 1.0 / c as f64,
        }
    }
}

fn check_simplex(name: &str, p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::domain(format!(
            "{name} must have at least 2 entries, got {}",
            p.len()
        )));
    }
    let mut sum = 0.0;
    for &v in p {
        if !v.is_finite() || !(-SIMPLEX_TOL..=1.0 + SIMPLEX_TOL).contains(&v) {
            return Err(Error::domain(format!("{name} entry {v} outside [0, 1]")));
        }
        sum += v;
    }
    if math::abs(sum - 1.0) > SIMPLEX_TOL {
        return Err(Error::domain(format!("{name} sums to {sum}, expected 1")));
    }
    Ok(())
}

/// Loss of predicting the probability vector `p` when the true class is
/// `label`.
pub fn loss_value(kind: LossKind, label: usize, p: &[f64]) -> Result<f64> {
    check_simplex("probability vector", p)?;
    if label >= p.len() {
        return Err(Error::domain(format!(
            "label {label} out of range for {} classes",
            p.len()
        )));
    }
    Ok(match kind {
        LossKind::NegLogLikelihood => {
            if p[label] > 0.0 {
                -math::ln(p[label])
            } else {
                f64::INFINITY
            }
        }
        LossKind::Brier => {
            0.5 * p
                .iter()
                .enumerate()
                .map(|(k, &pk)| {
                    let d = f64::from(k == label) - pk;
                    d * d
                })
                .sum::<f64>()
        }
        LossKind::OneVsAll(base) => p
            .iter()
            .enumerate()
            .map(|(k, &pk)| base.value(k == label, pk))
            .sum(),
    })
}

/// Expected loss of predicting `p_hat` when labels are drawn from `eta`.
///
/// Classes with zero true probability contribute nothing, even where the
/// loss itself is infinite.
pub fn conditional_risk(kind: LossKind, eta: &[f64], p_hat: &[f64]) -> Result<f64> {
    check_simplex("eta", eta)?;
    if eta.len() != p_hat.len() {
        return Err(Error::domain(format!(
            "eta has {} classes but the estimate has {}",
            eta.len(),
            p_hat.len()
        )));
    }
    let mut risk = 0.0;
    for (label, &w) in eta.iter().enumerate() {
        if w > 0.0 {
            risk += w * loss_value(kind, label, p_hat)?;
        }
    }
    Ok(risk)
}

/// Conditional-risk regret of predicting `p_hat` instead of `eta`.
///
/// Log loss: the Kullback-Leibler divergence `KL(eta || p_hat)`. Brier:
/// half the squared L2 distance. One-vs-all: the sum of per-class binary
/// regrets. Always non-negative, zero iff the prediction matches.
pub fn pointwise_regret(kind: LossKind, eta: &[f64], p_hat: &[f64]) -> Result<f64> {
    check_simplex("eta", eta)?;
    check_simplex("probability vector", p_hat)?;
    if eta.len() != p_hat.len() {
        return Err(Error::domain(format!(
            "eta has {} classes but the estimate has {}",
            eta.len(),
            p_hat.len()
        )));
    }
    Ok(match kind {
        LossKind::NegLogLikelihood => {
            let mut kl = 0.0;
            for (&e, &p) in eta.iter().zip(p_hat) {
                if e > 0.0 {
                    if p > 0.0 {
                        kl += e * (math::ln(e) - math::ln(p));
                    } else {
                        return Ok(f64::INFINITY);
                    }
                }
            }
            kl
        }
        LossKind::Brier => {
            0.5 * eta
                .iter()
                .zip(p_hat)
                .map(|(&e, &p)| (e - p) * (e - p))
                .sum::<f64>()
        }
        LossKind::OneVsAll(base) => eta
            .iter()
            .zip(p_hat)
            .map(|(&e, &p)| base.regret(e, p))
            .sum(),
    })
}

/// One strong-properness evaluation: the regret, the bound it must
/// dominate, and the constant in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropernessCheck {
    pub regret: f64,
    /// `(mu / 2) * ||eta - p_hat||_1^2`.
    pub l1_bound: f64,
    pub mu: f64,
}

/// Evaluates the strong-properness inequality on one pair; the caller
/// asserts `regret >= l1_bound`.
pub fn check_strong_properness(
    kind: LossKind,
    eta: &[f64],
    p_hat: &[f64],
) -> Result<PropernessCheck> {
    let regret = pointwise_regret(kind, eta, p_hat)?;
    let l1: f64 = eta
        .iter()
        .zip(p_hat)
        .map(|(&e, &p)| math::abs(e - p))
        .sum();
    let mu = kind.strong_properness_mu(eta.len());
    Ok(PropernessCheck {
        regret,
        l1_bound: 0.5 * mu * l1 * l1,
        mu,
    })
}

/// One plug-in regret-bound evaluation: the set-prediction regret of the
/// classifier built from estimated probabilities, and the expected L1
/// estimation error that must dominate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PluginBoundCheck {
    pub regret: f64,
    /// `E ||eta - eta_hat||_1` over the distribution.
    pub bound: f64,
}

/// Builds the plug-in classifier from per-zone probability estimates,
/// measures its true error under the distribution, and returns the regret
/// against the optimal classifier together with the L1 bound. The caller
/// asserts `regret <= bound` (up to float slack).
pub fn check_plugin_bound(
    dist: &FiniteZoneDistribution,
    eta_hat: &[Vec<f64>],
    k: usize,
    mode: PredictionMode,
) -> Result<PluginBoundCheck> {
    let zones = dist.zones();
    if k == 0 || k > dist.n_classes() {
        return Err(Error::domain(format!(
            "set size must be in [1, {}], got {k}",
            dist.n_classes()
        )));
    }
    if eta_hat.len() != zones.len() {
        return Err(Error::domain(format!(
            "expected {} estimated vectors, got {}",
            zones.len(),
            eta_hat.len()
        )));
    }
    for (i, p) in eta_hat.iter().enumerate() {
        check_simplex("estimated eta", p)?;
        if p.len() != dist.n_classes() {
            return Err(Error::domain(format!(
                "estimated vector {i} has {} classes, expected {}",
                p.len(),
                dist.n_classes()
            )));
        }
    }

    let bound: f64 = zones
        .iter()
        .zip(eta_hat)
        .map(|(z, p)| {
            z.weight()
                * z.eta()
                    .iter()
                    .zip(p)
                    .map(|(&a, &b)| math::abs(a - b))
                    .sum::<f64>()
        })
        .sum();

    let regret = match mode {
        PredictionMode::TopK => {
            let captured: f64 = zones
                .iter()
                .zip(eta_hat)
                .map(|(z, p)| {
                    let picked = top_indices(p, k);
                    z.weight() * picked.iter().map(|&c| z.eta()[c]).sum::<f64>()
                })
                .sum();
            (1.0 - captured) - dist.top_k_error(k)?
        }
        PredictionMode::AvgK => {
            let assignment = dist.zone_assignment(eta_hat, k as f64)?;
            dist.assignment_error(&assignment) - dist.avg_k_error(k as f64)?
        }
    };

    Ok(PluginBoundCheck { regret, bound })
}
