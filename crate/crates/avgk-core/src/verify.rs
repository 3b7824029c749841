//! Seeded randomized corpora and the check drivers built on them.
//!
//! Everything here is deterministic in the seed. The same drivers back the
//! command-line `verify` subcommand and the acceptance test suite:
//!
//! - Monte-Carlo agreement between empirical error rates on sampled data
//!   and the closed-form oracle values;
//! - the straddle-strength lower bounds on the adaptive gain;
//! - the support-gap characterization of top-K optimality;
//! - the generalized-inverse budget identity;
//! - strong properness (with the Pinsker-style chain) for every loss kind;
//! - the plug-in regret bounds under corruption;
//! - the excess-risk identity for arbitrary valid set assignments.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::losses::{check_plugin_bound, check_strong_properness, LossKind};
use crate::math;
use crate::metrics::set_error_rate;
use crate::oracle::FiniteZoneDistribution;
use crate::predictors::{average_k_sets_budget, top_k_sets, PredictionMode};
use crate::rng;
use crate::Result;

/// Equality tolerance used when a check compares against an exact value.
pub const EXACT_TOL: f64 = 1e-12;
/// Slack allowed on inequality checks evaluated in floating point.
pub const BOUND_SLACK: f64 = 1e-12;
/// Slack for the plug-in regret bounds, which accumulate more rounding.
pub const PLUGIN_SLACK: f64 = 1e-10;
/// Below this sample count the Monte-Carlo tolerance exceeds any signal the
/// built-in examples produce, so agreement is reported as inconclusive.
pub const MIN_CONCLUSIVE_SAMPLES: usize = 1000;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// True when no check failed (inconclusive results are not failures).
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.status != CheckStatus::Fail)
}

fn corpus_rng(seed: u64) -> ChaCha8Rng {
    // Distinct stream id so corpus draws never collide with sampling
    // streams derived from the same user seed.
    rng::stream_rng(seed, u64::MAX)
}

fn random_range(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng::unit(rng) * (hi - lo + 1) as f64) as usize
}

/// A random finite-zone distribution: 3-10 classes, 1-6 zones, flat
/// Dirichlet weights and etas. Deterministic in the seed.
pub fn random_distribution(seed: u64) -> FiniteZoneDistribution {
    let mut rng = corpus_rng(seed);
    let c = random_range(&mut rng, 3, 10);
    let n_zones = random_range(&mut rng, 1, 6);
    // Floor the weight draws away from zero; zone weights must be strictly
    // positive.
    let mut weights: Vec<f64> = (0..n_zones)
        .map(|_| (-math::ln(1.0 - rng::unit(&mut rng))).max(1e-9))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let zones: Vec<(f64, Vec<f64>)> = weights
        .into_iter()
        .map(|w| (w, rng::simplex(&mut rng, c)))
        .collect();
    FiniteZoneDistribution::new(c, zones).expect("generated distribution is valid")
}

/// A pair of independent flat-Dirichlet probability vectors.
pub fn random_simplex_pair(seed: u64, c: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = corpus_rng(seed);
    (rng::simplex(&mut rng, c), rng::simplex(&mut rng, c))
}

/// Fifty hand-built distributions with exact repeated probability values.
///
/// Flat-Dirichlet draws essentially never produce ties, so the
/// characterization and bound checks get these constructions as well:
/// uniform blocks, permuted profiles, nested blocks and straddling zones,
/// all built from exactly representable or exactly shared constants so that
/// ties at the optimal threshold actually occur.
pub fn tie_degenerate_fixtures() -> Vec<FiniteZoneDistribution> {
    fn block(c: usize, len: usize, offset: usize) -> Vec<f64> {
        let mut eta = alloc::vec![0.0; c];
        for i in 0..len {
            eta[(offset + i) % c] = 1.0 / len as f64;
        }
        eta
    }

    let mut fixtures = Vec::with_capacity(50);
    let mut variant = 0usize;
    while fixtures.len() < 50 {
        let c = 3 + variant % 6;
        let dist = match variant % 5 {
            // One zone, uniform on a prefix: every budget is tie-degenerate
            // and the fixed-size strategy is always optimal.
            0 => FiniteZoneDistribution::new(
                c,
                alloc::vec![(1.0, block(c, 1 + variant % c, 0))],
            ),
            // Two zones sharing one sorted profile with a repeated value;
            // identical profiles mean a gap at every budget.
            1 => {
                let m = 1 + variant % (c - 1);
                let mut profile = alloc::vec![0.0; c];
                profile[0] = 2.0 / (m + 2) as f64;
                for i in 0..m {
                    profile[1 + i] = 1.0 / (m + 2) as f64;
                }
                let mut rotated = profile.clone();
                rotated.rotate_right(1);
                FiniteZoneDistribution::new(c, alloc::vec![(0.5, profile), (0.5, rotated)])
            }
            // Nested uniform blocks of different widths: the boundary budget
            // sits exactly on a shared value, wider budgets straddle.
            2 => {
                let m1 = 1 + variant % (c - 1);
                let m2 = c.min(m1 + 1 + variant % 2);
                FiniteZoneDistribution::new(
                    c,
                    alloc::vec![(0.25, block(c, m1, 0)), (0.75, block(c, m2, 0))],
                )
            }
            // A half/quarter zone against a uniform-quarter zone: ranks 2
            // and 3 tie at exactly 1/4 across both zones.
            3 => {
                let c4 = c.max(4);
                let mut first = alloc::vec![0.0; c4];
                first[0] = 0.5;
                first[1] = 0.25;
                first[2] = 0.25;
                FiniteZoneDistribution::new(
                    c4,
                    alloc::vec![(0.375, first), (0.625, block(c4, 4, 0))],
                )
            }
            // Three zones with 1-, 2- and 3-way uniform ambiguity and
            // varying dyadic weights: genuine straddle, positive gain.
            _ => {
                let w = 0.125 + 0.0625 * (variant % 5) as f64;
                FiniteZoneDistribution::new(
                    c,
                    alloc::vec![
                        (w, block(c, 1, 0)),
                        (0.5 - w, block(c, 2, 1)),
                        (0.5, block(c, c.min(3), 0)),
                    ],
                )
            }
        };
        fixtures.push(dist.expect("fixture construction is valid"));
        variant += 1;
    }
    fixtures
}

/// One Monte-Carlo agreement comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgreementCheck {
    pub k: usize,
    pub mode: PredictionMode,
    pub empirical: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// False when the sample size is too small for the tolerance to mean
    /// anything.
    pub conclusive: bool,
}

impl AgreementCheck {
    pub fn within_tolerance(&self) -> bool {
        math::abs(self.empirical - self.expected) <= self.tolerance
    }

    pub fn outcome(&self) -> CheckOutcome {
        let mode = match self.mode {
            PredictionMode::TopK => "top",
            PredictionMode::AvgK => "avg",
        };
        let status = if !self.conclusive {
            CheckStatus::Inconclusive
        } else if self.within_tolerance() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckOutcome {
            name: format!("mc-agreement-{mode}-k{}", self.k),
            status,
            detail: format!(
                "empirical {:.6} vs closed form {:.6}, tolerance {:.6}",
                self.empirical, self.expected, self.tolerance
            ),
        }
    }
}

/// Monte-Carlo tolerance: the 3-sigma binomial band around `p`.
///
/// For the budgeted strategy the rows are coupled through the shared
/// empirical threshold, which adds estimation noise the pointwise binomial
/// term cannot see (and which does not vanish where `p` is exactly 0), so a
/// worst-case-scale term is added for it.
pub fn agreement_tolerance(p: f64, n: usize, coupled: bool) -> f64 {
    let binomial = 3.0 * math::sqrt(p * (1.0 - p) / n as f64);
    if coupled {
        binomial + 1.5 / math::sqrt(n as f64)
    } else {
        binomial
    }
}

/// Samples `n` rows from the distribution (scores = exact conditional
/// probabilities) and compares empirical error rates against the closed
/// forms for every `k` in `ks`.
pub fn monte_carlo_agreement(
    dist: &FiniteZoneDistribution,
    n: usize,
    seed: u64,
    ks: &[usize],
) -> Result<Vec<AgreementCheck>> {
    let (scores, labels) = dist.sample(n, seed)?;
    let conclusive = n >= MIN_CONCLUSIVE_SAMPLES;
    let mut checks = Vec::new();
    for &k in ks {
        let top = top_k_sets(&scores, k)?;
        let top_expected = dist.top_k_error(k)?;
        checks.push(AgreementCheck {
            k,
            mode: PredictionMode::TopK,
            empirical: set_error_rate(&top, &labels)?,
            expected: top_expected,
            tolerance: agreement_tolerance(top_expected, n, false),
            conclusive,
        });

        let avg = average_k_sets_budget(&scores, n * k)?;
        let avg_expected = dist.avg_k_error(k as f64)?;
        checks.push(AgreementCheck {
            k,
            mode: PredictionMode::AvgK,
            empirical: set_error_rate(&avg.sets, &labels)?,
            expected: avg_expected,
            tolerance: agreement_tolerance(avg_expected, n, true),
            conclusive,
        });
    }
    Ok(checks)
}

fn bound_outcome(name: String, lhs: f64, rhs: f64, slack: f64) -> CheckOutcome {
    CheckOutcome {
        status: if lhs >= rhs - slack {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("{lhs:.12} >= {rhs:.12} - {slack:e}"),
        name,
    }
}

/// Straddle-strength lower bounds on the adaptive gain, for every valid
/// budget: the order-1 bound for all `k < C`, and the summed bound for
/// `2k <= C`.
pub fn straddle_bound_checks(dist: &FiniteZoneDistribution) -> Result<Vec<CheckOutcome>> {
    let c = dist.n_classes();
    let mut outcomes = Vec::new();
    for k in 1..c {
        let gain = dist.adaptive_gain(k)?;
        outcomes.push(bound_outcome(
            format!("gain-nonnegative-k{k}"),
            gain,
            0.0,
            BOUND_SLACK,
        ));
        outcomes.push(bound_outcome(
            format!("straddle-order1-k{k}"),
            gain,
            dist.straddle_strength(k, 1)?,
            BOUND_SLACK,
        ));
        if 2 * k <= c {
            let sum: f64 = (1..=k)
                .map(|order| dist.straddle_strength(k, order))
                .sum::<Result<f64>>()?;
            outcomes.push(bound_outcome(
                format!("straddle-sum-k{k}"),
                gain,
                sum,
                BOUND_SLACK,
            ));
        }
    }
    Ok(outcomes)
}

/// Support-gap characterization: the gap exists iff the adaptive gain is
/// zero, for every budget below the class count.
pub fn characterization_checks(dist: &FiniteZoneDistribution) -> Result<Vec<CheckOutcome>> {
    let mut outcomes = Vec::new();
    for k in 1..dist.n_classes() {
        let gap = dist.support_gap(k)?;
        let gain = dist.adaptive_gain(k)?;
        let zero_gain = math::abs(gain) <= EXACT_TOL;
        outcomes.push(CheckOutcome {
            name: format!("characterization-k{k}"),
            status: if gap == zero_gain {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: format!("support gap {gap}, adaptive gain {gain:.3e}"),
        });
    }
    Ok(outcomes)
}

/// Budget identity of the generalized inverse: the mean set size at the
/// returned threshold is within budget, and every smaller candidate
/// overshoots it.
pub fn budget_identity_checks(dist: &FiniteZoneDistribution) -> Result<Vec<CheckOutcome>> {
    let mut outcomes = Vec::new();
    let mut candidates: Vec<f64> = dist
        .zones()
        .iter()
        .flat_map(|z| z.eta().iter().copied())
        .chain(core::iter::once(0.0))
        .collect();
    candidates.sort_unstable_by(|a, b| a.partial_cmp(b).expect("etas are finite"));
    candidates.dedup();

    for k in 1..=dist.n_classes() {
        let target = k as f64;
        let lambda = dist.threshold_for_size(target)?;
        let within = dist.mean_set_size(lambda) <= target;
        let minimal = candidates
            .iter()
            .filter(|&&c| c < lambda)
            .all(|&c| dist.mean_set_size(c) > target);
        outcomes.push(CheckOutcome {
            name: format!("budget-identity-k{k}"),
            status: if within && minimal {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: format!("threshold {lambda}, size {}", dist.mean_set_size(lambda)),
        });
    }
    Ok(outcomes)
}

/// Strong properness, regret identities and the estimation-error chain on
/// `n_pairs` random simplex pairs per loss kind.
pub fn properness_checks(n_pairs: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let kinds = [
        ("nll", LossKind::NegLogLikelihood),
        ("brier", LossKind::Brier),
        ("ova", LossKind::OneVsAll(crate::losses::BinaryBase::Squared)),
    ];
    let mut outcomes = Vec::new();
    for (tag, kind) in kinds {
        let mut bound_violations = 0usize;
        let mut strictness_violations = 0usize;
        let mut identity_violations = 0usize;
        let mut regret_sum = 0.0;
        let mut l1_sum = 0.0;
        let mut mu = f64::INFINITY;
        for i in 0..n_pairs {
            let mut pair_rng = corpus_rng(seed ^ (0x5EED << 8) ^ i as u64);
            let c = random_range(&mut pair_rng, 2, 10);
            let eta = rng::simplex(&mut pair_rng, c);
            let p_hat = rng::simplex(&mut pair_rng, c);
            let check = check_strong_properness(kind, &eta, &p_hat)?;
            mu = mu.min(check.mu);
            if check.regret < check.l1_bound - BOUND_SLACK {
                bound_violations += 1;
            }
            let l1: f64 = eta
                .iter()
                .zip(&p_hat)
                .map(|(&a, &b)| math::abs(a - b))
                .sum();
            if l1 > 1e-6 && check.regret <= EXACT_TOL {
                strictness_violations += 1;
            }
            // Brier regret has a closed form worth pinning exactly.
            if kind == LossKind::Brier {
                let l2sq: f64 = eta
                    .iter()
                    .zip(&p_hat)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                if math::abs(check.regret - 0.5 * l2sq) > EXACT_TOL {
                    identity_violations += 1;
                }
            } else {
                let via_risk = crate::losses::conditional_risk(kind, &eta, &p_hat)?
                    - crate::losses::conditional_risk(kind, &eta, &eta)?;
                if via_risk.is_finite()
                    && math::abs(check.regret - via_risk) > 1e-10
                {
                    identity_violations += 1;
                }
            }
            regret_sum += check.regret;
            l1_sum += l1;
        }
        let violations = bound_violations + strictness_violations + identity_violations;
        outcomes.push(CheckOutcome {
            name: format!("properness-{tag}"),
            status: if violations == 0 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: format!(
                "{n_pairs} pairs: {bound_violations} bound, {strictness_violations} strictness, \
                 {identity_violations} identity violations"
            ),
        });

        // Estimation-error chain on the same corpus, treating the pairs as
        // the input distribution: E l1 <= sqrt((2 / mu) E regret).
        let mean_l1 = l1_sum / n_pairs as f64;
        let chain_bound = math::sqrt((2.0 / mu) * (regret_sum / n_pairs as f64));
        outcomes.push(bound_outcome(
            format!("estimation-chain-{tag}"),
            chain_bound,
            mean_l1,
            BOUND_SLACK,
        ));
    }
    Ok(outcomes)
}

/// Plug-in regret bounds on `n_triples` randomized (distribution,
/// corruption, budget) triples, both strategies each time.
pub fn plugin_bound_checks(n_triples: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut top_violations = 0usize;
    let mut avg_violations = 0usize;
    let mut worst_margin = f64::INFINITY;
    for t in 0..n_triples {
        let dist = random_distribution(seed ^ 0xD157 ^ (t as u64).wrapping_mul(0x9E37));
        let c = dist.n_classes();
        let mut triple_rng = corpus_rng(seed ^ 0xC0112 ^ t as u64);
        let k = random_range(&mut triple_rng, 1, c);
        let eta_hat: Vec<Vec<f64>> = dist
            .zones()
            .iter()
            .map(|z| {
                if t % 7 == 0 {
                    // Hardest corruption: swap the two largest entries.
                    let mut eta = z.eta().to_vec();
                    let order = crate::predictors::top_indices(&eta, 2);
                    eta.swap(order[0], order[1]);
                    eta
                } else {
                    let eps = 0.1 + 0.8 * rng::unit(&mut triple_rng);
                    let noise = rng::simplex(&mut triple_rng, c);
                    z.eta()
                        .iter()
                        .zip(&noise)
                        .map(|(&p, &u)| (1.0 - eps) * p + eps * u)
                        .collect()
                }
            })
            .collect();
        for (mode, violations) in [
            (PredictionMode::TopK, &mut top_violations),
            (PredictionMode::AvgK, &mut avg_violations),
        ] {
            let check = check_plugin_bound(&dist, &eta_hat, k, mode)?;
            worst_margin = worst_margin.min(check.bound - check.regret);
            if check.regret > check.bound + PLUGIN_SLACK {
                *violations += 1;
            }
        }
    }
    Ok([
        ("plugin-bound-top", top_violations),
        ("plugin-bound-avg", avg_violations),
    ]
    .into_iter()
    .map(|(name, violations)| CheckOutcome {
        name: String::from(name),
        status: if violations == 0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!(
            "{n_triples} triples, {violations} violations, worst margin {worst_margin:.3e}"
        ),
    })
    .collect())
}

/// Excess-risk identity: for a random valid fractional assignment, the
/// direct error difference against the optimal classifier equals the
/// symmetric-difference formula evaluated at the optimal threshold.
pub fn excess_risk_checks(n_cases: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for t in 0..n_cases {
        let dist = random_distribution(seed ^ 0xE5C_u64 ^ (t as u64).wrapping_mul(0x2545));
        let c = dist.n_classes();
        let mut case_rng = corpus_rng(seed ^ 0xF0F0 ^ t as u64);
        // Mix integer and fractional budgets.
        let avg_size = if t % 2 == 0 {
            random_range(&mut case_rng, 1, c) as f64
        } else {
            0.5 + rng::unit(&mut case_rng) * (c as f64 - 0.5)
        };

        // A random valid average-size classifier: threshold random scores.
        let random_scores: Vec<Vec<f64>> = dist
            .zones()
            .iter()
            .map(|_| (0..c).map(|_| rng::unit(&mut case_rng)).collect())
            .collect();
        let candidate = dist.zone_assignment(&random_scores, avg_size)?;
        let optimal_scores: Vec<Vec<f64>> =
            dist.zones().iter().map(|z| z.eta().to_vec()).collect();
        let optimal = dist.zone_assignment(&optimal_scores, avg_size)?;

        let direct = dist.assignment_error(&candidate) - dist.avg_k_error(avg_size)?;
        let lambda = dist.threshold_for_size(avg_size)?;
        let formula: f64 = dist
            .zones()
            .iter()
            .enumerate()
            .map(|(z, zone)| {
                zone.weight()
                    * zone
                        .eta()
                        .iter()
                        .enumerate()
                        .map(|(j, &p)| {
                            math::abs(p - lambda)
                                * math::abs(candidate.membership[z][j] - optimal.membership[z][j])
                        })
                        .sum::<f64>()
            })
            .sum();
        let gap = math::abs(direct - formula);
        worst = worst.max(gap);
        if gap > 1e-10 {
            violations += 1;
        }
    }
    Ok(alloc::vec![CheckOutcome {
        name: String::from("excess-risk-identity"),
        status: if violations == 0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("{n_cases} cases, {violations} violations, worst gap {worst:.3e}"),
    }])
}
