//! Seeded, splittable random generation.
//!
//! Every randomized operation derives one ChaCha stream per logical unit of
//! work (one per sample row, one per label), so results are bit-identical
//! regardless of evaluation order or thread count.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;

/// Counter-based stream `stream` of the generator seeded with `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Index drawn from the categorical distribution given by `weights`.
///
/// Weights need not be normalized exactly; any rounding deficit is absorbed
/// by the last positive-weight index.
pub(crate) fn categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u = unit(rng);
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding left a sliver of unassigned mass; fall back to the last
    // index that can actually occur.
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Uniform draw from the probability simplex over `c` classes.
pub(crate) fn simplex(rng: &mut ChaCha8Rng, c: usize) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..c).map(|_| -math::ln(1.0 - unit(rng))).collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        for d in &mut draws {
            *d /= total;
        }
    } else {
        for d in &mut draws {
            *d = 1.0 / c as f64;
        }
    }
    draws
}
