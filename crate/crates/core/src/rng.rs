//! Counter-based randomness keyed by (seed, stream).
//!
//! Every stochastic evaluation derives its generator from a master seed and a
//! deterministic evaluation index, so results do not depend on execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn counter_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mix a tag into a seed (splitmix64 finalizer) so independent consumers of one
/// master seed never share a generator.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Multinomial draw of `shots` outcomes from `probs` (renormalised).
pub fn sample_counts<R: Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cum.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; probs.len()];
    if acc <= 0.0 {
        return counts;
    }
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let k = cum.partition_point(|&c| c <= u).min(last_nonzero);
        counts[k] += 1;
    }
    counts
}
