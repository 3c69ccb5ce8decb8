//! Counter-based stream derivation.
//!
//! Task `k` of an experiment with master seed `s` and stream tag `t` draws
//! from `ChaCha8Rng::seed_from_u64(splitmix64(s ^ fnv1a64(t)))` with its
//! ChaCha stream set to `k`. Tasks never share a stream, and the stream a task
//! sees does not depend on how tasks are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_ID: &str = "ChaCha8Rng(rand_chacha 0.9); key = seed_from_u64(splitmix64(seed ^ fnv1a64(tag))); stream = task index";

/// Tag for the uniform instance stream shared by the average-case and
/// Bayesian estimators.
pub const TAG_INSTANCES: &str = "uniform-instances";
pub const TAG_PERTURBATIONS: &str = "smoothed-perturbations";
pub const TAG_CANDIDATES: &str = "smoothed-candidates";
pub const TAG_WORST: &str = "worst-family";
pub const TAG_GEN: &str = "gen";

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn substream(master: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master ^ fnv1a64(tag.as_bytes())));
    rng.set_stream(index);
    rng
}
