//! Reproducible random streams.
//!
//! Every random quantity is drawn from a ChaCha stream selected by
//! `(seed, instance key)`. ChaCha is counter based, so shards derived from
//! the same key with different stream ids never overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// FNV-1a, used to turn instance labels into stream ids.
pub fn instance_hash(label: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in label {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// The stream for `(seed, label)`.
pub fn keyed(seed: u64, label: &str) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance_hash(label.as_bytes()));
    rng
}

/// Shard `shard` of the stream for `(seed, label)`.
pub fn shard(seed: u64, label: &str, shard: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ shard.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(instance_hash(label.as_bytes()));
    rng
}
