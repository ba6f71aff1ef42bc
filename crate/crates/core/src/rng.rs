//! Seeded, reproducible random number generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Seed for one record, derived from the global seed and the record id so
/// that results do not depend on processing order.
pub fn derive_seed(global: u64, record_id: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global.to_le_bytes());
    hasher.update(record_id.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest is 32 bytes"))
}

pub fn record_rng(global: u64, record_id: &str) -> SeededRng {
    seeded(derive_seed(global, record_id))
}
