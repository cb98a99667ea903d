//! Seed for the randomized checking utilities.

use pp_stability_core::sampling::{parse_seed, Sampler};

pub const SEED_ENV: &str = "PP_STABILITY_SEED";

/// Seed from `PP_STABILITY_SEED`, or the library default.
pub fn seed_from_env() -> u64 {
    parse_seed(std::env::var(SEED_ENV).ok().as_deref())
}

/// Sampler seeded from the environment, offset by `stream`.
pub fn sampler(stream: u64) -> Sampler {
    Sampler::new(seed_from_env() ^ stream)
}
