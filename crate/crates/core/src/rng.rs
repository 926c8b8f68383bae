//! Random-stream contract.
//!
//! Every run is driven by a single 64-bit master seed. Independent streams
//! (one per chain, sweep cell or replicate) are derived by seeding ChaCha20
//! from the master seed and selecting the ChaCha stream id equal to the
//! stream index. Streams never overlap, and the mapping does not depend on
//! thread scheduling, so parallel and sequential execution agree bitwise.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Generator used for every random draw in the crate.
pub type ChainRng = ChaCha20Rng;

/// Name recorded in run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9), seed_from_u64(master) + set_stream(index)";

/// Derive the generator for stream `index` of the master seed.
pub fn stream(master_seed: u64, index: u64) -> ChainRng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
