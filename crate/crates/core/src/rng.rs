use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The crate-wide PRNG: ChaCha8 keyed by a single 64-bit seed.
pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
