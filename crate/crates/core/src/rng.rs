//! Seeded randomness. Every consumer draws from its own ChaCha stream of one
//! user-supplied seed, so adding samples in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
