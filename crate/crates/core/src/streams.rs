//! Project-wide RNG: ChaCha8 seeded from a `u64`, with independent streams
//! selected by the ChaCha stream counter. A `(seed, stream)` pair always
//! yields the same sequence, regardless of which other streams were drawn
//! or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ProjectRng = ChaCha8Rng;

/// Name recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64 + set_stream";

pub fn seeded(seed: u64) -> ProjectRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, stream: u64) -> ProjectRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream index for cell `(i, j)` of a table with `cols` columns. Stream 0 is
/// left to [`seeded`] users.
pub fn cell_stream(seed: u64, i: usize, j: usize, cols: usize) -> ProjectRng {
    stream(seed, 1 + (i * cols + j) as u64)
}
