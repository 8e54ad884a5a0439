//! Seeded random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream` of a run seeded with `seed`.
///
/// Streams of the same seed are independent and do not depend on how many
/// threads consume them.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
