//! Seeded random streams.
//!
//! Every sampler uses ChaCha8, a counter-based generator. A `(seed, stream)`
//! pair addresses an independent keystream, so streams for different purposes
//! (graph edges, side symbols, tree trials) and for different trial indices are
//! derived from one master seed by number rather than by advancing shared
//! state. Parallel work split into fixed-size blocks therefore produces the same
//! numbers for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream purposes. The purpose occupies the top 16 bits of the stream id.
pub mod purpose {
    pub const GRAPH: u64 = 1;
    pub const SIDE: u64 = 2;
    pub const TREE: u64 = 3;
    pub const TREE_ROOTS: u64 = 4;
    pub const VOTING: u64 = 5;
}

/// Generator for stream `index` of `purpose` under `seed`.
pub fn stream(seed: u64, purpose: u64, index: u64) -> StreamRng {
    debug_assert!(index < (1 << 48));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) | index);
    rng
}
