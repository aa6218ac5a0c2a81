//! Index-sharded execution with counter-based random streams.
//!
//! Work items `0..n` are cut into fixed-size chunks. Chunk `k` owns the ChaCha
//! streams derived from `(seed, k)`, so results depend only on `(seed, n)` and
//! never on how many worker threads process the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::Range;

/// Number of work items that share one random stream.
pub const CHUNK: usize = 1024;

/// Purpose tag folded into the stream id so that independent consumers of the
/// same seed (measure sampling, Brownian walks, ...) never share randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Sampling = 0,
    Walk = 1,
    Auxiliary = 2,
}

pub fn stream_rng(seed: u64, chunk: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((chunk as u64) * 4 + stream as u64);
    rng
}

/// Run `f(chunk_index, item_range)` over all chunks of `0..n` and return the
/// per-chunk results in chunk order.
pub fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Range<usize>) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let range = move |k: usize| k * CHUNK..((k + 1) * CHUNK).min(n);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(|k| f(k, range(k))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(|k| f(k, range(k))).collect()
    }
}

/// [`map_chunks`] followed by concatenation of per-chunk vectors.
pub fn collect_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Range<usize>) -> Vec<T> + Sync + Send,
{
    let parts = map_chunks(n, f);
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part);
    }
    out
}
