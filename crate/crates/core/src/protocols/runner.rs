use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::RandomSource;

/// Splits `n` events into blocks of `block_size`; block `i` draws from
/// substream `i` of `master`. Output order is block order, so results are
/// identical for every worker count.
pub fn run_blocks<T, F>(n: u64, block_size: u64, workers: usize, master: &RandomSource, block: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64, &mut RandomSource, &mut Vec<T>) + Sync,
{
    if block_size == 0 {
        return Err(Error::config("block_size", "must be at least 1"));
    }
    if workers == 0 {
        return Err(Error::config("workers", "must be at least 1"));
    }
    let blocks = n.div_ceil(block_size);
    let one = |i: u64| {
        let start = i * block_size;
        let len = block_size.min(n - start);
        let mut rng = master.substream(i);
        let mut out = Vec::with_capacity(len as usize);
        block(start, len, &mut rng, &mut out);
        out
    };
    let parts: Vec<Vec<T>> = if workers == 1 {
        (0..blocks).map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?;
        pool.install(|| (0..blocks).into_par_iter().map(one).collect())
    };
    Ok(parts.into_iter().flatten().collect())
}
