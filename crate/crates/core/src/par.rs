// SPDX-License-Identifier: Apache-2.0

//! Execution strategy for the data-parallel loops (candidate enumeration and
//! sweep cells).
//!
//! Every reduction here is order-independent by construction: work is split
//! into fixed chunks, each chunk is folded sequentially and the partial
//! results are combined with an associative, deterministic `combine`. Serial
//! and parallel runs therefore agree bit-for-bit.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default number of enumeration ranks folded by one task.
pub const CHUNK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    /// Uses the rayon global pool. Without the `parallel` feature this
    /// behaves exactly like `Sequential`.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Fold `0..total` in chunks of `chunk` ranks and combine the per-chunk results.
pub fn fold_chunks<T, F, C>(exec: Exec, total: u64, chunk: u64, fold: F, combine: C) -> Option<T>
where
    T: Send,
    F: Fn(Range<u64>) -> Option<T> + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = total.div_ceil(chunk);
    let range_of = |c: u64| (c * chunk)..((c + 1) * chunk).min(total);
    let merge = |a: Option<T>, b: Option<T>| match (a, b) {
        (Some(a), Some(b)) => Some(combine(a, b)),
        (a, None) => a,
        (None, b) => b,
    };

    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..chunks)
            .into_par_iter()
            .map(|c| fold(range_of(c)))
            .reduce(|| None, merge);
    }
    let _ = exec;
    (0..chunks).map(|c| fold(range_of(c))).fold(None, merge)
}

/// Map each item, keeping input order in the output.
pub fn map_ordered<I, O, F>(exec: Exec, items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(&f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
