//! Deterministic execution strategies for the enumeration-heavy kernels.
//!
//! Every merge operation passed through this module must be associative, and
//! ties must be resolved by a total order on the carried data (not by arrival
//! order). Under that contract the parallel path returns bit-identical
//! results to the sequential one for any thread count, so reports and frozen
//! test values do not depend on the machine running them.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy. Without the `parallel` feature, `Parallel` degrades to
/// the sequential path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

/// The strategy the build was compiled to prefer.
pub fn default_parallelism() -> Parallelism {
    if cfg!(feature = "parallel") {
        Parallelism::Parallel
    } else {
        Parallelism::Sequential
    }
}

/// Map `map` over the range and combine with `merge`.
pub fn fold_range<R, F, G, I>(
    par: Parallelism,
    range: Range<u64>,
    map: F,
    merge: G,
    identity: I,
) -> R
where
    R: Send,
    F: Fn(u64) -> R + Sync,
    G: Fn(R, R) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par == Parallelism::Parallel {
        return range.into_par_iter().map(&map).reduce(&identity, &merge);
    }
    let _ = par;
    range.map(map).fold(identity(), merge)
}

/// Apply `f` to each item, preserving input order in the output.
pub fn run_instances<T, R, F>(par: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    if par == Parallelism::Parallel {
        return items.par_iter().map(&f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}
