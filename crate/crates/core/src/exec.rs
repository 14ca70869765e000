//! Execution policy for the data-parallel inner loops.
//!
//! Every parallel entry point takes an [`Exec`]. With the `parallel` feature
//! disabled, [`Exec::Parallel`] silently runs the sequential path, so results
//! never depend on the feature set or the thread schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
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

    /// Order-preserving map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..len`.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Fold `0..len` into per-worker accumulators and combine them. `combine`
    /// must be associative and commutative for the result to be
    /// schedule-independent.
    pub fn fold_range<A, F, C, I>(self, len: usize, init: I, fold: F, combine: C) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, usize) -> A + Sync + Send,
        C: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..len)
                .into_par_iter()
                .fold(&init, &fold)
                .reduce(&init, &combine);
        }
        let _ = &combine;
        (0..len).fold(init(), fold)
    }
}
