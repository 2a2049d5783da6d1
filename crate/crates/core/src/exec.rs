//! Data-parallel helpers with a sequential fallback.
//!
//! Everything that fans out over independent work items (files, methods,
//! search targets, benchmark entries) goes through [`map`]. With the
//! `parallel` feature disabled, [`Parallelism::Parallel`] silently degrades to
//! sequential iteration so callers never need their own `cfg` blocks.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Parallelism {
    /// True when `Parallel` actually runs on a thread pool in this build.
    pub const fn is_available() -> bool {
        cfg!(feature = "parallel")
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        if Self::is_available() {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, U, F>(items: &[T], mode: Parallelism, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}
