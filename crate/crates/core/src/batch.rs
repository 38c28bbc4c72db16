//! Data-parallel helpers with a sequential fallback.
//!
//! The heavy inner loops (multi-start root searches, trajectory batches, map
//! enumeration) fan out through [`map`]. With the `parallel` feature enabled
//! (the default) work is dispatched through rayon; without it, or with
//! [`ExecMode::Sequential`], the same closures run on the calling thread.
//! Output order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for batch operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon-backed; equal to `Sequential` when the `parallel` feature is off.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `f` over `items`, preserving input order.
pub fn map<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => items.into_iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u64> = (0..100).collect();
        let seq = map(ExecMode::Sequential, xs.clone(), |x| x * x);
        let par = map(ExecMode::Parallel, xs, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[10], 100);
    }
}
