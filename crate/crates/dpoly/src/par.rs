//! Data-parallel helpers with a sequential fallback. Every helper preserves
//! input order in its output, so results are identical with the `parallel`
//! feature on or off.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over an index range.
pub(crate) fn map_indexed<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Order-preserving filter-map over a slice.
pub(crate) fn filter_map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().filter_map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().filter_map(f).collect()
    }
}

/// First index in `0..len` where `f` returns `Some`, together with the value.
/// Deterministic: the lowest such index wins regardless of thread scheduling.
pub(crate) fn first_some<U, F>(len: usize, f: F) -> Option<(usize, U)>
where
    U: Send,
    F: Fn(usize) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len)
            .into_par_iter()
            .filter_map(|i| f(i).map(|u| (i, u)))
            .min_by_key(|(i, _)| *i)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).find_map(|i| f(i).map(|u| (i, u)))
    }
}
