//! Data-parallel driver with a sequential fallback.
//!
//! Reductions use a strict total order on candidates (score, then ordinal),
//! so results are identical whichever backend runs them.

/// A scored candidate with a tie-breaking ordinal.
#[derive(Debug, Clone)]
pub(crate) struct Scored<T> {
    pub score: f64,
    pub ordinal: u64,
    pub payload: T,
}

impl<T> Scored<T> {
    pub fn beats(&self, other: &Scored<T>) -> bool {
        self.score > other.score || (self.score == other.score && self.ordinal < other.ordinal)
    }
}

fn pick<T>(a: Option<Scored<T>>, b: Option<Scored<T>>) -> Option<Scored<T>> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.beats(&y) { x } else { y }),
        (Some(x), None) => Some(x),
        (None, y) => y,
    }
}

/// Map each item index to an optional scored candidate and keep the best.
#[cfg(feature = "parallel")]
pub(crate) fn best_over<T, F>(n: usize, f: F) -> Option<Scored<T>>
where
    T: Send,
    F: Fn(usize) -> Option<Scored<T>> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(&f).reduce(|| None, pick)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn best_over<T, F>(n: usize, f: F) -> Option<Scored<T>>
where
    T: Send,
    F: Fn(usize) -> Option<Scored<T>> + Sync + Send,
{
    (0..n).map(f).fold(None, pick)
}

/// Map each item index to a list of records and concatenate in index order.
#[cfg(feature = "parallel")]
pub(crate) fn collect_over<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(&f).flatten().collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn collect_over<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    (0..n).flat_map(f).collect()
}
