//! Deterministic splitting of an index space across workers.

use std::ops::Range;
use std::thread;

/// Worker `worker` of `workers` receives this contiguous slice of `0..total`.
/// Slices are disjoint, cover the whole range and differ in length by at most one.
pub fn slice_bounds(total: u64, worker: usize, workers: usize) -> Range<u64> {
    assert!(workers > 0 && worker < workers, "worker {worker} of {workers}");
    let w = workers as u128;
    let start = (total as u128 * worker as u128 / w) as u64;
    let end = (total as u128 * (worker as u128 + 1) / w) as u64;
    start..end
}

/// Runs `job` over each worker slice of `0..total` on scoped threads and folds
/// the partial results in worker order. The result depends only on `total`
/// and `job`, never on `workers`, as long as `merge` is associative and the
/// partials of adjacent slices combine like one slice would.
pub fn map_reduce<T, J, M>(total: u64, workers: usize, job: J, merge: M) -> T
where
    T: Send + Default,
    J: Fn(Range<u64>) -> T + Sync,
    M: Fn(T, T) -> T,
{
    let workers = workers.max(1).min(total.max(1) as usize);
    if workers == 1 {
        return job(0..total);
    }
    let partials: Vec<T> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let job = &job;
                s.spawn(move || job(slice_bounds(total, w, workers)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("enumeration worker panicked")).collect()
    });
    partials.into_iter().fold(T::default(), merge)
}

/// Number of workers to use when none is configured.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}
