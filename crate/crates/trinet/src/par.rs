//! Deterministic fork-join helper.
//!
//! Work is split into fixed-size chunks and results are collected in chunk
//! order, so the output is bit-identical no matter how many worker threads
//! run or how the scheduler interleaves them. Reductions over the returned
//! vector must simply iterate in order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Worker threads for data-parallel sections. `TRINET_WORKERS` overrides
/// the detected CPU count; results never depend on this value.
pub fn worker_count() -> usize {
    if let Ok(v) = std::env::var("TRINET_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1).min(64);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(16)
}

/// Apply `f` to fixed-size chunks of `items` (chunk index, slice, offset of
/// slice start) and return the per-chunk results in chunk order.
pub fn map_chunks<T, R, F>(items: &[T], chunk_size: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T], usize) -> R + Sync,
{
    assert!(chunk_size > 0);
    let n_chunks = items.len().div_ceil(chunk_size);
    if n_chunks == 0 {
        return Vec::new();
    }
    let workers = worker_count().min(n_chunks);
    if workers <= 1 {
        return items
            .chunks(chunk_size)
            .enumerate()
            .map(|(ci, chunk)| f(chunk, ci * chunk_size))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = (0..n_chunks).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let ci = next.fetch_add(1, Ordering::Relaxed);
                if ci >= n_chunks {
                    break;
                }
                let lo = ci * chunk_size;
                let hi = (lo + chunk_size).min(items.len());
                let result = f(&items[lo..hi], lo);
                *slots[ci].lock().expect("no poisoned slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("no poisoned slot")
                .expect("every chunk produced a result")
        })
        .collect()
}
