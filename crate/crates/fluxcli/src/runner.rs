//! Trial sharding. Each trial gets its own index, so results do not depend
//! on the number of workers.

use std::thread;

pub fn workers() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs `f(0..n)` over contiguous shards; results come back in trial order.
pub fn run_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let w = workers().min(n).max(1);
    if w == 1 {
        return (0..n as u64).map(f).collect();
    }
    let chunk = n.div_ceil(w);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = (0..w)
            .map(|k| {
                let lo = k * chunk;
                let hi = ((k + 1) * chunk).min(n);
                s.spawn(move || (lo..hi).map(|t| f(t as u64)).collect::<Vec<T>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial worker panicked"))
            .collect()
    })
}

/// Like [`run_trials`], stopping at the first error in trial order.
pub fn try_trials<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync,
{
    run_trials(n, f).into_iter().collect()
}
