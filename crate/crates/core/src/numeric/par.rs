//! Deterministic scoped-thread parallel map.
//!
//! Work items are distributed round-robin and every result lands in its own
//! slot, so the output is identical for any thread count.

/// Maps `f` over `0..n`, using at most `threads` workers.
pub fn par_map<R: Send>(n: usize, threads: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let threads = threads.max(1).min(n.max(1));
    if threads <= 1 || n <= 1 {
        return (0..n).map(&f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    {
        let chunks: Vec<(usize, &mut [Option<R>])> = slots.chunks_mut(1).enumerate().collect();
        let queue = std::sync::Mutex::new(chunks.into_iter());
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let item = queue.lock().unwrap().next();
                    match item {
                        Some((i, slot)) => slot[0] = Some(f(i)),
                        None => break,
                    }
                });
            }
        });
    }
    slots.into_iter().map(|s| s.unwrap()).collect()
}
