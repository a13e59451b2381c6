use anyhow::Context;
use cuefield::rng::{self, StreamRng};
use rayon::prelude::*;

/// Seed and worker pool shared by the experiments.
///
/// Work is always cut into the same streams whatever the worker count, and
/// results come back in stream order, so output does not depend on `workers`.
pub struct RunContext {
    pub seed: u64,
    pub workers: usize,
    pool: rayon::ThreadPool,
}

impl RunContext {
    pub fn new(seed: u64, workers: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().context("building worker pool")?;
        Ok(RunContext { seed, workers, pool })
    }

    /// `f(index, rng)` for streams `0..count` of the space `tag`.
    pub fn map_streams<T, F>(&self, tag: &str, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &mut StreamRng) -> T + Sync + Send,
    {
        let seed = self.seed;
        self.pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut r = rng::stream(seed, tag, i as u32);
                    f(i, &mut r)
                })
                .collect()
        })
    }

    /// Splits `total` samples into fixed chunks of at most `chunk`, one stream
    /// each, and returns the per-chunk results.
    pub fn map_chunks<T, F>(&self, tag: &str, total: u64, chunk: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut StreamRng) -> T + Sync + Send,
    {
        let sizes = chunk_sizes(total, chunk);
        self.map_streams(tag, sizes.len(), |i, r| f(sizes[i], r))
    }

    /// Runs `f` inside the pool, for nested parallel work.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        self.pool.install(f)
    }
}

pub fn chunk_sizes(total: u64, chunk: u64) -> Vec<u64> {
    let chunk = chunk.max(1);
    let mut v = vec![chunk; (total / chunk) as usize];
    if !total.is_multiple_of(chunk) {
        v.push(total % chunk);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_do_not_depend_on_workers() {
        let run = |w| {
            RunContext::new(5, w).unwrap().map_chunks("t", 1050, 100, |n, r| (0..n).map(|_| r.random::<f64>()).sum::<f64>())
        };
        assert_eq!(run(1), run(3));
        assert_eq!(chunk_sizes(1050, 100).len(), 11);
        assert_eq!(chunk_sizes(0, 100).len(), 0);
    }
}
