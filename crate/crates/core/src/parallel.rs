//! Deterministic data-parallel Monte Carlo driver.
//!
//! Replicate `i` always draws from its own ChaCha8 stream `(seed, i)`, and
//! replicates are accumulated in fixed blocks of [`BLOCK`] whose partial sums
//! are combined in block order. The result is therefore bit-identical for
//! any number of worker threads, and identical to the sequential build.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Replicates per reduction block.
pub const BLOCK: usize = 512;

/// The random stream owned by replicate `index`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Running sums for `k` channels of a Monte Carlo estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl Moments {
    pub fn new(k: usize) -> Self {
        Moments {
            n: 0,
            sum: vec![0.0; k],
            sum_sq: vec![0.0; k],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        for ((s, q), v) in self.sum.iter_mut().zip(self.sum_sq.iter_mut()).zip(x) {
            *s += v;
            *q += v * v;
        }
    }

    fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
    }
}

fn block_ranges(n: u64) -> Vec<(u64, u64)> {
    let b = BLOCK as u64;
    (0..n.div_ceil(b))
        .map(|k| (k * b, ((k + 1) * b).min(n)))
        .collect()
}

/// Runs `n` replicates of `f`, each writing `k` channel values into the
/// provided slice, and returns the per-channel sums and sums of squares.
/// The first error raised by any replicate (in replicate order) aborts.
pub fn mc_moments<F>(n: u64, k: usize, seed: u64, f: F) -> crate::Result<Moments>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [f64]) -> crate::Result<()> + Sync,
{
    let run_block = |&(lo, hi): &(u64, u64)| -> crate::Result<Moments> {
        let mut m = Moments::new(k);
        let mut buf = vec![0.0; k];
        for i in lo..hi {
            let mut rng = replicate_rng(seed, i);
            f(&mut rng, i, &mut buf)?;
            m.push(&buf);
        }
        Ok(m)
    };
    let blocks = block_ranges(n);
    #[cfg(feature = "parallel")]
    let partial: Vec<crate::Result<Moments>> = blocks.par_iter().map(run_block).collect();
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<crate::Result<Moments>> = blocks.iter().map(run_block).collect();
    let mut total = Moments::new(k);
    for p in partial {
        total.merge(&p?);
    }
    Ok(total)
}

/// Maps `f` over replicates `0..n`, preserving replicate order.
pub fn mc_map<T, F>(n: u64, seed: u64, f: F) -> crate::Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> crate::Result<T> + Sync,
{
    let one = |i: u64| {
        let mut rng = replicate_rng(seed, i);
        f(&mut rng, i)
    };
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..n).map(one).collect();
}

/// Maps a deterministic function over a slice of inputs, preserving order.
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

/// Runs `f` with at most `threads` workers (all cores when `None`). A no-op
/// in the sequential build.
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> crate::Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            if t == 0 {
                return Err(crate::Error::invalid("thread count must be at least 1"));
            }
            b = b.num_threads(t);
        }
        let pool = b
            .build()
            .map_err(|e| crate::Error::invalid(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        if threads == Some(0) {
            return Err(crate::Error::invalid("thread count must be at least 1"));
        }
        Ok(f())
    }
}
