//! Execution policy for the data-parallel kernels.
//!
//! Every hot loop (diagonal construction, layer application, reductions,
//! restarts) goes through the helpers here. With the `parallel` feature the
//! [`Parallelism::Rayon`] variant dispatches to rayon; without it only the
//! sequential path exists. Reductions always use fixed-size chunks summed in
//! order, so both paths return bit-identical results.

/// Elements per chunk for chunked reductions and element-wise kernels.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// Applies `f(chunk_index, chunk)` to consecutive chunks of `data`.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Send + Sync,
    {
        let chunk = chunk.max(1);
        match self {
            Parallelism::Sequential => data
                .chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
            #[cfg(feature = "parallel")]
            Parallelism::Rayon => {
                use rayon::prelude::*;
                data.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(i, c)| f(i, c))
            }
        }
    }

    /// Sums `f(chunk_index, chunk)` over fixed chunks, adding partials in order.
    pub fn chunked_sum<T, F>(self, data: &[T], f: F) -> f64
    where
        T: Sync,
        F: Fn(usize, &[T]) -> f64 + Send + Sync,
    {
        let partials: Vec<f64> = match self {
            Parallelism::Sequential => data
                .chunks(CHUNK)
                .enumerate()
                .map(|(i, c)| f(i, c))
                .collect(),
            #[cfg(feature = "parallel")]
            Parallelism::Rayon => {
                use rayon::prelude::*;
                data.par_chunks(CHUNK)
                    .enumerate()
                    .map(|(i, c)| f(i, c))
                    .collect()
            }
        };
        partials.into_iter().sum()
    }

    /// Maps `f` over `0..count`, preserving order.
    pub fn map_range<R, F>(self, count: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Send + Sync,
    {
        match self {
            Parallelism::Sequential => (0..count).map(f).collect(),
            #[cfg(feature = "parallel")]
            Parallelism::Rayon => {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(f).collect()
            }
        }
    }

    /// Applies `f` to every owned item.
    pub fn for_each_item<T, F>(self, items: Vec<T>, f: F)
    where
        T: Send,
        F: Fn(T) + Send + Sync,
    {
        match self {
            Parallelism::Sequential => items.into_iter().for_each(f),
            #[cfg(feature = "parallel")]
            Parallelism::Rayon => {
                use rayon::prelude::*;
                items.into_par_iter().for_each(f)
            }
        }
    }

    /// Runs `f` with at most `workers` threads when parallel; `None` keeps the
    /// global pool.
    pub fn install<R, F>(self, workers: Option<usize>, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        match (self, workers) {
            #[cfg(feature = "parallel")]
            (Parallelism::Rayon, Some(n)) => match rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
            {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
            _ => f(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sum_matches_between_modes() {
        let data: Vec<f64> = (0..20_000).map(|i| (i as f64).sin()).collect();
        let seq = Parallelism::Sequential.chunked_sum(&data, |_, c| c.iter().sum());
        let def = Parallelism::default().chunked_sum(&data, |_, c| c.iter().sum());
        assert_eq!(seq.to_bits(), def.to_bits());
    }

    #[test]
    fn map_range_keeps_order() {
        let v = Parallelism::default().map_range(100, |i| i * 2);
        assert_eq!(v, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }
}
