//! Execution policy for the data-parallel kernels.
//!
//! Every hot loop in the crate (sieve segments, sumset chunks, strata
//! classification, per-k sweeps) goes through [`Exec`]. With the `parallel`
//! feature disabled, [`Exec::Parallel`] silently degrades to the sequential
//! path, so callers never need their own `cfg` switches.
//!
//! All helpers return results in index order regardless of policy, which is
//! what makes reports byte-identical across thread counts.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `f(i)` for every `i` in `range`, collected in order.
    pub fn map_range<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// `f(item)` for every item, collected in order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Runs `f(chunk_index, chunk)` over disjoint mutable chunks of `data`.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk_len = chunk_len.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }

    /// Smallest `i` in `range` with `pred(i)`, or `None`.
    ///
    /// The parallel path uses `find_first`, so the answer is the same one the
    /// sequential scan would give.
    pub fn find_first<F>(self, range: Range<usize>, pred: F) -> Option<usize>
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().find_first(|&i| pred(i));
        }
        range.into_iter().find(|&i| pred(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map_range(0..10, |i| i * i)[9], 81);
            assert_eq!(exec.find_first(0..1000, |i| i % 97 == 96), Some(96));
            assert_eq!(exec.find_first(0..10, |_| false), None);
            let mut v = vec![0u32; 100];
            exec.for_each_chunk_mut(&mut v, 7, |ci, c| {
                for x in c.iter_mut() {
                    *x = ci as u32;
                }
            });
            assert_eq!(v[99], 14);
        }
    }
}
