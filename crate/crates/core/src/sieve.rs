//! Segmented sieve of Eratosthenes over odd integers, with `π(x)` checkpoints
//! and 1-based access to the k-th prime and the k-th odd composite.
//!
//! Storage is one bit per odd integer (bit `i` stands for `2i + 1`), so a
//! table to `limit` costs `limit / 16` bytes. Construction runs in segments of
//! [`SEGMENT_BITS`] odd entries; each segment only touches its own words, so
//! segments are sieved independently (and in parallel under [`Exec::Parallel`]).

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Odd entries per sieve segment.
pub const SEGMENT_BITS: usize = 1 << 20;
/// Integers per `π` checkpoint block.
pub const CHECKPOINT_STRIDE: u64 = 1 << 16;
/// Largest accepted sieve limit.
pub const MAX_LIMIT: u64 = 1 << 40;

const WORDS_PER_BLOCK: usize = (CHECKPOINT_STRIDE / 128) as usize;

#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    /// Bit `i` set iff `2i + 1` is prime.
    odd_bits: Vec<u64>,
    /// `checkpoints[j]` = number of odd primes below `j * CHECKPOINT_STRIDE`.
    checkpoints: Vec<u64>,
}

/// Builds a table answering primality and counting queries on `[2, limit]`.
pub fn build_table(limit: u64) -> Result<PrimeTable> {
    PrimeTable::new(limit, Exec::default())
}

impl PrimeTable {
    pub fn new(limit: u64, exec: Exec) -> Result<Self> {
        if limit < 9 {
            return Err(Error::LimitTooSmall(limit));
        }
        if limit > MAX_LIMIT {
            return Err(Error::LimitTooLarge(limit));
        }
        let nbits = limit.div_ceil(2) as usize;
        let nwords = nbits.div_ceil(64);
        let base = small_odd_primes(isqrt(limit));
        let mut odd_bits = vec![0u64; nwords];
        exec.for_each_chunk_mut(&mut odd_bits, SEGMENT_BITS / 64, |seg, words| {
            sieve_segment(seg * SEGMENT_BITS, words, &base, nbits);
        });

        let blocks = (limit / CHECKPOINT_STRIDE + 2) as usize;
        let mut checkpoints = Vec::with_capacity(blocks);
        let mut acc = 0u64;
        for j in 0..blocks {
            checkpoints.push(acc);
            let lo = j * WORDS_PER_BLOCK;
            let hi = ((j + 1) * WORDS_PER_BLOCK).min(nwords);
            if lo < hi {
                acc += odd_bits[lo..hi]
                    .iter()
                    .map(|w| w.count_ones() as u64)
                    .sum::<u64>();
            }
        }
        Ok(PrimeTable {
            limit,
            odd_bits,
            checkpoints,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, what: &'static str, value: u64) -> Result<()> {
        if value > self.limit {
            Err(Error::BeyondLimit {
                what,
                value,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn odd_bit(&self, n: u64) -> bool {
        let i = (n / 2) as usize;
        (self.odd_bits[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Primality of `n`; `n > limit` is an error.
    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check("value", n)?;
        Ok(self.is_prime_unchecked(n))
    }

    /// Primality without the range check; the caller guarantees `n <= limit`.
    #[inline]
    pub fn is_prime_unchecked(&self, n: u64) -> bool {
        if n % 2 == 0 {
            n == 2
        } else {
            self.odd_bit(n)
        }
    }

    /// True iff `n` is an odd composite (odd, at least 9, not prime).
    pub fn is_odd_composite(&self, n: u64) -> Result<bool> {
        self.check("value", n)?;
        Ok(n % 2 == 1 && n >= 9 && !self.odd_bit(n))
    }

    /// Number of odd primes `<= x`.
    fn odd_pi(&self, x: u64) -> u64 {
        if x < 3 {
            return 0;
        }
        let last = ((x - 1) / 2) as usize;
        let block = (x / CHECKPOINT_STRIDE) as usize;
        let first_word = block * WORDS_PER_BLOCK;
        let last_word = last / 64;
        let mut count = self.checkpoints[block];
        if last < first_word * 64 {
            return count;
        }
        for w in &self.odd_bits[first_word..last_word] {
            count += w.count_ones() as u64;
        }
        let shift = last % 64;
        let mask = if shift == 63 {
            u64::MAX
        } else {
            (1u64 << (shift + 1)) - 1
        };
        count + (self.odd_bits[last_word] & mask).count_ones() as u64
    }

    /// `π(x)`, the number of primes `<= x`.
    pub fn pi(&self, x: u64) -> Result<u64> {
        self.check("argument of pi", x)?;
        Ok(self.odd_pi(x) + u64::from(x >= 2))
    }

    pub fn prime_count(&self) -> u64 {
        self.odd_pi(self.limit) + 1
    }

    /// The k-th prime, 1-based (`nth_prime(1) == 2`).
    pub fn nth_prime(&self, k: u64) -> Result<u64> {
        let max = self.prime_count();
        if k == 0 || k > max {
            return Err(Error::IndexOutOfRange { index: k, max });
        }
        if k == 1 {
            return Ok(2);
        }
        // Rank among odd primes, 1-based.
        let target = k - 1;
        let block = self.checkpoints.partition_point(|&c| c < target) - 1;
        let mut seen = self.checkpoints[block];
        let mut w = block * WORDS_PER_BLOCK;
        loop {
            let ones = self.odd_bits[w].count_ones() as u64;
            if seen + ones >= target {
                let mut word = self.odd_bits[w];
                for _ in 0..(target - seen - 1) {
                    word &= word - 1;
                }
                let bit = w * 64 + word.trailing_zeros() as usize;
                return Ok(2 * bit as u64 + 1);
            }
            seen += ones;
            w += 1;
        }
    }

    /// Number of odd composites `<= x`: odd numbers in `[3, x]` minus odd primes.
    pub(crate) fn odd_composite_count(&self, x: u64) -> u64 {
        if x < 3 {
            0
        } else {
            (x - 1) / 2 - self.odd_pi(x)
        }
    }

    /// Ascending iterator over all primes `<= limit`.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2).chain(self.odd_primes())
    }

    /// Ascending iterator over odd primes `<= limit`.
    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        let limit = self.limit;
        self.odd_bits
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| 2 * (wi as u64 * 64 + b as u64) + 1))
            .take_while(move |&p| p <= limit)
    }

    /// Ascending iterator over odd composites `<= limit`.
    pub fn odd_composites(&self) -> impl Iterator<Item = u64> + '_ {
        (9..=self.limit).step_by(2).filter(|&n| !self.odd_bit(n))
    }

    /// Odd primes `<= x` as a vector (x clamped to the limit).
    pub fn odd_primes_to(&self, x: u64) -> Vec<u64> {
        let x = x.min(self.limit);
        self.odd_primes().take_while(|&p| p <= x).collect()
    }

    /// Odd composites `<= x` as a vector (x clamped to the limit).
    pub fn odd_composites_to(&self, x: u64) -> Vec<u64> {
        let x = x.min(self.limit);
        (9..=x).step_by(2).filter(|&n| !self.odd_bit(n)).collect()
    }

    /// Membership of odd `n >= 3` in `S_{>=p}`: every prime factor is `>= p`.
    ///
    /// Equivalent to "no prime below `p` divides `n`", so only primes `< p`
    /// are tried and `n` itself may exceed the sieve limit.
    pub fn is_rough(&self, n: u64, p: u64) -> Result<bool> {
        if n % 2 == 0 || n < 3 {
            return Err(Error::invalid(format!(
                "is_rough expects an odd n >= 3, got {n}"
            )));
        }
        if p == 2 {
            return Err(Error::invalid(
                "is_rough with p = 2; S_{>=2} is all of Z_{>=2}",
            ));
        }
        if !self.is_prime(p)? {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(self.odd_primes().take_while(|&q| q < p).all(|q| n % q != 0))
    }
}

/// 1-based odd composite index `ĉ_k` and its inverse over a [`PrimeTable`].
#[derive(Debug, Clone, Copy)]
pub struct CompositeIndex<'a> {
    table: &'a PrimeTable,
}

impl<'a> CompositeIndex<'a> {
    pub fn new(table: &'a PrimeTable) -> Self {
        CompositeIndex { table }
    }

    pub fn table(&self) -> &'a PrimeTable {
        self.table
    }

    /// Number of odd composites `<= limit`.
    pub fn len(&self) -> u64 {
        self.table.odd_composite_count(self.table.limit)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ĉ_k`, the k-th odd composite (`nth(1) == 9`).
    pub fn nth(&self, k: u64) -> Result<u64> {
        let max = self.len();
        if k == 0 || k > max {
            return Err(Error::IndexOutOfRange { index: k, max });
        }
        // Smallest x with count(x) >= k; that x is the k-th odd composite.
        let (mut lo, mut hi) = (9u64, self.table.limit);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.table.odd_composite_count(mid) >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// Inverse of [`nth`](Self::nth): `rank(ĉ_k) == k`.
    pub fn rank(&self, c: u64) -> Result<u64> {
        if !self.table.is_odd_composite(c)? {
            return Err(Error::invalid(format!("{c} is not an odd composite")));
        }
        Ok(self.table.odd_composite_count(c))
    }

    /// `C^o_{>1}(k) = {ĉ_1, …, ĉ_k}`.
    pub fn first(&self, k: u64) -> Result<Vec<u64>> {
        let last = self.nth(k)?;
        Ok(self.table.odd_composites_to(last))
    }
}

pub(crate) struct BitIter(u64);

impl BitIter {
    pub(crate) fn new(w: u64) -> Self {
        BitIter(w)
    }
}

impl Iterator for BitIter {
    type Item = u32;
    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            let b = self.0.trailing_zeros();
            self.0 &= self.0 - 1;
            Some(b)
        }
    }
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn small_odd_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in (3..=n).step_by(2) {
        if !composite[i] {
            out.push(i as u64);
            for j in (i * i..=n).step_by(2 * i) {
                composite[j] = true;
            }
        }
    }
    out
}

/// Sieves the odd entries `[first_bit, first_bit + 64 * words.len())`.
fn sieve_segment(first_bit: usize, words: &mut [u64], base: &[u64], nbits: usize) {
    words.fill(u64::MAX);
    let end_bit = (first_bit + words.len() * 64).min(nbits);
    if first_bit == 0 {
        words[0] &= !1; // 1 is not prime
    }
    let hi_value = 2 * end_bit as u64 - 1;
    for &p in base {
        let p2 = p * p;
        if p2 > hi_value {
            break;
        }
        let lo_value = 2 * first_bit as u64 + 1;
        let mut m = if p2 >= lo_value {
            p2
        } else {
            let r = lo_value.div_ceil(p) * p;
            if r % 2 == 0 {
                r + p
            } else {
                r
            }
        };
        while m <= hi_value {
            let b = (m / 2) as usize - first_bit;
            words[b / 64] &= !(1u64 << (b % 64));
            m += 2 * p;
        }
    }
    // Clear bits past the last valid entry.
    let valid = end_bit.saturating_sub(first_bit);
    for (wi, w) in words.iter_mut().enumerate() {
        let start = wi * 64;
        if start >= valid {
            *w = 0;
        } else if start + 64 > valid {
            *w &= (1u64 << (valid - start)) - 1;
        }
    }
}
