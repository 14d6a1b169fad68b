use std::fmt;

use crate::error::{Error, Result};

/// Pointwise membership, the input side of [`restrict`].
pub trait Membership {
    fn contains(&self, n: u64) -> bool;
}

impl<F: Fn(u64) -> bool> Membership for F {
    fn contains(&self, n: u64) -> bool {
        self(n)
    }
}

/// A set of integers inside the inclusive window `[lo, hi]`.
///
/// Bit `i` of `bits` stands for `lo + i`. Membership is only certified on
/// `[exact_from, hi]`; below that the bits are a lower bound.
#[derive(Clone, PartialEq, Eq)]
pub struct WindowSet {
    lo: u64,
    hi: u64,
    exact_from: u64,
    bits: Vec<u64>,
}

pub(crate) fn words_for(len: u64) -> usize {
    len.div_ceil(64) as usize
}

impl WindowSet {
    pub fn empty(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvertedWindow { lo, hi });
        }
        if hi - lo >= 1 << 40 {
            return Err(Error::SizeGuard(format!("window [{lo}, {hi}] is too wide")));
        }
        Ok(WindowSet {
            lo,
            hi,
            exact_from: lo,
            bits: vec![0; words_for(hi - lo + 1)],
        })
    }

    pub fn from_members(lo: u64, hi: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut ws = Self::empty(lo, hi)?;
        for m in members {
            if m < lo || m > hi {
                return Err(Error::invalid(format!("{m} lies outside [{lo}, {hi}]")));
            }
            ws.insert(m);
        }
        Ok(ws)
    }

    pub(crate) fn from_raw(lo: u64, hi: u64, exact_from: u64, bits: Vec<u64>) -> Self {
        debug_assert_eq!(bits.len(), words_for(hi - lo + 1));
        let mut ws = WindowSet {
            lo,
            hi,
            exact_from,
            bits,
        };
        ws.mask_tail();
        ws
    }

    fn mask_tail(&mut self) {
        let len = self.hi - self.lo + 1;
        let r = (len % 64) as u32;
        if r != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn exact_from(&self) -> u64 {
        self.exact_from
    }

    /// True when membership is certified on the whole window.
    pub fn is_exact(&self) -> bool {
        self.exact_from == self.lo
    }

    pub(crate) fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub(crate) fn insert(&mut self, n: u64) {
        let i = n - self.lo;
        self.bits[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub(crate) fn remove(&mut self, n: u64) {
        if n >= self.lo && n <= self.hi {
            let i = n - self.lo;
            self.bits[(i / 64) as usize] &= !(1 << (i % 64));
        }
    }

    /// Membership; values outside the window are reported absent.
    pub fn contains(&self, n: u64) -> bool {
        if n < self.lo || n > self.hi {
            return false;
        }
        let i = n - self.lo;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.bits.iter().enumerate().flat_map(move |(wi, &w)| {
            crate::sieve::BitIter::new(w).map(move |b| lo + wi as u64 * 64 + b as u64)
        })
    }

    pub fn members(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Same members, certified only from `exact_from` on.
    pub fn with_exact_from(mut self, exact_from: u64) -> Self {
        self.exact_from = exact_from.clamp(self.lo, self.hi + 1);
        self
    }

    /// Sub-window `[lo, hi]`, which must lie inside this one.
    pub fn crop(&self, lo: u64, hi: u64) -> Result<WindowSet> {
        if lo > hi {
            return Err(Error::InvertedWindow { lo, hi });
        }
        if lo < self.lo || hi > self.hi {
            return Err(Error::WindowMismatch {
                lo,
                hi,
                other_lo: self.lo,
                other_hi: self.hi,
            });
        }
        let mut out = WindowSet::empty(lo, hi)?;
        for m in self.iter().skip_while(|&m| m < lo).take_while(|&m| m <= hi) {
            out.insert(m);
        }
        out.exact_from = self.exact_from.clamp(lo, hi + 1);
        Ok(out)
    }

    fn same_window(&self, other: &WindowSet) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::WindowMismatch {
                lo: self.lo,
                hi: self.hi,
                other_lo: other.lo,
                other_hi: other.hi,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &WindowSet) -> Result<WindowSet> {
        self.same_window(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        Ok(WindowSet {
            lo: self.lo,
            hi: self.hi,
            exact_from: self.exact_from.max(other.exact_from),
            bits,
        })
    }

    pub fn set_minus(&self, other: &WindowSet) -> Result<WindowSet> {
        self.same_window(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect();
        Ok(WindowSet {
            lo: self.lo,
            hi: self.hi,
            exact_from: self.exact_from.max(other.exact_from),
            bits,
        })
    }

    /// Removes a finite list of values; values outside the window are ignored.
    pub fn without(&self, values: impl IntoIterator<Item = u64>) -> WindowSet {
        let mut out = self.clone();
        for v in values {
            out.remove(v);
        }
        out
    }

    /// `self ⊆ other`, compared on the common part of both windows.
    pub fn is_subset_of(&self, other: &WindowSet) -> bool {
        self.first_not_in(other).is_none()
    }

    /// Smallest member of `self` inside `other`'s window that `other` lacks.
    pub fn first_not_in(&self, other: &WindowSet) -> Option<u64> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        self.iter()
            .skip_while(|&m| m < lo)
            .take_while(|&m| m <= hi)
            .find(|&m| !other.contains(m))
    }

    /// Smallest value of `[lo, hi]` where the two sets disagree.
    pub fn first_difference(&self, other: &WindowSet) -> Result<Option<u64>> {
        self.same_window(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .enumerate()
            .find(|(_, (a, b))| *a != *b)
            .map(|(wi, (a, b))| self.lo + wi as u64 * 64 + (a ^ b).trailing_zeros() as u64))
    }

    /// `n ∗ self`: members scaled by `n`, kept while `n·c ≤ hi`.
    pub fn dilation(&self, n: u64) -> Result<WindowSet> {
        if n == 0 {
            return Err(Error::invalid("dilation factor must be at least 1"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let lo = self.lo.saturating_mul(n);
        if lo > self.hi {
            let mut empty = WindowSet::empty(self.hi, self.hi)?;
            empty.exact_from = self.hi + 1;
            return Ok(empty);
        }
        let mut out = WindowSet::empty(lo, self.hi)?;
        for c in self.iter() {
            match c.checked_mul(n) {
                Some(v) if v <= self.hi => out.insert(v),
                _ => break,
            }
        }
        out.exact_from = self.exact_from.saturating_mul(n).clamp(lo, self.hi + 1);
        Ok(out)
    }

    /// `{a − b : a ∈ self, b ∈ other}`, sorted and deduplicated.
    pub fn difference_set(&self, other: &WindowSet) -> Vec<i64> {
        let b: Vec<u64> = other.members();
        let mut out: Vec<i64> = self
            .iter()
            .flat_map(|a| b.iter().map(move |&b| a as i64 - b as i64))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl fmt::Debug for WindowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<u64> = self.iter().take(16).collect();
        let more = if self.len() > 16 { ", .." } else { "" };
        write!(
            f,
            "WindowSet[{}, {}; exact from {}]{:?}{}",
            self.lo, self.hi, self.exact_from, shown, more
        )
    }
}

/// `set ∩ [lo, hi]` as an exact window.
pub fn restrict<M: Membership + ?Sized>(set: &M, lo: u64, hi: u64) -> Result<WindowSet> {
    let mut ws = WindowSet::empty(lo, hi)?;
    for n in lo..=hi {
        if set.contains(n) {
            ws.insert(n);
        }
    }
    Ok(ws)
}
