//! Counting facts about `ĉ_k` and `π(ĉ_k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sieve::PrimeTable;

fn composites_upto(primes: &PrimeTable, limit: u64) -> Result<Vec<u64>> {
    if limit > primes.limit() {
        return Err(Error::BeyondLimit {
            what: "counting limit",
            value: limit,
            limit: primes.limit(),
        });
    }
    Ok(primes.odd_composites_to(limit))
}

/// `(k, ĉ_k, π(ĉ_k))` for every `ĉ_k ≤ limit`, with `π` accumulated in one
/// pass.
fn indexed_pi(primes: &PrimeTable, limit: u64) -> Result<Vec<(u64, u64, u64)>> {
    let cs = composites_upto(primes, limit)?;
    let mut out = Vec::with_capacity(cs.len());
    let mut pi = 0u64;
    let mut x = 1u64;
    for (i, &c) in cs.iter().enumerate() {
        while x < c {
            x += 1;
            if primes.is_prime_unchecked(x) {
                pi += 1;
            }
        }
        out.push((i as u64 + 1, c, pi));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub limit: u64,
    pub checked: u64,
    /// Indices `k` where `ĉ_k ≠ 2k + 2π(ĉ_k) − 1`.
    pub violations: Vec<u64>,
}

/// `ĉ_k = 2k + 2π(ĉ_k) − 1` for every `ĉ_k ≤ limit`.
pub fn composite_identity_check(primes: &PrimeTable, limit: u64) -> Result<IdentityReport> {
    let rows = indexed_pi(primes, limit)?;
    let violations = rows
        .iter()
        .filter(|&&(k, c, pi)| c + 1 != 2 * k + 2 * pi)
        .map(|&(k, _, _)| k)
        .collect();
    Ok(IdentityReport {
        limit,
        checked: rows.len() as u64,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cor39Report {
    pub i_max: u64,
    /// Largest `n` with `π(ĉ_i) ≥ i + 2` for all `i ≤ n`.
    pub initial_run: u64,
    /// `(i, ĉ_i, π(ĉ_i))` at the first failure.
    pub first_failure: Option<(u64, u64, u64)>,
    /// Indices past the first failure where the inequality holds again.
    pub later_holds: Vec<u64>,
}

/// Scans `π(ĉ_i) ≥ i + 2` for `i ≤ i_max`.
pub fn cor39_report(primes: &PrimeTable, i_max: u64) -> Result<Cor39Report> {
    let mut initial_run = 0;
    let mut first_failure = None;
    let mut later_holds = Vec::new();
    let mut rows = indexed_pi(primes, primes.limit())?.into_iter();
    for i in 1..=i_max {
        let (_, c, pi) = rows.next().ok_or(Error::IndexOutOfRange {
            index: i,
            max: i - 1,
        })?;
        let ok = pi >= i + 2;
        match (ok, first_failure) {
            (true, None) => initial_run = i,
            (false, None) => first_failure = Some((i, c, pi)),
            (true, Some(_)) => later_holds.push(i),
            (false, Some(_)) => {}
        }
    }
    Ok(Cor39Report {
        i_max,
        initial_run,
        first_failure,
        later_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub limit: u64,
    pub k_min: u64,
    pub checked: u64,
    /// `k ≥ k_min` with `π(ĉ_k) > k − 1` or `ĉ_k > 4k − 3`.
    pub violations: Vec<u64>,
    /// `k < k_min` where the bounds fail, for reference.
    pub below_range: Vec<u64>,
}

/// `π(ĉ_k) ≤ k − 1` and `ĉ_k ≤ 4k − 3` for `k ≥ 31`.
pub fn prop310_bounds(primes: &PrimeTable, limit: u64) -> Result<BoundsReport> {
    let k_min = 31;
    let rows = indexed_pi(primes, limit)?;
    let bad = |&&(k, c, pi): &&(u64, u64, u64)| pi + 1 > k || c + 3 > 4 * k;
    let violations = rows.iter().filter(|r| r.0 >= k_min).filter(bad).map(|r| r.0).collect();
    let below_range = rows.iter().filter(|r| r.0 < k_min).filter(bad).map(|r| r.0).collect();
    Ok(BoundsReport {
        limit,
        k_min,
        checked: rows.iter().filter(|r| r.0 >= k_min).count() as u64,
        violations,
        below_range,
    })
}

/// Smallest `a < t/2` with `a` and `t − a` both odd composites.
fn distinct_composite_pair(primes: &PrimeTable, t: u64) -> Option<(u64, u64)> {
    (9..)
        .step_by(2)
        .take_while(|&a| 2 * a < t)
        .find(|&a| !primes.is_prime_unchecked(a) && !primes.is_prime_unchecked(t - a))
        .map(|a| (a, t - a))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop310Report {
    pub k_max: u64,
    /// `k ∈ [3, k_max]` with no `ĉ_i + ĉ_j = 3 + ĉ_k`, `i ≠ j`.
    pub pair_failures: Vec<u64>,
    /// `(k, ĉ_i, ĉ_j)` for the first few `k`.
    pub pair_samples: Vec<(u64, u64, u64)>,
    /// `k ∈ [3, k_max]` where `2k` is neither a sum of two distinct odd
    /// composites nor `3 + p` for an odd prime `p`.
    pub cor311_failures: Vec<u64>,
}

const SAMPLES: usize = 8;

/// Pair search for `3 + ĉ_k` and the membership test for `2k`, both over
/// `3 ≤ k ≤ k_max`.
pub fn prop310_check(primes: &PrimeTable, k_max: u64, exec: Exec) -> Result<Prop310Report> {
    if k_max < 3 {
        return Err(Error::invalid("k_max must be at least 3"));
    }
    let cs = primes.odd_composites().take(k_max as usize).collect::<Vec<_>>();
    if (cs.len() as u64) < k_max || cs[k_max as usize - 1] + 3 > primes.limit() || 2 * k_max > primes.limit() {
        return Err(Error::BeyondLimit {
            what: "composite index",
            value: k_max,
            limit: primes.limit(),
        });
    }
    let pairs: Vec<Option<(u64, u64)>> = exec.map_range(3..k_max as usize + 1, |k| {
        distinct_composite_pair(primes, 3 + cs[k - 1])
    });
    let mut pair_failures = Vec::new();
    let mut pair_samples = Vec::new();
    for (k, p) in (3..).zip(&pairs) {
        match p {
            None => pair_failures.push(k),
            Some((a, b)) if pair_samples.len() < SAMPLES => pair_samples.push((k, *a, *b)),
            Some(_) => {}
        }
    }
    let member: Vec<bool> = exec.map_range(3..k_max as usize + 1, |k| {
        let s = 2 * k as u64;
        primes.is_prime_unchecked(s - 3) || distinct_composite_pair(primes, s).is_some()
    });
    let cor311_failures = (3..).zip(&member).filter(|(_, &ok)| !ok).map(|(k, _)| k).collect();
    Ok(Prop310Report {
        k_max,
        pair_failures,
        pair_samples,
        cor311_failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cor311Bounds {
    pub limit: u64,
    /// `(m, number of k checked)` for each `m` with `13^(m+1) ≤ limit`.
    pub ranges: Vec<(u64, u64)>,
    /// `(m, k)` pairs breaking `π(ĉ_k) < k/m` or `ĉ_k < (2 + 2/m)k − 1`.
    pub violations: Vec<(u64, u64)>,
}

/// Both bounds for `ĉ_k ≥ 13^(m+1)`, in integer arithmetic.
pub fn cor311_bounds(primes: &PrimeTable, limit: u64) -> Result<Cor311Bounds> {
    let rows = indexed_pi(primes, limit)?;
    let mut ranges = Vec::new();
    let mut violations = Vec::new();
    let mut m = 1u64;
    while let Some(floor) = 13u64.checked_pow(m as u32 + 1).filter(|&f| f <= limit) {
        let mut checked = 0;
        for &(k, c, pi) in rows.iter().filter(|r| r.1 >= floor) {
            checked += 1;
            // π < k/m and c·m < (2m + 2)k − m
            if m * pi >= k || c * m + m >= (2 * m + 2) * k {
                violations.push((m, k));
            }
        }
        ranges.push((m, checked));
        m += 1;
    }
    Ok(Cor311Bounds {
        limit,
        ranges,
        violations,
    })
}

/// Margin below which a floating comparison is not trusted.
pub const FLOAT_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBoundReport {
    pub limit: u64,
    pub checked: u64,
    /// `k ≥ 31` where `k < (½ log 4k − 1)·π(ĉ_k) + 1` fails or holds by less
    /// than [`FLOAT_GUARD`].
    pub violations: Vec<u64>,
    pub min_margin: f64,
}

/// `k < (½ log(4k) − 1)·π(ĉ_k) + 1` for `k ≥ 31`.
pub fn cor311_log_bound(primes: &PrimeTable, limit: u64) -> Result<LogBoundReport> {
    let rows = indexed_pi(primes, limit)?;
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut checked = 0;
    for &(k, _, pi) in rows.iter().filter(|r| r.0 >= 31) {
        checked += 1;
        let rhs = (0.5 * (4.0 * k as f64).ln() - 1.0) * pi as f64 + 1.0;
        let margin = rhs - k as f64;
        min_margin = min_margin.min(margin);
        if margin <= FLOAT_GUARD {
            violations.push(k);
        }
    }
    Ok(LogBoundReport {
        limit,
        checked,
        violations,
        min_margin,
    })
}

/// Upper constant in `x / log x < π(x) < 1.25506·x / log x`.
pub const CHEBYSHEV_UPPER: f64 = 1.25506;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevReport {
    pub lo: u64,
    pub hi: u64,
    /// `x` where either inequality fails or holds within [`FLOAT_GUARD`].
    pub violations: Vec<u64>,
    /// Extremes of `π(x)·log x / x` over the range.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Both Chebyshev bounds for every integer `x ∈ [17, hi]`.
pub fn chebyshev_check(primes: &PrimeTable, hi: u64) -> Result<ChebyshevReport> {
    let lo = 17;
    if hi > primes.limit() {
        return Err(Error::BeyondLimit {
            what: "Chebyshev range",
            value: hi,
            limit: primes.limit(),
        });
    }
    let mut pi = primes.pi(lo - 1)?;
    let mut violations = Vec::new();
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in lo..=hi {
        if primes.is_prime_unchecked(x) {
            pi += 1;
        }
        let r = pi as f64 * (x as f64).ln() / x as f64;
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
        if r - 1.0 <= FLOAT_GUARD || CHEBYSHEV_UPPER - r <= FLOAT_GUARD {
            violations.push(x);
        }
    }
    Ok(ChebyshevReport {
        lo,
        hi,
        violations,
        min_ratio,
        max_ratio,
    })
}
