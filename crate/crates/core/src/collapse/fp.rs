//! Condition (FP), orderly decompositions, and k-partitions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intsets::{
    CertifiedRange, Counterexample, RelationVerdict, SetContext, SetSpec, WindowSet,
};

const MAX_FP_WINDOW: u64 = 1 << 32;

/// `⟨C⟩ ∩ [1, hi]`, built bottom-up: `q ∈ ⟨C⟩` and `d ∈ C` give `d·q`.
pub(crate) fn semigroup_window(c: &WindowSet, hi: u64) -> Result<WindowSet> {
    let mut gen = WindowSet::empty(1, hi)?;
    let factors: Vec<u64> = c.iter().filter(|&d| d >= 1 && d <= hi).collect();
    for &d in &factors {
        gen.insert(d);
    }
    let multipliers: Vec<u64> = factors.iter().copied().filter(|&d| d >= 2).collect();
    for q in 1..=hi / 2 {
        if !gen.contains(q) {
            continue;
        }
        for &d in &multipliers {
            match d.checked_mul(q) {
                Some(v) if v <= hi => gen.insert(v),
                _ => break,
            }
        }
    }
    Ok(gen)
}

fn fp_fast_path(ctx: &SetContext<'_>, b: &SetSpec, c: &SetSpec) -> Option<RelationVerdict> {
    if b.within_odd_ge3() && c.covers_primes_from(ctx, 3) {
        return Some(RelationVerdict::holds(
            "C contains every odd prime and B holds only odd integers >= 3, so each member of B \
             is a product of odd primes in C by unique factorization",
            CertifiedRange::from(1),
        ));
    }
    if b.within_int_ge2() && c.covers_primes_from(ctx, 2) {
        return Some(RelationVerdict::holds(
            "C contains every prime and B holds only integers >= 2, so each member of B is a \
             product of primes in C by unique factorization",
            CertifiedRange::from(1),
        ));
    }
    None
}

/// Condition (FP) for `B ∩ [lo, hi]` over `C`.
///
/// Exact when `C` provably holds all the primes `B` can need, or when `B`
/// is finite and inside the window; otherwise windowed.
pub fn check_fp(
    ctx: &SetContext<'_>,
    b: &SetSpec,
    c: &SetSpec,
    lo: u64,
    hi: u64,
) -> Result<RelationVerdict> {
    if lo == 0 {
        return Err(Error::invalid(
            "an FP window must not contain 0: its decomposition search does not terminate",
        ));
    }
    if lo > hi {
        return Err(Error::InvertedWindow { lo, hi });
    }
    if let Some(v) = fp_fast_path(ctx, b, c) {
        return Ok(v);
    }
    if hi > MAX_FP_WINDOW {
        return Err(Error::SizeGuard(format!("FP window up to {hi}")));
    }
    let bw = b.to_window(ctx, lo, hi)?;
    let cw = c.to_window(ctx, 1, hi)?;
    let gen = semigroup_window(&cw, hi)?;
    if let Some(bad) = bw.first_not_in(&gen) {
        let divisors: Vec<String> = (2..bad)
            .filter(|&d| bad % d == 0 && cw.contains(d))
            .map(|d| d.to_string())
            .collect();
        let detail = if divisors.is_empty() {
            "no divisor of it lies in C".to_string()
        } else {
            format!("its divisors in C are {}", divisors.join(", "))
        };
        return Ok(RelationVerdict::fails(
            Counterexample::Value(bad),
            format!("{bad} in B has no decomposition in C; {detail}"),
        ));
    }
    let exact = b
        .as_finite()
        .is_some_and(|f| f.iter().all(|&v| v >= lo && v <= hi));
    if exact {
        Ok(RelationVerdict::holds(
            "every member of the finite set B decomposes in C",
            CertifiedRange::window(lo, hi),
        ))
    } else {
        Ok(RelationVerdict::on_window(
            format!("every member of B in [{lo}, {hi}] decomposes in C"),
            CertifiedRange::window(lo, hi),
        ))
    }
}

/// One orderly decomposition `a = b_1 ⋯ b_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DecompositionRecord {
    pub target: u64,
    pub factors: Vec<u64>,
}

fn decomposition_divisors(ctx: &SetContext<'_>, a: u64, b: &SetSpec) -> Result<Vec<u64>> {
    if a < 2 {
        return Err(Error::invalid(format!(
            "{a} has infinitely many or no meaningful decompositions; targets must be >= 2"
        )));
    }
    if b.contains(ctx, 1)? {
        return Err(Error::pre(
            "1 in B gives infinitely many orderly decompositions",
        ));
    }
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= a {
        if a % d == 0 {
            divs.push(d);
            if d * d != a {
                divs.push(a / d);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    let mut out = Vec::new();
    for d in divs.into_iter().filter(|&d| d >= 2) {
        if b.contains(ctx, d)? {
            out.push(d);
        }
    }
    Ok(out)
}

fn all_decompositions(a: u64, factors: &[u64], memo: &mut HashMap<u64, Vec<Vec<u64>>>) -> Vec<Vec<u64>> {
    if let Some(v) = memo.get(&a) {
        return v.clone();
    }
    let mut out = Vec::new();
    for &d in factors {
        if d > a {
            break;
        }
        if a % d != 0 {
            continue;
        }
        if d == a {
            out.push(vec![a]);
            continue;
        }
        for rest in all_decompositions(a / d, factors, memo) {
            let mut v = Vec::with_capacity(rest.len() + 1);
            v.push(d);
            v.extend(rest);
            out.push(v);
        }
    }
    memo.insert(a, out.clone());
    out
}

/// Every orderly decomposition of `a` in `B`, ordered by length and then
/// lexicographically.
pub fn decompositions(ctx: &SetContext<'_>, a: u64, b: &SetSpec) -> Result<Vec<DecompositionRecord>> {
    let factors = decomposition_divisors(ctx, a, b)?;
    let mut memo = HashMap::new();
    let mut all = all_decompositions(a, &factors, &mut memo);
    all.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(all
        .into_iter()
        .map(|factors| DecompositionRecord { target: a, factors })
        .collect())
}

/// A nonnegative count that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Factor-number `n(a|B)`, exponent `e(a|B)` and degree `d(a|B)`; all zero
/// when `a` has no decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorStats {
    pub target: u64,
    pub factors: Vec<u64>,
    pub factor_count: Count,
    pub exponent: Count,
    pub degree: Count,
}

pub fn factor_stats(ctx: &SetContext<'_>, a: u64, b: &SetSpec) -> Result<FactorStats> {
    if b.contains(ctx, 1)? {
        return Ok(FactorStats {
            target: a,
            factors: vec![1],
            factor_count: Count::Infinite,
            exponent: Count::Infinite,
            degree: Count::Infinite,
        });
    }
    let all = decompositions(ctx, a, b)?;
    let factors: BTreeSet<u64> = all.iter().flat_map(|d| d.factors.iter().copied()).collect();
    let exponent = all
        .iter()
        .flat_map(|d| {
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            for &f in &d.factors {
                *counts.entry(f).or_default() += 1;
            }
            counts.into_values()
        })
        .max()
        .unwrap_or(0);
    let degree = all.iter().map(|d| d.factors.len() as u64).max().unwrap_or(0);
    Ok(FactorStats {
        target: a,
        factor_count: Count::Finite(factors.len() as u64),
        factors: factors.into_iter().collect(),
        exponent: Count::Finite(exponent),
        degree: Count::Finite(degree),
    })
}

/// `a = k_1 b_1 + ⋯ + k_r b_r` with distinct parts in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PartitionRecord {
    pub target: u64,
    pub parts: Vec<(u64, u64)>,
    pub length: u64,
}

impl fmt::Display for PartitionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .parts
            .iter()
            .map(|&(b, k)| if k == 1 { b.to_string() } else { format!("{k}*{b}") })
            .collect();
        write!(f, "{} = {}", self.target, terms.join(" + "))
    }
}

/// Every `k`-partition of `a` in `B`, sorted by parts.
pub fn k_partitions(
    ctx: &SetContext<'_>,
    a: u64,
    b: &SetSpec,
    k: u64,
) -> Result<Vec<PartitionRecord>> {
    if k == 0 {
        return Err(Error::invalid("partition length must be at least 1"));
    }
    let members = b.to_window(ctx, 0, a)?.members();
    let mut out = Vec::new();
    let mut chosen: Vec<u64> = Vec::with_capacity(k as usize);

    fn go(
        members: &[u64],
        start: usize,
        remaining: u64,
        k: u64,
        chosen: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if k == 0 {
            if remaining == 0 {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..members.len() {
            let m = members[i];
            match m.checked_mul(k) {
                Some(v) if v <= remaining => {}
                _ => break,
            }
            if k == 1 && m != remaining {
                continue;
            }
            chosen.push(m);
            go(members, i, remaining - m, k - 1, chosen, out);
            chosen.pop();
        }
    }

    go(&members, 0, a, k, &mut chosen, &mut out);
    let mut records: Vec<PartitionRecord> = out
        .into_iter()
        .map(|multiset| {
            let mut parts: Vec<(u64, u64)> = Vec::new();
            for m in multiset {
                match parts.last_mut() {
                    Some((b, c)) if *b == m => *c += 1,
                    _ => parts.push((m, 1)),
                }
            }
            PartitionRecord {
                target: a,
                parts,
                length: k,
            }
        })
        .collect();
    records.sort();
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::intsets::Status;
    use crate::sieve::PrimeTable;

    fn spec(s: &str) -> SetSpec {
        s.parse().unwrap()
    }

    #[test]
    fn fp_examples() {
        let t = PrimeTable::new(2000, Exec::Sequential).unwrap();
        let ctx = SetContext::new(&t);
        let v = check_fp(&ctx, &spec("odd>=3"), &spec("odd>=3 \\ {9}"), 3, 1000).unwrap();
        assert_eq!(v.status, Status::Holds);
        let v = check_fp(&ctx, &spec("{9}"), &spec("{3}"), 3, 1000).unwrap();
        assert_eq!(v.status, Status::Holds);
        let v = check_fp(&ctx, &spec("{15}"), &spec("{9,5}"), 3, 1000).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.counterexample, Some(Counterexample::Value(15)));
        assert!(check_fp(&ctx, &spec("{9}"), &spec("{3}"), 0, 10).is_err());
        let v = check_fp(&ctx, &spec("int>=1"), &spec("{2} | odd>=1"), 1, 2000).unwrap();
        assert_eq!(v.status, Status::HoldsOnWindow);
        let v = check_fp(&ctx, &spec("odd>=3"), &spec("composites"), 3, 100).unwrap();
        assert_eq!(v.counterexample, Some(Counterexample::Value(3)));
    }

    #[test]
    fn decomposition_examples() {
        let t = PrimeTable::new(2000, Exec::Sequential).unwrap();
        let ctx = SetContext::new(&t);
        let f = |a, s: &str| -> Vec<Vec<u64>> {
            decompositions(&ctx, a, &spec(s))
                .unwrap()
                .into_iter()
                .map(|d| d.factors)
                .collect()
        };
        assert_eq!(f(9, "{3,9}"), vec![vec![9], vec![3, 3]]);
        let mut got = f(45, "odd>=3");
        got.sort();
        let mut want = vec![
            vec![45],
            vec![3, 15],
            vec![15, 3],
            vec![5, 9],
            vec![9, 5],
            vec![3, 3, 5],
            vec![3, 5, 3],
            vec![5, 3, 3],
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(f(7, "{9}").is_empty());
        assert!(decompositions(&ctx, 1, &spec("odd>=3")).is_err());
        assert!(decompositions(&ctx, 9, &spec("odd>=1")).is_err());
    }

    #[test]
    fn stats_examples() {
        let t = PrimeTable::new(2000, Exec::Sequential).unwrap();
        let ctx = SetContext::new(&t);
        let s = factor_stats(&ctx, 45, &spec("odd>=3")).unwrap();
        assert_eq!(s.factors, vec![3, 5, 9, 15, 45]);
        assert_eq!(
            (s.factor_count, s.exponent, s.degree),
            (Count::Finite(5), Count::Finite(2), Count::Finite(3))
        );
        let s = factor_stats(&ctx, 9, &spec("{3}")).unwrap();
        assert_eq!((s.factor_count, s.exponent, s.degree), (Count::Finite(1), Count::Finite(2), Count::Finite(2)));
        let s = factor_stats(&ctx, 13, &spec("{13}")).unwrap();
        assert_eq!((s.factor_count, s.exponent, s.degree), (Count::Finite(1), Count::Finite(1), Count::Finite(1)));
        let s = factor_stats(&ctx, 13, &spec("odd>=1")).unwrap();
        assert_eq!(s.degree, Count::Infinite);
    }

    #[test]
    fn partition_examples() {
        let t = PrimeTable::new(2000, Exec::Sequential).unwrap();
        let ctx = SetContext::new(&t);
        let p = k_partitions(&ctx, 12, &spec("primes>=3"), 2).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].parts, vec![(5, 1), (7, 1)]);
        let p = k_partitions(&ctx, 6, &spec("{3}"), 2).unwrap();
        assert_eq!(p[0].parts, vec![(3, 2)]);
        assert_eq!(p[0].to_string(), "6 = 2*3");
        assert!(k_partitions(&ctx, 7, &spec("odd>=3"), 2).unwrap().is_empty());
        assert_eq!(k_partitions(&ctx, 10, &spec("primes>=3"), 2).unwrap().len(), 2);
    }
}
