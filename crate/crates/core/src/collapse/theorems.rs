//! Checkers for the collapsed-subset theorems over `Z^o_{≥3}`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::collapse::fp::{check_fp, semigroup_window};
use crate::collapse::relation::{check_relation, Relation};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::intsets::{
    compare_sumsets, pair_sum_cover_decision, sumset_equal_window, CertifiedRange,
    CofiniteOddSet, Counterexample, RelationVerdict, SetContext, SetSpec, Status, WindowSet,
};
use crate::sieve::{isqrt, CompositeIndex, PrimeTable};

fn validate_composites(primes: &PrimeTable, ks: &[u64]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::invalid("the removed set must be non-empty"));
    }
    if let Some(w) = ks.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "removed set must be strictly increasing, {} then {}",
            w[0], w[1]
        )));
    }
    for &k in ks {
        if !primes.is_odd_composite(k)? {
            return Err(Error::invalid(format!("{k} is not an odd composite")));
        }
    }
    Ok(())
}

/// First 1-based `i` with `π(k_i) < i + 2`.
pub fn first_violation(primes: &PrimeTable, ks: &[u64]) -> Result<Option<usize>> {
    validate_composites(primes, ks)?;
    for (i, &k) in ks.iter().enumerate() {
        if primes.pi(k)? < i as u64 + 3 {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}

/// `π(k_i) ≥ i + 2` for every `i`.
pub fn theorem38_hypothesis(primes: &PrimeTable, ks: &[u64]) -> Result<bool> {
    Ok(first_violation(primes, ks)?.is_none())
}

/// `3 + k_i = p + d` with `p ≥ 5` prime and `d ∉ {k_1, …, k_{i−1}}`,
/// replayed from `k_r` down to `k_1`.
fn replay_theorem38(primes: &PrimeTable, ks: &[u64]) -> Vec<String> {
    let mut out = Vec::with_capacity(ks.len());
    for i in (0..ks.len()).rev() {
        let k = ks[i];
        let earlier: BTreeSet<u64> = ks[..i].iter().copied().collect();
        let hit = primes
            .odd_primes()
            .skip(1)
            .take_while(|&p| p < k)
            .map(|p| (p, k - p + 3))
            .find(|(_, d)| !earlier.contains(d));
        out.push(match hit {
            Some((p, d)) => format!("3 + {k} = {p} + {d}"),
            None => format!("3 + {k}: no prime p >= 5 leaves a partner outside the earlier removals"),
        });
    }
    out
}

fn cofinite_removal(primes: &PrimeTable, ks: &[u64], lo: u64, hi: u64, exec: Exec) -> Result<RelationVerdict> {
    let d = CofiniteOddSet::new(3, ks.iter().copied())?;
    let exact = pair_sum_cover_decision(&d)?;
    let ctx = SetContext::new(primes);
    let b = SetSpec::odd_ge(3);
    let c = SetSpec::odd_ge(3).minus(ks.iter().copied());
    let fp = check_fp(&ctx, &b, &c, lo.max(1), hi)?;
    let subset = RelationVerdict::holds("the removal is a subset of odd>=3", CertifiedRange::from(0));
    let mut v = RelationVerdict::meet([exact, fp, subset]);
    let bw = b.to_window(&ctx, 0, hi)?;
    let cw = c.to_window(&ctx, 0, hi)?;
    let cross = sumset_equal_window(&bw, &cw, 2, exec)?;
    if cross.status.is_failure() != v.status.is_failure() {
        return Ok(RelationVerdict::meet([v, cross]).with_witness(format!(
            "window cross-check on [0, {hi}] disagrees with the exact decision"
        )));
    }
    v.witnesses.push(format!("window cross-check on [0, {hi}] agrees"));
    Ok(v)
}

/// `Z^o_{≥3} ⋗⇒_2 Z^o_{≥3} \ {k_1, …, k_r}` for removals meeting
/// `π(k_i) ≥ i + 2`.
pub fn theorem38_check(
    primes: &PrimeTable,
    ks: &[u64],
    lo: u64,
    hi: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    if let Some(i) = first_violation(primes, ks)? {
        let k = ks[i - 1];
        return Ok(RelationVerdict::hypothesis_failed(
            1,
            format!("pi({k}) = {} < {} at i = {i}", primes.pi(k)?, i + 2),
        ));
    }
    let mut v = cofinite_removal(primes, ks, lo, hi, exec)?;
    v.witnesses.extend(replay_theorem38(primes, ks));
    Ok(v)
}

/// The products `3·5⋯p̂_k` for `k ≥ 3` that are `≤ limit`.
pub fn primorial_set(primes: &PrimeTable, limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut acc = 3u64;
    for p in primes.odd_primes().skip(1) {
        match acc.checked_mul(p) {
            Some(v) if v <= limit => {
                acc = v;
                out.push(v);
            }
            _ => break,
        }
    }
    out
}

fn is_prime_any(primes: &PrimeTable, n: u64) -> bool {
    if n <= primes.limit() {
        return primes.is_prime_unchecked(n);
    }
    if n % 2 == 0 {
        return false;
    }
    let r = isqrt(n);
    let mut d = 3;
    while d <= r {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd composite terms `≤ limit` of `2, 3, 7, 43, …`, `ϖ_{k+1} = ϖ_1⋯ϖ_k + 1`.
pub fn odoni_set(primes: &PrimeTable, limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut product = 2u64;
    while let Some(next) = product.checked_add(1) {
        if next > limit {
            break;
        }
        if next >= 9 && next % 2 == 1 && !is_prime_any(primes, next) {
            out.push(next);
        }
        match product.checked_mul(next) {
            Some(p) => product = p,
            None => break,
        }
    }
    out
}

/// Removal of an increasing run of odd composites with gaps above 2.
///
/// Infinite families are passed truncated to the window; the decision is
/// exact for the truncation.
pub fn gap_subsequence_check(
    primes: &PrimeTable,
    bs: &[u64],
    lo: u64,
    hi: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    validate_composites(primes, bs)?;
    if let Some(w) = bs.windows(2).find(|w| w[1] - w[0] <= 2) {
        return Err(Error::pre(format!(
            "gap condition violated: {} - {} <= 2",
            w[1], w[0]
        )));
    }
    let mut v = cofinite_removal(primes, bs, lo, hi, exec)?;
    let removed: BTreeSet<u64> = bs.iter().copied().collect();
    for &b in bs {
        if removed.contains(&(b - 2)) {
            return Ok(RelationVerdict::fails(
                Counterexample::Value(b + 3),
                format!("witness 3 + {b} = 5 + {} uses a removed value", b - 2),
            ));
        }
        v.witnesses.push(format!("3 + {b} = 5 + {}", b - 2));
    }
    Ok(v)
}

/// The three hypotheses and the conclusion for removing `C` from
/// `B = {b + i·d}`.
#[derive(Debug, Clone, Serialize)]
pub struct Prop315Report {
    pub b: u64,
    pub d: u64,
    pub removed: Vec<u64>,
    pub hypotheses: Vec<RelationVerdict>,
    pub conclusion: RelationVerdict,
    pub verdict: RelationVerdict,
}

fn progression_window(b: u64, d: u64, hi: u64) -> Result<WindowSet> {
    let members = (0..).map(|i| b + i * d).take_while(|&v| v <= hi);
    WindowSet::from_members(0, hi, members)
}

/// `B ⋗⇒_2 B \ removed` for `B = {b + i·d}`, windowed unless `B` is odd>=b.
fn progression_relation(
    primes: &PrimeTable,
    b: u64,
    d: u64,
    removed: &[u64],
    hi: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    if d == 2 && b % 2 == 1 && b >= 3 {
        let ctx = SetContext::new(primes);
        let bs = SetSpec::odd_ge(b);
        let rel = Relation::implies(bs.clone(), bs.minus(removed.iter().copied()), 2)?;
        return check_relation(&ctx, &rel, b, hi, exec);
    }
    let bw = progression_window(b, d, hi)?;
    let rw = bw.without(removed.iter().copied());
    let sums = compare_sumsets(&bw, 2, &rw, 2, exec)?;
    let gen = semigroup_window(&rw, hi)?;
    let fp = match bw.crop(b.max(1), hi)?.first_not_in(&gen) {
        Some(x) => RelationVerdict::fails(
            Counterexample::Value(x),
            format!("{x} has no decomposition in the remainder"),
        ),
        None => RelationVerdict::on_window(
            format!("(FP) on [{}, {hi}]", b.max(1)),
            CertifiedRange::window(b.max(1), hi),
        ),
    };
    Ok(RelationVerdict::meet([sums, fp]))
}

pub fn prop315_check(
    primes: &PrimeTable,
    b: u64,
    d: u64,
    cs: &[u64],
    hi: u64,
    exec: Exec,
) -> Result<Prop315Report> {
    if d == 0 || b == 0 {
        return Err(Error::invalid("progression needs b >= 1 and d >= 1"));
    }
    if cs.len() < 2 {
        return Err(Error::invalid("the removed set needs k + 1 >= 2 elements"));
    }
    if let Some(w) = cs.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!("{} then {} is not increasing", w[0], w[1])));
    }
    if cs[0] <= b {
        return Err(Error::pre(format!("need b < c_1, got b = {b}, c_1 = {}", cs[0])));
    }
    if let Some(&c) = cs.iter().find(|&&c| (c - b) % d != 0) {
        return Err(Error::invalid(format!("{c} is not in the progression {b} + {d}i")));
    }
    let last = *cs.last().unwrap();
    if hi < 2 * last {
        return Err(Error::invalid(format!("window end {hi} must reach 2·{last}")));
    }
    let k = cs.len() - 1;

    let bw = progression_window(b, d, hi)?;
    let rest = bw.without(cs.iter().copied());
    let gen = semigroup_window(&rest, hi)?;
    let h1 = match cs.iter().find(|&&c| !gen.contains(c)) {
        Some(&c) => RelationVerdict::fails(
            Counterexample::Value(c),
            format!("hypothesis 1: {c} has no decomposition in B \\ C"),
        ),
        None => RelationVerdict::holds(
            "hypothesis 1: every c_i decomposes in B \\ C",
            CertifiedRange::window(cs[0], last),
        ),
    };

    let target = b + last;
    let pair = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| cs[i] + cs[j] == target);
    let h2 = match pair {
        Some((i, j)) => RelationVerdict::holds(
            format!("hypothesis 2: {b} + {last} = {} + {}", cs[i], cs[j]),
            CertifiedRange::window(target, target),
        ),
        None => RelationVerdict::fails(
            Counterexample::Value(target),
            format!("hypothesis 2: {b} + {last} is not c_i + c_j with i != j <= {k}"),
        ),
    };

    let per_i = exec.map_range(0..cs.len(), |i| {
        let di: Vec<u64> = cs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &c)| c).collect();
        progression_relation(primes, b, d, &di, hi, exec)
    });
    let mut h3_parts = Vec::with_capacity(per_i.len());
    for v in per_i {
        h3_parts.push(v?);
    }
    let mut h3 = RelationVerdict::meet(h3_parts);
    h3.note = format!("hypothesis 3: {}", h3.note);

    let conclusion = progression_relation(primes, b, d, cs, hi, exec)?;
    let hyps = [h1, h2, h3];
    let verdict = match hyps.iter().position(|h| h.status.is_failure()) {
        Some(h) => RelationVerdict::hypothesis_failed(h as u8 + 1, hyps[h].note.clone())
            .with_witness(format!("conclusion alone: {}", conclusion.status)),
        None => conclusion.clone(),
    };
    Ok(Prop315Report {
        b,
        d,
        removed: cs.to_vec(),
        hypotheses: hyps.to_vec(),
        conclusion,
        verdict,
    })
}

/// Premises `i = 0..=l`, the conclusion, and the implication between them.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem312Report {
    pub k: u64,
    pub l: u64,
    pub removed: Vec<u64>,
    pub premises: Vec<RelationVerdict>,
    pub conclusion: RelationVerdict,
    /// `3 + ĉ_{k+l} = p + q` with both odd primes.
    pub prime_pair: Option<(u64, u64)>,
    pub verdict: RelationVerdict,
}

pub fn theorem312_check(primes: &PrimeTable, k: u64, l: u64, exec: Exec) -> Result<Theorem312Report> {
    if k < 1 || l < 7 {
        return Err(Error::invalid(format!("need k >= 1 and l >= 7, got k = {k}, l = {l}")));
    }
    let idx = CompositeIndex::new(primes);
    let ck = idx.nth(k)?;
    let top = idx.nth(k + l)?;
    if 3 + top < 2 * ck {
        return Err(Error::pre(format!("3 + {top} < 2·{ck}")));
    }
    let removed = idx.first(k + l)?;
    let premises: Vec<Result<RelationVerdict>> = exec.map_range(0..(l as usize + 1), |i| {
        let keep = idx.nth(k + i as u64)?;
        let ex = removed.iter().copied().filter(|&c| c != keep);
        let mut v = pair_sum_cover_decision(&CofiniteOddSet::new(3, ex)?)?;
        v.note = format!("premise {i} (keep {keep}): {}", v.note);
        Ok(v)
    });
    let premises: Vec<RelationVerdict> = premises.into_iter().collect::<Result<_>>()?;
    let mut conclusion = pair_sum_cover_decision(&CofiniteOddSet::new(3, removed.iter().copied())?)?;
    conclusion.note = format!("conclusion: {}", conclusion.note);
    let prime_pair = primes
        .odd_primes()
        .take_while(|&p| 2 * p <= 3 + top)
        .find(|&p| primes.is_prime_unchecked(3 + top - p))
        .map(|p| (p, 3 + top - p));
    let all_premises = premises.iter().all(|v| v.status == Status::Holds);
    let verdict = match (all_premises, conclusion.status) {
        (true, Status::Holds) => conclusion.clone(),
        (true, _) => RelationVerdict::fails(
            conclusion.counterexample.clone().unwrap_or(Counterexample::Value(top)),
            "every premise holds but the conclusion fails",
        ),
        (false, _) => RelationVerdict::holds(
            "a premise fails, so the implication holds vacuously",
            CertifiedRange::from(6),
        ),
    };
    let verdict = match prime_pair {
        Some((p, q)) => verdict.with_witness(format!("3 + {top} = {p} + {q}")),
        None => verdict,
    };
    Ok(Theorem312Report {
        k,
        l,
        removed,
        premises,
        conclusion,
        prime_pair,
        verdict,
    })
}

/// One `(k, p)` case: why `Z^o_{≥2k+1}` and `P_{≥p}` are not related.
#[derive(Debug, Clone, Serialize)]
pub struct Prop31Case {
    pub k: u64,
    pub p: u64,
    pub witness: String,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop31Report {
    pub cases: Vec<Prop31Case>,
    /// `Z^o_{≥3} ⋗⇒_2 P_{≥3}` on the window.
    pub goldbach: RelationVerdict,
    /// `min n·S_{≥p} = np ≠ nq = min n·P_{≥q}`, for `p ≠ q`.
    pub minimum_pairs: Vec<(u64, u64)>,
    /// `11 = 4 + 7 ∈ 2·S_{≥2}` and `11 ∉ 2·P_{≥2}`.
    pub eleven: bool,
    pub verdict: RelationVerdict,
}

/// Witnesses for every `(k, p) ≠ (1, 3)` with `k ≤ k_max`, `p ≤ p_max`,
/// and the windowed exceptional case.
pub fn prop31_check(
    primes: &PrimeTable,
    k_max: u64,
    p_max: u64,
    hi: u64,
    exec: Exec,
) -> Result<Prop31Report> {
    let n = 2u64;
    let ctx = SetContext::new(primes);
    let odd_primes: Vec<u64> = primes.odd_primes().take_while(|&p| p <= p_max).collect();
    let mut cases = Vec::new();
    for k in 0..=k_max {
        for &p in &odd_primes {
            if (k, p) == (1, 3) {
                continue;
            }
            let case = if p > 3 {
                let q = primes
                    .odd_primes()
                    .find(|&q| q > 2 * k + 1)
                    .ok_or_else(|| Error::BeyondLimit { what: "prime above 2k+1", value: 2 * k + 1, limit: primes.limit() })?;
                let w = 3 * q;
                let verified = w > 2 * k && !primes.is_rough(w, p)?;
                Prop31Case {
                    k,
                    p,
                    witness: format!("3·{q} = {w} lies in odd>={} but 3 < {p} divides it", 2 * k + 1),
                    verified,
                }
            } else if k == 0 {
                let v = check_fp(&ctx, &SetSpec::odd_ge(1), &SetSpec::primes_ge(3), 1, 9)?;
                Prop31Case {
                    k,
                    p,
                    witness: "1 has no decomposition in primes>=3".into(),
                    verified: v.counterexample == Some(Counterexample::Value(1)),
                }
            } else {
                let lhs = n * (2 * k + 1);
                Prop31Case {
                    k,
                    p,
                    witness: format!(
                        "minimum of {n}·odd>={} is {lhs} > {} = {n}·3",
                        2 * k + 1,
                        3 * n
                    ),
                    verified: lhs > 3 * n && primes.is_prime_unchecked(3),
                }
            };
            cases.push(case);
        }
    }
    let rel = Relation::implies(SetSpec::odd_ge(3), SetSpec::primes_ge(3), 2)?;
    let goldbach = check_relation(&ctx, &rel, 3, hi, exec)?;

    let all_primes: Vec<u64> = primes.primes().take_while(|&p| p <= p_max).collect();
    let minimum_pairs: Vec<(u64, u64)> = all_primes
        .iter()
        .flat_map(|&p| all_primes.iter().map(move |&q| (p, q)))
        .filter(|&(p, q)| p != q)
        .collect();
    let eleven_in_s = SetSpec::term(crate::intsets::Term::RoughGe(2)).contains(&ctx, 4)?
        && primes.is_prime(7)?;
    let eleven_not_p = primes
        .primes()
        .take_while(|&p| p < 11)
        .all(|p| !primes.is_prime_unchecked(11 - p));
    let eleven = eleven_in_s && eleven_not_p;

    let mut parts = vec![goldbach.clone()];
    if let Some(c) = cases.iter().find(|c| !c.verified) {
        parts.push(RelationVerdict::fails(
            Counterexample::Tuple(vec![c.k, c.p]),
            format!("witness for k = {}, p = {} did not verify", c.k, c.p),
        ));
    }
    if !eleven {
        parts.push(RelationVerdict::fails(Counterexample::Value(11), "11 = 4 + 7 witness did not verify"));
    }
    let cases_note = RelationVerdict::holds(
        format!("{} cases (k, p) != (1, 3) each broken by a verified witness", cases.len()),
        CertifiedRange::from(0),
    );
    parts.push(cases_note);
    let verdict = RelationVerdict::meet(parts).with_witness("11 = 4 + 7 in 2·rough>=2, 11 not in 2·primes>=2");
    Ok(Prop31Report {
        cases,
        goldbach,
        minimum_pairs,
        eleven,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::new(200_000, Exec::Sequential).unwrap()
    }

    #[test]
    fn hypothesis_examples() {
        let t = table();
        assert!(theorem38_hypothesis(&t, &[9, 15, 21]).unwrap());
        let idx = CompositeIndex::new(&t);
        assert!(theorem38_hypothesis(&t, &idx.first(22).unwrap()).unwrap());
        assert_eq!(first_violation(&t, &idx.first(23).unwrap()).unwrap(), Some(23));
        assert!(theorem38_hypothesis(&t, &[9, 11]).is_err());
        assert!(theorem38_hypothesis(&t, &[15, 9]).is_err());
    }

    #[test]
    fn theorem38_examples() {
        let t = table();
        let v = theorem38_check(&t, &[9, 15, 21], 3, 1000, Exec::Parallel).unwrap();
        assert_eq!(v.status, Status::Holds, "{v:?}");
        assert!(v.note.contains("48"));
        assert!(v.witnesses.contains(&"3 + 21 = 5 + 19".to_string()));
        let v = theorem38_check(&t, &[9], 3, 1000, Exec::Parallel).unwrap();
        assert_eq!(v.status, Status::Holds);
        let idx = CompositeIndex::new(&t);
        let v = theorem38_check(&t, &idx.first(23).unwrap(), 3, 1000, Exec::Parallel).unwrap();
        assert_eq!(v.status, Status::HypothesisFailed(1));
    }

    #[test]
    fn gap_examples() {
        let t = table();
        let v = gap_subsequence_check(&t, &[9, 15, 21, 25], 3, 1000, Exec::Parallel).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert!(v.witnesses.contains(&"3 + 25 = 5 + 23".to_string()));
        assert!(gap_subsequence_check(&t, &[9, 11], 3, 100, Exec::Parallel).is_err());
        assert!(gap_subsequence_check(&t, &[25, 27], 3, 100, Exec::Parallel).is_err());
        assert_eq!(primorial_set(&t, 100_000), vec![15, 105, 1155, 15015]);
        assert_eq!(odoni_set(&t, 1_000_000), vec![1807]);
        let ps = primorial_set(&t, 100_000);
        let v = gap_subsequence_check(&t, &ps, 3, 1000, Exec::Parallel).unwrap();
        assert_eq!(v.status, Status::Holds);
    }

    #[test]
    fn prop315_examples() {
        let t = table();
        let r = prop315_check(&t, 3, 2, &[9, 15], 10_000, Exec::Parallel).unwrap();
        assert_eq!(r.verdict.status, Status::HypothesisFailed(2));
        assert!(r.conclusion.status.holds());
        let r = prop315_check(&t, 3, 2, &[9, 15, 21], 10_000, Exec::Parallel).unwrap();
        assert_eq!(r.verdict.status, Status::Holds, "{:?}", r.hypotheses);
        assert!(prop315_check(&t, 3, 2, &[3, 9], 100, Exec::Parallel).is_err());
        assert!(prop315_check(&t, 3, 2, &[9, 16], 100, Exec::Parallel).is_err());
        let r = prop315_check(&t, 4, 3, &[10, 16, 22], 2000, Exec::Parallel).unwrap();
        assert!(matches!(r.verdict.status, Status::HypothesisFailed(_) | Status::HoldsOnWindow | Status::Fails));
    }

    #[test]
    fn theorem312_examples() {
        let t = table();
        let r = theorem312_check(&t, 1, 7, Exec::Parallel).unwrap();
        assert_eq!(r.premises.len(), 8);
        assert!(r.premises.iter().all(|v| v.status == Status::Holds));
        assert_eq!(r.conclusion.status, Status::Holds);
        assert_eq!(r.verdict.status, Status::Holds);
        assert_eq!(*r.removed.last().unwrap(), 39);
        assert!(r.prime_pair.is_some());
        let idx = CompositeIndex::new(&t);
        let bad = (1..2000).find(|&k| 3 + idx.nth(k + 7).unwrap() < 2 * idx.nth(k).unwrap());
        if let Some(k) = bad {
            assert!(theorem312_check(&t, k, 7, Exec::Parallel).is_err());
        }
    }

    #[test]
    fn prop31_examples() {
        let t = table();
        let r = prop31_check(&t, 4, 13, 10_000, Exec::Parallel).unwrap();
        assert!(r.cases.iter().all(|c| c.verified));
        assert!(r.cases.iter().any(|c| c.k == 0 && c.p == 3 && c.witness.contains("1 has no")));
        assert!(r.cases.iter().any(|c| c.k == 2 && c.p == 3 && c.witness.contains("10 > 6")));
        assert!(r.eleven);
        assert_eq!(r.goldbach.status, Status::HoldsOnWindow);
        assert_eq!(r.verdict.status, Status::HoldsOnWindow);
    }
}
