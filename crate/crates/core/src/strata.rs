//! Goldbach stratification of the odd composites.
//!
//! Layer 1 holds the odd composites `c` with `3 + c` a sum of two odd
//! primes. Layer `k > 1` holds the still-unassigned `c` with
//! `3 + c = p + c'` for an odd prime `p` and `c'` in layer `k − 1`. Every
//! partner is smaller than `c`, so a table up to `limit` is exact without
//! looking past `limit`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::intsets::{
    compare_sumsets, CertifiedRange, Counterexample, RelationVerdict, SetContext, SetSpec, Status,
    Term,
};
use crate::sieve::PrimeTable;

/// One odd composite with its layer and the witness that placed it there.
///
/// Layer 1: `3 + c = witness_prime + witness_partner`, both prime.
/// Layer k: `witness_partner` is an odd composite in layer `k − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrataEntry {
    pub c: u64,
    pub layer: Option<u32>,
    pub witness_prime: Option<u64>,
    pub witness_partner: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataTable {
    limit: u64,
    entries: Vec<StrataEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerCensus {
    pub layer: u32,
    pub count: u64,
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub limit: u64,
    pub composites: u64,
    pub layers: Vec<LayerCensus>,
    pub unassigned: u64,
    pub max_layer: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub limit: u64,
    pub composites: u64,
    pub assigned: u64,
    /// Odd composites with no layer.
    pub unassigned: Vec<u64>,
    /// Odd composites listed more than once.
    pub duplicates: Vec<u64>,
    /// Odd composites absent from the table.
    pub missing: Vec<u64>,
    /// Entries that are not odd composites, or whose witness does not replay.
    pub invalid: Vec<u64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbsorptionLevel {
    pub k: u32,
    pub checked: u64,
    pub failures: Vec<u64>,
    pub sample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbsorptionReport {
    pub window: (u64, u64),
    pub levels: Vec<AbsorptionLevel>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceReport {
    pub p: u64,
    pub window: (u64, u64),
    pub certified_range: CertifiedRange,
    /// Values of `2·S_{≥p}` missing from `2·P_{≥p}` on the certified range.
    pub rough_violations: Vec<u64>,
    pub shift_bound: u64,
    /// Primes `q ≥ shift_bound` with `3 + q ∉ 2·P_{≥5}`.
    pub shift_violations: Vec<u64>,
}

impl StrataTable {
    /// Builds a table from raw entries; no validation is performed.
    pub fn from_entries(limit: u64, mut entries: Vec<StrataEntry>) -> Self {
        entries.sort_by_key(|e| e.c);
        StrataTable { limit, entries }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn entries(&self) -> &[StrataEntry] {
        &self.entries
    }

    pub fn entry(&self, c: u64) -> Result<Option<&StrataEntry>> {
        if c > self.limit {
            return Err(Error::BeyondLimit {
                what: "strata query",
                value: c,
                limit: self.limit,
            });
        }
        Ok(self
            .entries
            .binary_search_by_key(&c, |e| e.c)
            .ok()
            .map(|i| &self.entries[i]))
    }

    /// Layer of `c`; `None` if unassigned or not an odd composite.
    pub fn layer(&self, c: u64) -> Result<Option<u32>> {
        Ok(self.entry(c)?.and_then(|e| e.layer))
    }

    pub fn layer_members(&self, k: u32) -> impl Iterator<Item = u64> + '_ {
        self.entries
            .iter()
            .filter(move |e| e.layer == Some(k))
            .map(|e| e.c)
    }

    pub fn census(&self) -> Census {
        let mut layers: Vec<LayerCensus> = Vec::new();
        let mut unassigned = 0;
        for e in &self.entries {
            match e.layer {
                None => unassigned += 1,
                Some(k) => {
                    let idx = (k - 1) as usize;
                    if layers.len() <= idx {
                        for j in layers.len()..=idx {
                            layers.push(LayerCensus {
                                layer: j as u32 + 1,
                                count: 0,
                                min: 0,
                                max: 0,
                            });
                        }
                    }
                    let l = &mut layers[idx];
                    if l.count == 0 {
                        l.min = e.c;
                    }
                    l.count += 1;
                    l.max = e.c;
                }
            }
        }
        let max_layer = layers
            .iter()
            .rev()
            .find(|l| l.count > 0)
            .map_or(0, |l| l.layer);
        Census {
            limit: self.limit,
            composites: self.entries.len() as u64,
            layers,
            unassigned,
            max_layer,
        }
    }

    /// CSV with columns `c,layer,witness_prime,witness_partner`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,layer,witness_prime,witness_partner\n");
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e.c,
                e.layer.map(|k| k.to_string()).unwrap_or_default(),
                opt(e.witness_prime),
                opt(e.witness_partner)
            );
        }
        out
    }
}

fn layer_one(primes: &PrimeTable, odd_primes: &[u64], c: u64) -> Option<(u64, u64)> {
    let s = c + 3;
    odd_primes
        .iter()
        .take_while(|&&p| p <= s / 2)
        .find(|&&p| primes.is_prime_unchecked(s - p))
        .map(|&p| (p, s - p))
}

/// Stratifies every odd composite `≤ limit`.
pub fn compute_strata(primes: &PrimeTable, limit: u64, exec: Exec) -> Result<StrataTable> {
    if limit < 9 {
        return Err(Error::LimitTooSmall(limit));
    }
    if limit > primes.limit() {
        return Err(Error::BeyondLimit {
            what: "strata limit",
            value: limit,
            limit: primes.limit(),
        });
    }
    let odd_primes = primes.odd_primes_to(limit);
    let composites = primes.odd_composites_to(limit);
    let mut entries: Vec<StrataEntry> = exec.map_slice(&composites, |&c| {
        let w = layer_one(primes, &odd_primes, c);
        StrataEntry {
            c,
            layer: w.map(|_| 1),
            witness_prime: w.map(|w| w.0),
            witness_partner: w.map(|w| w.1),
        }
    });
    let mut k = 1u32;
    loop {
        let pending: Vec<usize> = (0..entries.len())
            .filter(|&i| entries[i].layer.is_none())
            .collect();
        if pending.is_empty() {
            break;
        }
        let snapshot = &entries;
        let found: Vec<Option<(u64, u64)>> = exec.map_slice(&pending, |&i| {
            let c = snapshot[i].c;
            let s = c + 3;
            odd_primes
                .iter()
                .take_while(|&&p| p + 9 <= s)
                .map(|&p| (p, s - p))
                .find(|&(_, partner)| {
                    snapshot
                        .binary_search_by_key(&partner, |e| e.c)
                        .is_ok_and(|j| snapshot[j].layer == Some(k))
                })
        });
        if found.iter().all(Option::is_none) {
            break;
        }
        k += 1;
        for (&i, w) in pending.iter().zip(found) {
            if let Some((p, partner)) = w {
                entries[i].layer = Some(k);
                entries[i].witness_prime = Some(p);
                entries[i].witness_partner = Some(partner);
            }
        }
    }
    Ok(StrataTable { limit, entries })
}

fn witness_replays(primes: &PrimeTable, t: &StrataTable, e: &StrataEntry) -> bool {
    let (Some(k), Some(p), Some(q)) = (e.layer, e.witness_prime, e.witness_partner) else {
        return e.layer.is_none();
    };
    if p % 2 == 0 || !primes.is_prime_unchecked(p) || p + q != e.c + 3 {
        return false;
    }
    if k == 1 {
        q % 2 == 1 && primes.is_prime_unchecked(q)
    } else {
        matches!(t.layer(q), Ok(Some(j)) if j == k - 1)
    }
}

/// Checks that the table assigns every odd composite `≤ limit` exactly once
/// and that every recorded witness replays.
pub fn verify_partition(primes: &PrimeTable, table: &StrataTable) -> Result<PartitionReport> {
    if table.limit > primes.limit() {
        return Err(Error::BeyondLimit {
            what: "strata limit",
            value: table.limit,
            limit: primes.limit(),
        });
    }
    let expected = primes.odd_composites_to(table.limit);
    let mut duplicates = Vec::new();
    let mut invalid = Vec::new();
    let mut unassigned = Vec::new();
    for (i, e) in table.entries.iter().enumerate() {
        if i > 0 && table.entries[i - 1].c == e.c {
            duplicates.push(e.c);
        }
        let composite = e.c >= 9 && e.c <= table.limit && matches!(primes.is_odd_composite(e.c), Ok(true));
        if !composite || !witness_replays(primes, table, e) {
            invalid.push(e.c);
        }
        if composite && e.layer.is_none() {
            unassigned.push(e.c);
        }
    }
    duplicates.dedup();
    let missing: Vec<u64> = expected
        .iter()
        .copied()
        .filter(|&c| table.entries.binary_search_by_key(&c, |e| e.c).is_err())
        .collect();
    let assigned = table
        .entries
        .iter()
        .filter(|e| e.layer.is_some())
        .count() as u64;
    let ok = duplicates.is_empty() && invalid.is_empty() && unassigned.is_empty() && missing.is_empty();
    Ok(PartitionReport {
        limit: table.limit,
        composites: expected.len() as u64,
        assigned,
        unassigned,
        duplicates,
        missing,
        invalid,
        ok,
    })
}

/// A nondecreasing list of `k` odd primes summing to `target`, found by
/// peeling the smallest feasible prime and recursing.
pub fn sum_of_odd_primes(primes: &PrimeTable, target: u64, k: u32) -> Option<Vec<u64>> {
    fn go(primes: &PrimeTable, target: u64, k: u32, min: u64, out: &mut Vec<u64>) -> bool {
        if k == 1 {
            if target >= min && target % 2 == 1 && target >= 3 && primes.is_prime_unchecked(target) {
                out.push(target);
                return true;
            }
            return false;
        }
        let mut p = min.max(3);
        while p * k as u64 <= target {
            if primes.is_prime_unchecked(p) {
                out.push(p);
                if go(primes, target - p, k - 1, p, out) {
                    return true;
                }
                out.pop();
            }
            p += 2;
        }
        false
    }
    if k == 0 || target > primes.limit() {
        return None;
    }
    let mut out = Vec::new();
    go(primes, target, k, 3, &mut out).then_some(out)
}

/// For each `k` in `[2, k_max]` and `c` in layer `k − 1` inside the window,
/// checks `3(k − 1) + c` is a sum of `k` odd primes.
pub fn verify_absorption(
    primes: &PrimeTable,
    table: &StrataTable,
    k_max: u32,
    lo: u64,
    hi: u64,
    exec: Exec,
) -> Result<AbsorptionReport> {
    if lo > hi {
        return Err(Error::InvertedWindow { lo, hi });
    }
    if hi > table.limit {
        return Err(Error::BeyondLimit {
            what: "absorption window",
            value: hi,
            limit: table.limit,
        });
    }
    let mut levels = Vec::new();
    for k in 2..=k_max.max(1) {
        let members: Vec<u64> = table
            .layer_members(k - 1)
            .filter(|&c| c >= lo && c <= hi)
            .collect();
        let shift = 3 * (k as u64 - 1);
        if let Some(&top) = members.last() {
            if top + shift > primes.limit() {
                return Err(Error::BeyondLimit {
                    what: "absorption target",
                    value: top + shift,
                    limit: primes.limit(),
                });
            }
        }
        let reps = exec.map_slice(&members, |&c| sum_of_odd_primes(primes, shift + c, k));
        let failures: Vec<u64> = members
            .iter()
            .zip(&reps)
            .filter(|(_, r)| r.is_none())
            .map(|(&c, _)| c)
            .collect();
        let sample = members.first().zip(reps.first().and_then(|r| r.as_ref())).map(|(c, r)| {
            let parts: Vec<String> = r.iter().map(u64::to_string).collect();
            format!("{shift} + {c} = {}", parts.join(" + "))
        });
        levels.push(AbsorptionLevel {
            k,
            checked: members.len() as u64,
            failures,
            sample,
        });
    }
    let ok = levels.iter().all(|l| l.failures.is_empty());
    Ok(AbsorptionReport {
        window: (lo, hi),
        levels,
        ok,
    })
}

/// Windowed `n·Z^o_{≥3} = n·P_{≥3}` on `[3n, hi]`, plus
/// `n·Z_{≥2} = n·P_{≥2}` on `[2n, hi]` when `n ≥ 3`.
pub fn nfold_collapse_check(
    primes: &PrimeTable,
    n: u64,
    hi: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    if n < 2 {
        return Err(Error::invalid("n-fold collapse needs n >= 2"));
    }
    if hi < 3 * n {
        return Err(Error::invalid(format!("window [3, {hi}] is too small for {}", 3 * n)));
    }
    let ctx = SetContext::new(primes);
    let odd = SetSpec::odd_ge(3).to_window(&ctx, 3, hi)?;
    let p3 = SetSpec::primes_ge(3).to_window(&ctx, 3, hi)?;
    let mut odd_v = compare_sumsets(&odd, n, &p3, n, exec)?;
    odd_v.note = match odd_v.status {
        Status::Fails => format!("{n}·odd>=3 vs {n}·primes>=3: {}", odd_v.note),
        _ => format!("{n}·odd>=3 = {n}·primes>=3 on [{}, {hi}]; tail beyond {hi} unproved", 3 * n),
    };
    let mut parts = vec![odd_v];
    if n >= 3 {
        let ints = SetSpec::term(Term::IntGe(2)).to_window(&ctx, 2, hi)?;
        let p2 = SetSpec::primes_ge(2).to_window(&ctx, 2, hi)?;
        let mut v = compare_sumsets(&ints, n, &p2, n, exec)?;
        v.note = match v.status {
            Status::Fails => format!("{n}·int>=2 vs {n}·primes>=2: {}", v.note),
            _ => format!("{n}·int>=2 = {n}·primes>=2 on [{}, {hi}]; tail beyond {hi} unproved", 2 * n),
        };
        parts.push(v);
    }
    Ok(RelationVerdict::meet(parts))
}

/// Windowed evidence for `2·S_{≥p} ⊆ 2·P_{≥p}` and `3 + P_{≥k} ⊆ 2·P_{≥5}`.
///
/// All sets are restricted from 1 so sums are exact on `[2, hi]`.
pub fn conjecture34_evidence(
    primes: &PrimeTable,
    p: u64,
    shift_bound: u64,
    hi: u64,
    exec: Exec,
) -> Result<EvidenceReport> {
    if p == 2 {
        return Err(Error::invalid("p = 2 is handled by the Z>=2 witness 11 = 4 + 7"));
    }
    if p % 2 == 0 || !primes.is_prime(p)? {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if hi > primes.limit() {
        return Err(Error::BeyondLimit {
            what: "evidence window",
            value: hi,
            limit: primes.limit(),
        });
    }
    let ctx = SetContext::new(primes);
    let rough = SetSpec::term(Term::RoughGe(p)).to_window(&ctx, 1, hi)?;
    let pp = SetSpec::primes_ge(p).to_window(&ctx, 1, hi)?;
    let two_s = crate::intsets::iterated_sumset(&rough, 2, exec)?;
    let two_p = crate::intsets::iterated_sumset(&pp, 2, exec)?;
    let rough_violations: Vec<u64> = two_s.iter().filter(|&s| !two_p.contains(s)).collect();
    let p5 = SetSpec::primes_ge(5).to_window(&ctx, 1, hi)?;
    let two_p5 = crate::intsets::iterated_sumset(&p5, 2, exec)?;
    let shift_violations: Vec<u64> = primes
        .primes()
        .skip_while(|&q| q < shift_bound)
        .take_while(|&q| q + 3 <= hi)
        .filter(|&q| !two_p5.contains(q + 3))
        .collect();
    Ok(EvidenceReport {
        p,
        window: (1, hi),
        certified_range: CertifiedRange::window(2, hi),
        rough_violations,
        shift_bound,
        shift_violations,
    })
}

/// Verdict form of the stratification census: layer 1 is everything.
pub fn layer_one_verdict(table: &StrataTable) -> RelationVerdict {
    match table.entries.iter().find(|e| e.layer != Some(1)) {
        None => RelationVerdict::on_window(
            format!("all {} odd composites <= {} lie in layer 1", table.entries.len(), table.limit),
            CertifiedRange::window(9, table.limit),
        ),
        Some(e) => RelationVerdict::fails(
            Counterexample::Value(e.c),
            format!("{} has layer {:?}", e.c, e.layer),
        ),
    }
}
