//! Randomised invariants. Every block uses a fixed seed and at least 200
//! cases, so failures reproduce without a persistence file.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use sumfactor_core::collapse::{check_relation, decompositions, theorem38_check, Relation, RelationKind};
use sumfactor_core::finite_ring::{zm_check_relation, zm_homomorphism_check, zm_lift_sweep, ZmSubset};
use sumfactor_core::intsets::{iterated_sumset, SetContext, SetSpec, WindowSet};
use sumfactor_core::{CompositeIndex, Exec, PrimeTable, Status};

const DECOMP_LIMIT: u64 = 10_000;

fn config(seed: u64) -> Config {
    Config {
        cases: 256,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn primes() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(200_000, Exec::Parallel).unwrap())
}

fn composites(n: u64) -> Vec<u64> {
    CompositeIndex::new(primes()).first(n).unwrap()
}

fn cofinite(excluded: &[u64]) -> SetSpec {
    SetSpec::odd_ge(3).minus(excluded.iter().copied())
}

fn subset_of<T: Clone + std::fmt::Debug>(items: Vec<T>) -> impl Strategy<Value = Vec<T>> {
    let n = items.len();
    proptest::collection::vec(any::<bool>(), n).prop_map(move |keep| {
        items.iter().zip(keep).filter(|(_, k)| *k).map(|(v, _)| v.clone()).collect()
    })
}

fn zm_triple(max_m: u32) -> impl Strategy<Value = (u32, u32, u32, u32)> {
    (2..=max_m).prop_flat_map(|m| {
        let full = (1u32 << m) - 1;
        (Just(m), 1..=full, 1..=full, 1..=full)
    })
}

/// `Σ_k 1_B^{*k}` by repeated Dirichlet convolution over `[1, limit]`.
fn ordered_factorisation_counts(in_b: impl Fn(u64) -> bool, limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let base: Vec<u64> = (0..=n).map(|v| u64::from(v >= 2 && in_b(v as u64))).collect();
    let mut total = base.clone();
    let mut power = base.clone();
    loop {
        let mut next = vec![0u64; n + 1];
        for (d, &w) in power.iter().enumerate().skip(2) {
            if w == 0 {
                continue;
            }
            for b in 2..=n / d {
                next[d * b] += w * base[b];
            }
        }
        if next.iter().all(|&x| x == 0) {
            return total;
        }
        for (t, x) in total.iter_mut().zip(&next) {
            *t += x;
        }
        power = next;
    }
}

fn oracle(name: &'static str) -> &'static Vec<u64> {
    static TABLES: OnceLock<HashMap<&'static str, Vec<u64>>> = OnceLock::new();
    &TABLES.get_or_init(|| {
        let t = primes();
        let random: BTreeSet<u64> = [2u64, 3, 4, 6, 9, 10, 15, 25, 49].into();
        HashMap::from([
            ("odd", ordered_factorisation_counts(|v| v % 2 == 1, DECOMP_LIMIT)),
            ("primes", ordered_factorisation_counts(|v| v % 2 == 1 && t.is_prime_unchecked(v), DECOMP_LIMIT)),
            ("finite", ordered_factorisation_counts(|v| random.contains(&v), DECOMP_LIMIT)),
        ])
    })[name]
}

fn tuple_sums(members: &[u64], n: u64, hi: u64) -> BTreeSet<u64> {
    fn go(members: &[u64], start: usize, left: u64, acc: u64, hi: u64, out: &mut BTreeSet<u64>) {
        if left == 0 {
            out.insert(acc);
            return;
        }
        for (i, &m) in members.iter().enumerate().skip(start) {
            if acc + m * left > hi {
                break;
            }
            go(members, i, left - 1, acc + m, hi, out);
        }
    }
    let mut out = BTreeSet::new();
    go(members, 0, n, 0, hi, &mut out);
    out
}

proptest! {
    #![proptest_config(config(0x2014))]

    #[test]
    fn lift_on_cofinite_removals(ex in subset_of(composites(30))) {
        let ctx = SetContext::new(primes());
        let two = check_relation(&ctx, &Relation::implies(SetSpec::odd_ge(3), cofinite(&ex), 2)?, 3, 2000, Exec::Sequential)?;
        if two.status.holds() {
            for n in 3..=4 {
                let v = check_relation(&ctx, &Relation::implies(SetSpec::odd_ge(3), cofinite(&ex), n)?, 3, 2000, Exec::Sequential)?;
                prop_assert!(v.status.holds(), "n = {}: {:?}", n, v);
            }
        }
    }

    #[test]
    fn lift_on_ring_pairs((m, b, c, _) in zm_triple(8)) {
        let (b, c) = (ZmSubset::new(m, b)?, ZmSubset::new(m, b & c)?);
        if !c.is_empty() && zm_check_relation(&b, &c, 2, 2)?.implies() {
            for n in 3..=5 {
                prop_assert!(zm_check_relation(&b, &c, n, n)?.implies());
            }
        }
    }
}

#[test]
fn lift_on_every_ring_pair_up_to_8() {
    for m in 2..=8 {
        let r = zm_lift_sweep(m, Exec::Parallel).unwrap();
        assert!(r.violations.is_empty(), "m = {m}: {:?}", r.violations);
    }
}

proptest! {
    #![proptest_config(config(0x0203))]

    #[test]
    fn sandwich_on_theorem38_removals(ks in subset_of(composites(22)), keep in subset_of((0..22usize).collect())) {
        prop_assume!(!ks.is_empty());
        let v = theorem38_check(primes(), &ks, 3, 500, Exec::Sequential)?;
        prop_assert_eq!(v.status, Status::Holds);
        let sub: Vec<u64> = ks.iter().enumerate().filter(|(i, _)| keep.contains(i)).map(|(_, &k)| k).collect();
        if !sub.is_empty() {
            let v = theorem38_check(primes(), &sub, 3, 500, Exec::Sequential)?;
            prop_assert_eq!(v.status, Status::Holds, "{:?}", sub);
        }
    }

    #[test]
    fn sandwich_in_rings((m, b, d, c) in zm_triple(8), n in 2u32..=4) {
        let b_set = ZmSubset::new(m, b)?;
        let d_set = ZmSubset::new(m, b & d)?;
        let c_set = ZmSubset::new(m, b & d & c)?;
        if !c_set.is_empty() && zm_check_relation(&b_set, &c_set, n, n)?.implies() {
            prop_assert!(zm_check_relation(&b_set, &d_set, n, n)?.implies());
            prop_assert!(zm_check_relation(&d_set, &c_set, n, n)?.implies());
        }
    }
}

proptest! {
    #![proptest_config(config(0x0021))]

    #[test]
    fn transitivity_in_rings((m, b, c, d) in zm_triple(8), n in 2u32..=4) {
        let (b, c, d) = (ZmSubset::new(m, b)?, ZmSubset::new(m, c)?, ZmSubset::new(m, d)?);
        prop_assert!(zm_check_relation(&b, &b, n, n)?.equiv());
        if zm_check_relation(&b, &c, n, n)?.equiv() && zm_check_relation(&c, &d, n, n)?.equiv() {
            prop_assert!(zm_check_relation(&b, &d, n, n)?.equiv());
        }
    }

    #[test]
    fn transitivity_on_cofinite_sets(a in subset_of(composites(12)), b in subset_of(composites(12))) {
        let ctx = SetContext::new(primes());
        let mut both = a.clone();
        both.extend(&b);
        let rel = |x: &[u64], y: &[u64]| Relation::new(cofinite(x), cofinite(y), 2, 2, RelationKind::Equiv);
        let check = |r: Relation| check_relation(&ctx, &r, 3, 500, Exec::Sequential).map(|v| v.status.holds());
        if check(rel(&[], &a)?)? && check(rel(&a, &both)?)? {
            prop_assert!(check(rel(&[], &both)?)?);
        }
    }
}

proptest! {
    #![proptest_config(config(0x0209))]

    #[test]
    fn decomposition_counts_match_oracle(a in 2u64..=DECOMP_LIMIT, which in 0usize..3) {
        let ctx = SetContext::new(primes());
        let (name, spec) = match which {
            0 => ("odd", SetSpec::odd_ge(3)),
            1 => ("primes", SetSpec::primes_ge(3)),
            _ => ("finite", SetSpec::finite([2, 3, 4, 6, 9, 10, 15, 25, 49])),
        };
        let recs = decompositions(&ctx, a, &spec)?;
        prop_assert_eq!(recs.len() as u64, oracle(name)[a as usize], "a = {}, B = {}", a, name);
        for r in &recs {
            prop_assert_eq!(r.factors.iter().product::<u64>(), a);
        }
        let distinct: BTreeSet<&Vec<u64>> = recs.iter().map(|r| &r.factors).collect();
        prop_assert_eq!(distinct.len(), recs.len());
    }

    #[test]
    fn iterated_sumset_matches_tuples(
        lo in 0u64..40,
        span in 10u64..460,
        n in 1u64..=4,
        bits in proptest::collection::vec(0u8..16, 500),
    ) {
        let hi = (lo + span).min(500);
        // Sparse for larger n so the brute force stays cheap.
        let cut = [0u8, 8, 3, 2, 1][n as usize];
        let members: Vec<u64> = (lo..=hi).filter(|&v| bits[(v - lo) as usize] < cut).collect();
        prop_assume!(!members.is_empty() && n * lo <= hi);
        let ws = WindowSet::from_members(lo, hi, members.iter().copied())?;
        let got = iterated_sumset(&ws, n, Exec::Sequential)?;
        let want = tuple_sums(&members, n, hi);
        for s in n * lo..=hi {
            prop_assert_eq!(got.contains(s), want.contains(&s), "s = {}", s);
        }
    }

    #[test]
    fn quotient_mod8_to_mod4(b in 1u32..256, c in 1u32..256, n in 2u32..=4) {
        let b_set = ZmSubset::new(8, b)?;
        let c_set = ZmSubset::new(8, b & c)?;
        if !c_set.is_empty() && zm_check_relation(&b_set, &c_set, n, n)?.implies() {
            prop_assert!(zm_homomorphism_check(4, &b_set, &c_set, n)?.preserved);
        }
    }
}
