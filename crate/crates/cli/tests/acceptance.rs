//! Acceptance battery: one PASS/FAIL line per criterion, then a single
//! assertion over all of them. Run with `--nocapture` to see the lines on
//! success. Limits, seeds and time budgets are pinned below.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumfactor_core::collapse::{
    composite_identity_check, cor39_report, decompositions, prop310_bounds, prop310_check,
    theorem38_check, theorem38_hypothesis,
};
use sumfactor_core::finite_ring::{
    zm_check_relation, zm_homomorphism_check, zm_is_optimal, zm_lift_sweep, ZmSubset,
};
use sumfactor_core::intsets::{iterated_sumset, nfold_cover_decision, CofiniteOddSet, SetContext, SetSpec, WindowSet};
use sumfactor_core::strata::{compute_strata, nfold_collapse_check, sum_of_odd_primes, verify_absorption, verify_partition};
use sumfactor_core::{CompositeIndex, Exec, PrimeTable, Status};

const LIMIT: u64 = 1_000_000;
const K_SWEEP: u64 = 10_000;
const ABSORPTION_HI: u64 = 100_000;
const NFOLD_HI: u64 = 100_000;
const IDENTITY_BUDGET: Duration = Duration::from_secs(5);
const SWEEP_BUDGET: Duration = Duration::from_secs(10);
const STRATA_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_TUPLES: usize = 100;
const PROPERTY_CASES: usize = 200;
const SEED: u64 = 0x5f_3d_2a;

type Outcome = Result<String, String>;

fn ensure(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn c1(t: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let r = composite_identity_check(t, LIMIT).map_err(|e| e.to_string())?;
    let dt = start.elapsed();
    ensure(
        r.violations.is_empty() && r.checked > 0 && dt < IDENTITY_BUDGET,
        format!("{} indices, 0 violations, {dt:.2?}", r.checked),
        format!("violations {:?}, {dt:.2?}", &r.violations[..r.violations.len().min(5)]),
    )
}

fn c2(t: &PrimeTable) -> Outcome {
    let r = cor39_report(t, 100).map_err(|e| e.to_string())?;
    ensure(
        r.initial_run == 22 && r.first_failure == Some((23, 93, 24)),
        "holds for i = 1..22, first failure i = 23 with pi(93) = 24".into(),
        format!("initial run {}, first failure {:?}", r.initial_run, r.first_failure),
    )
}

fn c3(t: &PrimeTable) -> Outcome {
    let r = prop310_bounds(t, LIMIT).map_err(|e| e.to_string())?;
    ensure(
        r.violations.is_empty() && r.checked > 0,
        format!("{} indices k >= 31, 0 violations", r.checked),
        format!("violations {:?}", &r.violations[..r.violations.len().min(5)]),
    )
}

fn c4_c5(t: &PrimeTable) -> (Outcome, Outcome) {
    let start = Instant::now();
    let r = match prop310_check(t, K_SWEEP, Exec::Parallel) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let dt = start.elapsed();
    let four = ensure(
        r.pair_failures == [4, 7] && dt < SWEEP_BUDGET,
        format!("pairs found for all k in [3, {K_SWEEP}] but 4, 7; {dt:.2?}"),
        format!("pair failures {:?}, {dt:.2?}", r.pair_failures),
    );
    let five = ensure(
        r.cor311_failures == [6, 14, 19],
        format!("exceptions exactly [6, 14, 19] over [3, {K_SWEEP}]"),
        format!("exceptions are {:?}, expected [6, 14, 19]", r.cor311_failures),
    );
    (four, five)
}

fn c6(t: &PrimeTable) -> Outcome {
    let idx = CompositeIndex::new(t);
    let first22 = idx.first(22).map_err(|e| e.to_string())?;
    let pool = idx.first(300).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut cases = vec![vec![9, 15, 21], first22];
    while cases.len() < RANDOM_TUPLES + 2 {
        let r = rng.gen_range(3..=22);
        let mut ks: Vec<u64> = pool.choose_multiple(&mut rng, r).copied().collect();
        ks.sort_unstable();
        if theorem38_hypothesis(t, &ks).map_err(|e| e.to_string())? {
            cases.push(ks);
        }
    }
    for ks in &cases {
        let v = theorem38_check(t, ks, 3, 2000, Exec::Parallel).map_err(|e| e.to_string())?;
        if v.status != Status::Holds {
            return Err(format!("{ks:?}: {} ({})", v.status, v.note));
        }
    }
    Ok(format!("{} removals hold exactly ({RANDOM_TUPLES} random)", cases.len()))
}

fn c7_c8(t: &PrimeTable) -> (Outcome, Outcome) {
    let start = Instant::now();
    let s = match compute_strata(t, LIMIT, Exec::Sequential) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let dt = start.elapsed();
    let p = verify_partition(t, &s);
    let census = s.census();
    let evens_bad = (6..=LIMIT + 3).step_by(2).find(|&e| sum_of_odd_primes(t, e, 2).is_none());
    let seven = match p {
        Ok(p) => ensure(
            p.ok && census.max_layer == 1 && census.unassigned == 0 && evens_bad.is_none() && dt < STRATA_BUDGET,
            format!("{} composites all in layer 1, partition total and disjoint, {dt:.2?} sequential", p.composites),
            format!("partition ok {}, max layer {}, even gap {evens_bad:?}, {dt:.2?}", p.ok, census.max_layer),
        ),
        Err(e) => Err(e.to_string()),
    };
    let layer1 = s.layer_members(1).filter(|&c| c <= ABSORPTION_HI).count() as u64;
    let eight = match verify_absorption(t, &s, 6, 9, ABSORPTION_HI, Exec::Parallel) {
        Ok(r) => {
            let k2 = &r.levels[0];
            let higher_vacuous = r.levels[1..].iter().all(|l| l.checked == 0);
            ensure(
                r.ok && k2.k == 2 && k2.checked == layer1 && higher_vacuous,
                format!("k = 2 over {} layer-1 composites, k = 3..6 vacuous", k2.checked),
                format!("absorption report {:?}", r.levels.iter().map(|l| (l.k, l.checked, l.failures.len())).collect::<Vec<_>>()),
            )
        }
        Err(e) => Err(e.to_string()),
    };
    (seven, eight)
}

fn c9(t: &PrimeTable) -> Outcome {
    let mut notes = Vec::new();
    for n in 2..=4 {
        let v = nfold_collapse_check(t, n, NFOLD_HI, Exec::Parallel).map_err(|e| e.to_string())?;
        if v.status != Status::HoldsOnWindow || (n >= 3 && !v.note.contains("int>=2")) {
            return Err(format!("n = {n}: {} ({})", v.status, v.note));
        }
        notes.push(n.to_string());
    }
    Ok(format!("n = {} on [3, {NFOLD_HI}], int>=2 variant for n = 3, 4", notes.join(", ")))
}

fn zm(m: u32, e: &[u64]) -> ZmSubset {
    ZmSubset::from_elems(m, e.iter().copied()).unwrap()
}

fn c10() -> Outcome {
    let rel = |b: &ZmSubset, c: &ZmSubset, m, n| zm_check_relation(b, c, m, n).unwrap();
    let (b4, c4) = (zm(4, &[1]), zm(4, &[3]));
    let z4 = rel(&b4, &c4, 2, 2).equiv() && !rel(&b4, &c4, 3, 3).equiv();
    let (b8, c8) = (zm(8, &[0, 2, 4]), zm(8, &[0, 2]));
    let z8 = rel(&b8, &c8, 3, 3).implies()
        && rel(&b8, &c8, 1, 2).implies()
        && rel(&b8, &c8, 2, 3).implies()
        && !rel(&b8, &c8, 2, 2).implies();
    let z6 = (2..=5).all(|n| zm_is_optimal(&zm(6, &[0, 2]), n));
    ensure(
        z4 && z8 && z6,
        "Z/4 (n=2 holds, n=3 fails), Z/8 rows, Z/6 {0,2} optimal for n in [2, 5]".into(),
        format!("Z/4 {z4}, Z/8 {z8}, Z/6 {z6}"),
    )
}

fn brute_count(a: u64, in_b: &dyn Fn(u64) -> bool) -> u64 {
    let own = u64::from(in_b(a));
    own + (2..a).filter(|d| a % d == 0 && in_b(*d)).map(|d| brute_count(a / d, in_b)).sum::<u64>()
}

fn tuple_sums(members: &[u64], n: u64, hi: u64) -> BTreeSet<u64> {
    let mut cur: BTreeSet<u64> = [0].into();
    for _ in 0..n {
        cur = cur
            .iter()
            .flat_map(|&s| members.iter().map(move |&m| s + m))
            .filter(|&s| s <= hi)
            .collect();
    }
    cur
}

fn random_mask(rng: &mut ChaCha8Rng, m: u32) -> u32 {
    rng.gen_range(1..(1u32 << m))
}

fn c11(t: &PrimeTable) -> Outcome {
    let ctx = SetContext::new(t);
    let idx = CompositeIndex::new(t);
    let pool = idx.first(30).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let err = |e: sumfactor_core::Error| e.to_string();

    // Lift on cofinite removals.
    let base = CofiniteOddSet::base(3).map_err(err)?;
    for _ in 0..PROPERTY_CASES {
        let ex: Vec<u64> = pool.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        let d = CofiniteOddSet::new(3, ex.clone()).map_err(err)?;
        if nfold_cover_decision(&base, &d, 2, Exec::Sequential).map_err(err)?.status == Status::Holds {
            for n in 3..=4 {
                if nfold_cover_decision(&base, &d, n, Exec::Sequential).map_err(err)?.status != Status::Holds {
                    return Err(format!("lift fails for removal {ex:?} at n = {n}"));
                }
            }
        }
    }
    // Lift on every nested pair of Z/m, m <= 8.
    for m in 2..=8 {
        let r = zm_lift_sweep(m, Exec::Parallel).map_err(err)?;
        if !r.violations.is_empty() {
            return Err(format!("ring lift fails mod {m}"));
        }
    }
    // Sandwich and transitivity on random ring triples.
    for _ in 0..PROPERTY_CASES {
        let m = rng.gen_range(2..=8);
        let (b, d, c) = (random_mask(&mut rng, m), random_mask(&mut rng, m), random_mask(&mut rng, m));
        let n = rng.gen_range(2..=4);
        let (bs, ds, cs) = (
            ZmSubset::new(m, b).unwrap(),
            ZmSubset::new(m, b & d).unwrap(),
            ZmSubset::new(m, b & d & c).unwrap(),
        );
        if !cs.is_empty() && zm_check_relation(&bs, &cs, n, n).map_err(err)?.implies() {
            let ok = zm_check_relation(&bs, &ds, n, n).map_err(err)?.implies()
                && zm_check_relation(&ds, &cs, n, n).map_err(err)?.implies();
            if !ok {
                return Err(format!("sandwich fails mod {m}: {bs} {ds} {cs}"));
            }
        }
        let (x, y, z) = (
            ZmSubset::new(m, b).unwrap(),
            ZmSubset::new(m, d).unwrap(),
            ZmSubset::new(m, c).unwrap(),
        );
        let eq = |p: &ZmSubset, q: &ZmSubset| zm_check_relation(p, q, n, n).map(|r| r.equiv());
        if eq(&x, &y).map_err(err)? && eq(&y, &z).map_err(err)? && !eq(&x, &z).map_err(err)? {
            return Err(format!("transitivity fails mod {m}: {x} {y} {z}"));
        }
    }
    // Sandwich on theorem 3.8 removals.
    let first22 = idx.first(22).map_err(err)?;
    for _ in 0..PROPERTY_CASES {
        let sub: Vec<u64> = first22.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !sub.is_empty() && theorem38_check(t, &sub, 3, 500, Exec::Sequential).map_err(err)?.status != Status::Holds {
            return Err(format!("sandwich fails for {sub:?}"));
        }
    }
    // Decomposition counts.
    let finite: BTreeSet<u64> = [2, 3, 4, 6, 9, 10, 15, 25, 49].into();
    for _ in 0..PROPERTY_CASES {
        let a = rng.gen_range(2..=10_000u64);
        let (spec, in_b): (SetSpec, Box<dyn Fn(u64) -> bool>) = match rng.gen_range(0..3) {
            0 => (SetSpec::odd_ge(3), Box::new(|v| v % 2 == 1 && v >= 3)),
            1 => (SetSpec::primes_ge(3), Box::new(|v| v % 2 == 1 && t.is_prime_unchecked(v))),
            _ => (SetSpec::finite(finite.iter().copied()), Box::new(|v| finite.contains(&v))),
        };
        let got = decompositions(&ctx, a, &spec).map_err(err)?.len() as u64;
        let want = brute_count(a, &*in_b);
        if got != want {
            return Err(format!("decompositions of {a} in {spec}: {got} vs {want}"));
        }
    }
    // Iterated sumsets against n-tuples.
    for _ in 0..PROPERTY_CASES {
        let lo = rng.gen_range(0..50u64);
        let hi = rng.gen_range(lo + 10..=500);
        let n = rng.gen_range(1..=4u64);
        let members: Vec<u64> = (lo..=hi).filter(|_| rng.gen_bool(0.15)).collect();
        if members.is_empty() || n * lo > hi {
            continue;
        }
        let ws = WindowSet::from_members(lo, hi, members.iter().copied()).map_err(err)?;
        let got = iterated_sumset(&ws, n, Exec::Sequential).map_err(err)?;
        let want = tuple_sums(&members, n, hi);
        if let Some(s) = (n * lo..=hi).find(|&s| got.contains(s) != want.contains(&s)) {
            return Err(format!("{n}-fold sumset differs at {s}"));
        }
    }
    // Quotient Z/8 -> Z/4.
    let mut related = 0;
    for _ in 0..PROPERTY_CASES {
        let b = random_mask(&mut rng, 8);
        let c = b & random_mask(&mut rng, 8);
        let n = rng.gen_range(2..=4);
        let (bs, cs) = (ZmSubset::new(8, b).unwrap(), ZmSubset::new(8, c).unwrap());
        if c != 0 && zm_check_relation(&bs, &cs, n, n).map_err(err)?.implies() {
            related += 1;
            if !zm_homomorphism_check(4, &bs, &cs, n).map_err(err)?.preserved {
                return Err(format!("quotient breaks {bs} ~> {cs}"));
            }
        }
    }
    Ok(format!("7 suites x {PROPERTY_CASES} cases (seed {SEED:#x}), {related} related quotient pairs"))
}

fn c12() -> Outcome {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_sumfactor"))
            .args(["verify", "--suite", "paper", "--limit", &LIMIT.to_string(), "--threads", threads])
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() == Some(2) || out.stdout.is_empty() {
            return Err(format!("run with {threads} threads: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let a = run("1")?;
    let b = run("4")?;
    ensure(
        a == b,
        format!("{} bytes identical for 1 and 4 threads", a.len()),
        "JSON differs between thread counts".into(),
    )
}

#[test]
fn acceptance() {
    let t = PrimeTable::new(LIMIT + 8, Exec::Parallel).unwrap();
    let (r4, r5) = c4_c5(&t);
    let (r7, r8) = c7_c8(&t);
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "composite index identity", c1(&t)),
        (2, "pi(c_i) >= i + 2 run", c2(&t)),
        (3, "pi(c_k) <= k - 1 bounds", c3(&t)),
        (4, "3 + c_k pair sweep", r4),
        (5, "2k membership sweep", r5),
        (6, "cofinite removals hold", c6(&t)),
        (7, "strata partition at 10^6", r7),
        (8, "absorption", r8),
        (9, "n-fold collapse", c9(&t)),
        (10, "finite-ring goldens", c10()),
        (11, "property suites", c11(&t)),
        (12, "thread-count determinism", c12()),
    ];
    let mut failed = Vec::new();
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("PASS {n:>2} {name}: {msg}"),
            Err(msg) => {
                println!("FAIL {n:>2} {name}: {msg}");
                failed.push(*n);
            }
        }
    }
    assert!(failed.is_empty(), "acceptance criteria failed: {failed:?}");
}
