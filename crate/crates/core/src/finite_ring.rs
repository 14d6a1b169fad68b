//! Exhaustive relation checks in `Z/mZ` for `m ≤ 30`.
//!
//! Subsets are `u32` masks, bit `i` standing for the residue `i`. Every
//! decision here is exact: sumsets, closures and subset scans are finite.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;

pub const MAX_MODULUS: u32 = 30;
/// Largest `|B|` for a scan over subsets of `B`.
pub const MAX_SUBSET_BITS: u32 = 20;
/// Largest modulus for a scan over supersets.
pub const MAX_SUPERSET_MODULUS: u32 = 24;
/// Largest modulus for a scan over every subset of the ring.
pub const MAX_OPTIMAL_MODULUS: u32 = 16;
/// Largest relation table, in rows.
pub const MAX_TABLE_ROWS: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZmSubset {
    modulus: u32,
    mask: u32,
}

impl ZmSubset {
    pub fn new(modulus: u32, mask: u32) -> Result<Self> {
        check_modulus(modulus)?;
        if u64::from(mask) >> modulus != 0 {
            return Err(Error::invalid(format!(
                "mask {mask:#x} has bits at or above the modulus {modulus}"
            )));
        }
        Ok(ZmSubset { modulus, mask })
    }

    /// Residues are reduced mod `modulus`.
    pub fn from_elems(modulus: u32, elems: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_modulus(modulus)?;
        let mask = elems
            .into_iter()
            .fold(0u32, |m, e| m | 1 << (e % u64::from(modulus)));
        Ok(ZmSubset { modulus, mask })
    }

    pub fn full(modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ZmSubset {
            modulus,
            mask: full_mask(modulus),
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.modulus && self.mask >> a & 1 == 1
    }

    pub fn elems(&self) -> Vec<u32> {
        (0..self.modulus).filter(|&a| self.contains(a)).collect()
    }

    pub fn is_subset_of(&self, other: &ZmSubset) -> bool {
        self.mask & !other.mask == 0
    }

    fn with_mask(&self, mask: u32) -> ZmSubset {
        ZmSubset {
            modulus: self.modulus,
            mask,
        }
    }

    pub fn without(&self, a: u32) -> ZmSubset {
        self.with_mask(self.mask & !(1 << a))
    }

    /// Image under `Z/mZ → Z/dZ`.
    pub fn reduce(&self, d: u32) -> Result<ZmSubset> {
        if d < 2 || self.modulus % d != 0 {
            return Err(Error::invalid(format!("{d} does not divide {} (or is < 2)", self.modulus)));
        }
        ZmSubset::from_elems(d, self.elems().into_iter().map(u64::from))
    }
}

impl fmt::Display for ZmSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elems().iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl Serialize for ZmSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems().serialize(s)
    }
}

fn check_modulus(m: u32) -> Result<()> {
    if !(2..=MAX_MODULUS).contains(&m) {
        return Err(Error::invalid(format!("modulus {m} outside [2, {MAX_MODULUS}]")));
    }
    Ok(())
}

fn full_mask(m: u32) -> u32 {
    if m == 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

fn rotate(mask: u32, by: u32, m: u32) -> u32 {
    if by == 0 {
        return mask;
    }
    ((mask << by) | (mask >> (m - by))) & full_mask(m)
}

fn add_masks(a: u32, b: u32, m: u32) -> u32 {
    let mut out = 0;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        out |= rotate(b, i, m);
    }
    out
}

fn mul_masks(a: u32, b: u32, m: u32) -> u32 {
    let mut out = 0;
    for x in (0..m).filter(|&x| a >> x & 1 == 1) {
        for y in (0..m).filter(|&y| b >> y & 1 == 1) {
            out |= 1 << (x * y % m);
        }
    }
    out
}

fn same_modulus(a: &ZmSubset, b: &ZmSubset) -> Result<()> {
    if a.modulus != b.modulus {
        return Err(Error::ModulusMismatch(a.modulus as u8, b.modulus as u8));
    }
    Ok(())
}

fn nonempty(s: &ZmSubset) -> Result<()> {
    if s.is_empty() {
        return Err(Error::invalid("subset must be non-empty"));
    }
    Ok(())
}

/// `nS` in `Z/mZ`.
pub fn zm_sumset(s: &ZmSubset, n: u32) -> Result<ZmSubset> {
    nonempty(s)?;
    if n == 0 {
        return Err(Error::invalid("sumset order must be at least 1"));
    }
    let mut acc = s.mask;
    for _ in 1..n {
        let next = add_masks(acc, s.mask, s.modulus);
        // kS = (k+1)S forces every later level to agree.
        if next == acc {
            break;
        }
        acc = next;
    }
    Ok(s.with_mask(acc))
}

/// `⟨S⟩`, the multiplicative semigroup generated by `S`.
pub fn zm_closure(s: &ZmSubset) -> ZmSubset {
    let mut acc = s.mask;
    loop {
        let next = acc | mul_masks(acc, s.mask, s.modulus);
        if next == acc {
            return s.with_mask(acc);
        }
        acc = next;
    }
}

/// A shortest product of members of `c` equal to `target`, by BFS depth.
pub fn zm_product_witness(c: &ZmSubset, target: u32) -> Option<Vec<u32>> {
    let m = c.modulus;
    let gens = c.elems();
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; m as usize];
    let mut seen = vec![false; m as usize];
    let mut queue = VecDeque::new();
    for &g in &gens {
        if !seen[g as usize] {
            seen[g as usize] = true;
            queue.push_back(g);
        }
    }
    while let Some(x) = queue.pop_front() {
        if x == target {
            let mut out = Vec::new();
            let mut cur = x;
            while let Some((prev, g)) = parent[cur as usize] {
                out.push(g);
                cur = prev;
            }
            out.push(cur);
            out.reverse();
            return Some(out);
        }
        for &g in &gens {
            let y = x * g % m;
            if !seen[y as usize] {
                seen[y as usize] = true;
                parent[y as usize] = Some((x, g));
                queue.push_back(y);
            }
        }
    }
    None
}

/// One row of the exhaustive relation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelationTableEntry {
    pub modulus: u32,
    pub b: ZmSubset,
    pub c: ZmSubset,
    pub m_fold: u32,
    pub n_fold: u32,
    pub sumset_equal: bool,
    pub fp: bool,
    pub subset: bool,
}

impl RelationTableEntry {
    /// `B ⋗⇌_(m,n) C`.
    pub fn equiv(&self) -> bool {
        self.sumset_equal && self.fp
    }

    /// `B ⋗⇒_(m,n) C`.
    pub fn implies(&self) -> bool {
        self.equiv() && self.subset
    }
}

pub fn zm_check_relation(
    b: &ZmSubset,
    c: &ZmSubset,
    m_fold: u32,
    n_fold: u32,
) -> Result<RelationTableEntry> {
    same_modulus(b, c)?;
    nonempty(b)?;
    nonempty(c)?;
    Ok(RelationTableEntry {
        modulus: b.modulus,
        b: *b,
        c: *c,
        m_fold,
        n_fold,
        sumset_equal: zm_sumset(b, m_fold)? == zm_sumset(c, n_fold)?,
        fp: b.is_subset_of(&zm_closure(c)),
        subset: c.is_subset_of(b),
    })
}

fn implies_n(b: &ZmSubset, c: &ZmSubset, n: u32) -> bool {
    !c.is_empty()
        && c.is_subset_of(b)
        && b.is_subset_of(&zm_closure(c))
        && zm_sumset(b, n).ok() == zm_sumset(c, n).ok()
}

fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    // Descending enumeration of the non-empty submasks.
    let mut sub = mask;
    let mut done = mask == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = sub;
        sub = (sub.wrapping_sub(1)) & mask;
        if out == 0 || sub == 0 {
            done = true;
        }
        (out != 0).then_some(out)
    })
}

fn guard_subset_scan(b: &ZmSubset) -> Result<()> {
    if b.len() > MAX_SUBSET_BITS {
        return Err(Error::SizeGuard(format!(
            "subset scan over {} elements exceeds 2^{MAX_SUBSET_BITS}",
            b.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RdReport {
    pub b: ZmSubset,
    pub n: u32,
    /// `R_d(2^B)_n`, ordered by mask.
    pub members: Vec<ZmSubset>,
    pub reducible: bool,
    /// Members with no proper submember.
    pub minimal: Vec<ZmSubset>,
}

/// Every non-empty `C ⊆ B` with `B ⋗⇒_n C`.
pub fn zm_enumerate_rd(b: &ZmSubset, n: u32) -> Result<RdReport> {
    nonempty(b)?;
    guard_subset_scan(b)?;
    let mut members: Vec<ZmSubset> = submasks(b.mask)
        .map(|m| b.with_mask(m))
        .filter(|c| implies_n(b, c, n))
        .collect();
    members.sort();
    let minimal = members
        .iter()
        .filter(|c| !members.iter().any(|d| d != *c && d.is_subset_of(c)))
        .copied()
        .collect();
    Ok(RdReport {
        b: *b,
        n,
        reducible: members.len() > 1,
        members,
        minimal,
    })
}

/// Irreducible iff no single removal keeps `B ⋗⇒_n B \ {b}`.
pub fn zm_is_irreducible(b: &ZmSubset, n: u32) -> bool {
    b.elems().into_iter().all(|a| !implies_n(b, &b.without(a), n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpReport {
    pub b: ZmSubset,
    pub n: u32,
    /// `E_p(2^{A⊃B})_n`, ordered by mask.
    pub members: Vec<ZmSubset>,
    pub expandable: bool,
    pub maximal: Vec<ZmSubset>,
    /// Members `D` with no `D' ⊋ D` satisfying `D' ⋗⇒_n D`.
    pub unexpanded: Vec<ZmSubset>,
    pub maximal_iff_unexpanded: bool,
}

/// Every `D ⊇ B` in `Z/mZ` with `D ⋗⇒_n B`.
pub fn zm_enumerate_ep(b: &ZmSubset, n: u32) -> Result<EpReport> {
    nonempty(b)?;
    if b.modulus > MAX_SUPERSET_MODULUS {
        return Err(Error::SizeGuard(format!(
            "superset scan needs modulus <= {MAX_SUPERSET_MODULUS}, got {}",
            b.modulus
        )));
    }
    let free = full_mask(b.modulus) & !b.mask;
    let mut members: Vec<ZmSubset> = std::iter::once(0)
        .chain(submasks(free))
        .map(|extra| b.with_mask(b.mask | extra))
        .filter(|d| implies_n(d, b, n))
        .collect();
    members.sort();
    let maximal: Vec<ZmSubset> = members
        .iter()
        .filter(|d| !members.iter().any(|e| e != *d && d.is_subset_of(e)))
        .copied()
        .collect();
    // Any D' with D' ⋗⇒_n D is itself a member by transitivity.
    let unexpanded: Vec<ZmSubset> = members
        .iter()
        .filter(|d| {
            !members
                .iter()
                .any(|e| e != *d && d.is_subset_of(e) && implies_n(e, d, n))
        })
        .copied()
        .collect();
    Ok(EpReport {
        b: *b,
        n,
        expandable: members.len() > 1,
        maximal_iff_unexpanded: maximal == unexpanded,
        members,
        maximal,
        unexpanded,
    })
}

/// A strictly descending chain `B = B_0 ⊋ B_1 ⊋ ⋯ ⊋ B_r` with
/// `B_i ⋗⇒_n B_{i+1}` and `B_r` irreducible.
///
/// Each step drops the largest element whose removal keeps the relation.
pub fn zm_reduce_chain(b: &ZmSubset, n: u32) -> Result<Vec<ZmSubset>> {
    nonempty(b)?;
    guard_subset_scan(b)?;
    let mut chain = vec![*b];
    loop {
        let cur = *chain.last().unwrap();
        match cur.elems().into_iter().rev().map(|a| cur.without(a)).find(|c| implies_n(&cur, c, n)) {
            Some(next) => chain.push(next),
            None => return Ok(chain),
        }
    }
}

/// `⟨B⟩ ⋗⇒_n B` and `B` irreducible.
pub fn zm_is_optimal(b: &ZmSubset, n: u32) -> bool {
    !b.is_empty() && implies_n(&zm_closure(b), b, n) && zm_is_irreducible(b, n)
}

/// Every `n`-type optimal subset of `Z/mZ`, ordered by mask.
pub fn zm_optimal_subsets(m: u32, n: u32, exec: Exec) -> Result<Vec<ZmSubset>> {
    check_modulus(m)?;
    if m > MAX_OPTIMAL_MODULUS {
        return Err(Error::SizeGuard(format!(
            "optimal-subset scan needs modulus <= {MAX_OPTIMAL_MODULUS}, got {m}"
        )));
    }
    let hits = exec.map_range(1..(1usize << m), |mask| {
        let b = ZmSubset { modulus: m, mask: mask as u32 };
        zm_is_optimal(&b, n).then_some(b)
    });
    Ok(hits.into_iter().flatten().collect())
}

/// Optimal weight set over the window `n ∈ [2, n_max]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalWeights {
    pub modulus: u32,
    pub n_max: u32,
    /// `(n, number of n-type optimal subsets)`.
    pub counts: Vec<(u32, u64)>,
    pub weights: Vec<u32>,
    /// `|weights|`, windowed.
    pub degree: u32,
}

pub fn zm_optimal_weights(m: u32, n_max: u32, exec: Exec) -> Result<OptimalWeights> {
    if n_max < 2 {
        return Err(Error::invalid("n_max must be at least 2"));
    }
    let mut counts = Vec::new();
    let mut weights = Vec::new();
    for n in 2..=n_max {
        let c = zm_optimal_subsets(m, n, exec)?.len() as u64;
        counts.push((n, c));
        if c > 0 {
            weights.push(n);
        }
    }
    Ok(OptimalWeights {
        modulus: m,
        n_max,
        counts,
        degree: weights.len() as u32,
        weights,
    })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroupReport {
    pub modulus: u32,
    pub units: ZmSubset,
    /// `(b, U ⋗⇒_2 U \ {b})` for each unit `b`.
    pub removals: Vec<(u32, bool)>,
    pub all_or_nothing: bool,
    pub reducible: bool,
    /// Reducible iff the removal of 1 keeps the relation.
    pub identity_criterion: bool,
    /// `|U| ≤ 2` forces irreducibility.
    pub small_group_irreducible: bool,
}

const UNIT_FULL_SCAN_BITS: u32 = 12;

pub fn zm_unit_group_check(m: u32) -> Result<UnitGroupReport> {
    check_modulus(m)?;
    let units = ZmSubset::from_elems(m, (1..m).filter(|&a| gcd(a, m) == 1).map(u64::from))?;
    let removals: Vec<(u32, bool)> = units
        .elems()
        .into_iter()
        .map(|b| (b, implies_n(&units, &units.without(b), 2)))
        .collect();
    let all_or_nothing = removals.iter().all(|r| r.1) || removals.iter().all(|r| !r.1);
    // The full scan is independent of the single-removal test. By the
    // sandwich property the two agree, so large groups use the cheap one.
    let reducible = if units.len() <= UNIT_FULL_SCAN_BITS {
        zm_enumerate_rd(&units, 2)?.reducible
    } else {
        removals.iter().any(|r| r.1)
    };
    let e_removal = removals.iter().find(|r| r.0 == 1).map(|r| r.1).unwrap_or(false);
    Ok(UnitGroupReport {
        modulus: m,
        units,
        all_or_nothing,
        reducible,
        identity_criterion: reducible == e_removal,
        small_group_irreducible: units.len() > 2 || !reducible,
        removals,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomomorphismReport {
    pub source: RelationTableEntry,
    pub image: RelationTableEntry,
    pub preserved: bool,
}

/// Pushes `B ⋗⇒_n C` through `Z/mZ → Z/dZ`.
pub fn zm_homomorphism_check(d: u32, b: &ZmSubset, c: &ZmSubset, n: u32) -> Result<HomomorphismReport> {
    let source = zm_check_relation(b, c, n, n)?;
    if !source.implies() {
        return Err(Error::pre(format!("{b} ~({n},{n})~> {c} does not hold mod {}", b.modulus)));
    }
    let image = zm_check_relation(&b.reduce(d)?, &c.reduce(d)?, n, n)?;
    Ok(HomomorphismReport {
        source,
        preserved: image.implies(),
        image,
    })
}

/// Rows of the relation table for `B, C ⊆ Z/mZ` and `1 ≤ m_fold, n_fold ≤ n_max`.
///
/// Pairs are nested (`C ⊆ B`) unless `all_pairs`.
pub fn zm_relation_table(
    m: u32,
    n_max: u32,
    all_pairs: bool,
    exec: Exec,
) -> Result<Vec<RelationTableEntry>> {
    check_modulus(m)?;
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let pairs: u64 = if all_pairs {
        ((1u64 << m) - 1).pow(2)
    } else {
        3u64.pow(m) - (1u64 << m)
    };
    let rows = pairs.saturating_mul(u64::from(n_max).pow(2));
    if rows > MAX_TABLE_ROWS {
        return Err(Error::SizeGuard(format!(
            "relation table for modulus {m}, n_max {n_max} has {rows} rows (limit {MAX_TABLE_ROWS})"
        )));
    }
    let full = full_mask(m);
    let per_b = exec.map_range(1..(full as usize + 1), |bm| {
        let b = ZmSubset { modulus: m, mask: bm as u32 };
        let sums_b: Vec<u32> = (1..=n_max).map(|k| zm_sumset(&b, k).unwrap().mask).collect();
        let cs: Vec<u32> = if all_pairs {
            (1..=full).collect()
        } else {
            let mut v: Vec<u32> = submasks(b.mask).collect();
            v.sort_unstable();
            v
        };
        let mut out = Vec::with_capacity(cs.len() * (n_max * n_max) as usize);
        for cm in cs {
            let c = ZmSubset { modulus: m, mask: cm };
            let fp = b.is_subset_of(&zm_closure(&c));
            let subset = c.is_subset_of(&b);
            let sums_c: Vec<u32> = (1..=n_max).map(|k| zm_sumset(&c, k).unwrap().mask).collect();
            for mf in 1..=n_max {
                for nf in 1..=n_max {
                    out.push(RelationTableEntry {
                        modulus: m,
                        b,
                        c,
                        m_fold: mf,
                        n_fold: nf,
                        sumset_equal: sums_b[mf as usize - 1] == sums_c[nf as usize - 1],
                        fp,
                        subset,
                    });
                }
            }
        }
        out
    });
    Ok(per_b.into_iter().flatten().collect())
}

fn fmt_cell(s: &ZmSubset) -> String {
    let items: Vec<String> = s.elems().iter().map(u32::to_string).collect();
    items.join(" ")
}

pub fn relation_table_csv(rows: &[RelationTableEntry]) -> String {
    let mut out = String::from("modulus,b,c,m_fold,n_fold,sumset_equal,fp,subset,equiv,implies\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.modulus,
            fmt_cell(&r.b),
            fmt_cell(&r.c),
            r.m_fold,
            r.n_fold,
            r.sumset_equal,
            r.fp,
            r.subset,
            r.equiv(),
            r.implies()
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonogenicReport {
    pub modulus: u32,
    pub n: u32,
    /// The distinct `⟨a⟩`, ordered by mask.
    pub semigroups: Vec<ZmSubset>,
    /// Distinct pairs related both ways.
    pub violations: Vec<(ZmSubset, ZmSubset)>,
}

/// Antisymmetry of `⋗⇌_n` on the monogenic semigroups of `Z/mZ`.
pub fn zm_monogenic_antisymmetry(m: u32, n: u32) -> Result<MonogenicReport> {
    check_modulus(m)?;
    let mut semigroups: Vec<ZmSubset> = (0..m)
        .map(|a| zm_closure(&ZmSubset { modulus: m, mask: 1 << a }))
        .collect();
    semigroups.sort();
    semigroups.dedup();
    let mut violations = Vec::new();
    for (i, s) in semigroups.iter().enumerate() {
        for t in &semigroups[i + 1..] {
            if zm_check_relation(s, t, n, n)?.equiv() && zm_check_relation(t, s, n, n)?.equiv() {
                violations.push((*s, *t));
            }
        }
    }
    Ok(MonogenicReport {
        modulus: m,
        n,
        semigroups,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub modulus: u32,
    pub pairs: u64,
    /// Nested pairs with `B ⋗⇒_2 C`.
    pub related: u64,
    /// `(B, C, n)` with `B ⋗⇒_2 C` but not `B ⋗⇒_n C`.
    pub violations: Vec<(ZmSubset, ZmSubset, u32)>,
}

/// `B ⋗⇒_2 C ⟹ B ⋗⇒_n C` for `n = 3, 4, 5` over every nested pair.
pub fn zm_lift_sweep(m: u32, exec: Exec) -> Result<LiftReport> {
    check_modulus(m)?;
    if m > MAX_OPTIMAL_MODULUS {
        return Err(Error::SizeGuard(format!("lift sweep needs modulus <= {MAX_OPTIMAL_MODULUS}")));
    }
    let per_b = exec.map_range(1..(1usize << m), |bm| {
        let b = ZmSubset { modulus: m, mask: bm as u32 };
        let mut pairs = 0u64;
        let mut related = 0u64;
        let mut bad = Vec::new();
        for cm in submasks(b.mask) {
            let c = ZmSubset { modulus: m, mask: cm };
            pairs += 1;
            if implies_n(&b, &c, 2) {
                related += 1;
                for n in 3..=5 {
                    if !implies_n(&b, &c, n) {
                        bad.push((b, c, n));
                    }
                }
            }
        }
        (pairs, related, bad)
    });
    let mut report = LiftReport {
        modulus: m,
        pairs: 0,
        related: 0,
        violations: Vec::new(),
    };
    for (p, r, v) in per_b {
        report.pairs += p;
        report.related += r;
        report.violations.extend(v);
    }
    Ok(report)
}
