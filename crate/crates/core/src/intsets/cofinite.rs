use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::intsets::sumset::compare_sumsets;
use crate::intsets::verdict::{CertifiedRange, Counterexample, RelationVerdict, Status};
use crate::intsets::window::{restrict, Membership};

/// `Z^o_{≥lower}` minus a finite set of odd integers `≥ lower`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CofiniteOddSet {
    lower: u64,
    excluded: BTreeSet<u64>,
}

impl CofiniteOddSet {
    pub fn new(lower: u64, excluded: impl IntoIterator<Item = u64>) -> Result<Self> {
        if lower < 3 || lower % 2 == 0 {
            return Err(Error::invalid(format!(
                "lower bound {lower} must be an odd integer >= 3"
            )));
        }
        let excluded: BTreeSet<u64> = excluded.into_iter().collect();
        if let Some(&bad) = excluded.iter().find(|&&e| e % 2 == 0 || e < lower) {
            return Err(Error::invalid(format!(
                "excluded value {bad} is not an odd integer >= {lower}"
            )));
        }
        Ok(CofiniteOddSet { lower, excluded })
    }

    /// `Z^o_{≥lower}` itself.
    pub fn base(lower: u64) -> Result<Self> {
        Self::new(lower, [])
    }

    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn excluded(&self) -> &BTreeSet<u64> {
        &self.excluded
    }

    pub fn max_excluded(&self) -> Option<u64> {
        self.excluded.last().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        n % 2 == 1 && n >= self.lower && !self.excluded.contains(&n)
    }
}

impl Membership for CofiniteOddSet {
    fn contains(&self, n: u64) -> bool {
        CofiniteOddSet::contains(self, n)
    }
}

impl fmt::Display for CofiniteOddSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "odd>={}", self.lower)?;
        if !self.excluded.is_empty() {
            let items: Vec<String> = self.excluded.iter().map(u64::to_string).collect();
            write!(f, " \\ {{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// Smallest `a ≤ s/2` with `a, s − a ∈ d`.
pub(crate) fn pair_witness(d: &CofiniteOddSet, s: u64) -> Option<u64> {
    (d.lower..=s / 2)
        .step_by(2)
        .find(|&a| d.contains(a) && d.contains(s - a))
}

/// Exact decision of `2·Z^o_{≥3} = 2·D`.
///
/// Evens in `[6, 2M + 6]` are enumerated. Past `2M + 6` the interval
/// `(M, s/2]` has length above 3, so it holds an odd `a`; then `a` and
/// `s − a ≥ s/2 > M` both avoid the excluded set.
pub fn pair_sum_cover_decision(d: &CofiniteOddSet) -> Result<RelationVerdict> {
    if d.lower != 3 {
        return Err(Error::invalid(format!(
            "pair-sum cover decision needs lower bound 3, got {}",
            d.lower
        )));
    }
    let m = d.max_excluded().unwrap_or(0);
    let threshold = 2 * m + 6;
    for s in (6..=threshold).step_by(2) {
        if pair_witness(d, s).is_none() {
            return Ok(RelationVerdict::fails(
                Counterexample::Value(s),
                format!("{s} has no representation a + b with a, b in {d}"),
            ));
        }
    }
    Ok(RelationVerdict::holds(
        format!(
            "every even s in [6, {threshold}] checked by enumeration; for even s > {threshold} \
             pick odd a in ({m}, s/2], then a and s - a exceed {m}, the largest excluded value"
        ),
        CertifiedRange::from(6),
    ))
}

impl CofiniteOddSet {
    /// Every odd integer `>= self.full_from()` lies in the set.
    pub fn full_from(&self) -> u64 {
        let m = self.max_excluded().map_or(0, |m| m + 2);
        let l = self.lower.max(m);
        l | 1
    }

    /// Past this bound `nD` holds every integer of parity `n`.
    ///
    /// `n - 2` copies of `min D` plus `L + (t - L)` with `L = full_from`.
    pub fn nfold_threshold(&self, n: u64) -> u64 {
        match n {
            0 => 0,
            1 => self.full_from(),
            _ => (n - 2) * self.lower + 2 * self.full_from(),
        }
    }
}

/// Exact decision of `nB = nD` for two cofinite odd sets.
///
/// Both sides contain every integer `≡ n (mod 2)` past the larger
/// threshold and nothing of the other parity, so agreement on `[0, T]`
/// settles the question.
pub fn nfold_cover_decision(
    b: &CofiniteOddSet,
    d: &CofiniteOddSet,
    n: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    if n == 0 {
        return Err(Error::invalid("sumset order must be at least 1"));
    }
    let t = b.nfold_threshold(n).max(d.nfold_threshold(n));
    let bw = restrict(b, 0, t)?;
    let dw = restrict(d, 0, t)?;
    let v = compare_sumsets(&bw, n, &dw, n, exec)?;
    if v.status == Status::Fails {
        return Ok(v);
    }
    Ok(RelationVerdict::holds(
        format!(
            "{n}({b}) = {n}({d}) checked on [0, {t}]; past {t} both hold every integer of parity {}",
            n % 2
        ),
        CertifiedRange::from(0),
    ))
}
