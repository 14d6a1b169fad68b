//! The relations `B ⋗⇌_(m,n) C` and `B ⋗⇒_(m,n) C`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::collapse::fp::check_fp;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::intsets::{
    compare_sumsets, nfold_cover_decision, CertifiedRange, Counterexample, RelationVerdict,
    SetContext, SetSpec, Status,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `mB = nC` and (FP).
    Equiv,
    /// Additionally `C ⊆ B`.
    Implies,
}

/// `B ~(m,n)~ C` or `B ~(m,n)~> C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub b: SetSpec,
    pub c: SetSpec,
    pub m: u64,
    pub n: u64,
    pub kind: RelationKind,
}

impl Relation {
    pub fn new(b: SetSpec, c: SetSpec, m: u64, n: u64, kind: RelationKind) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("relation orders must be at least 1"));
        }
        Ok(Relation { b, c, m, n, kind })
    }

    pub fn implies(b: SetSpec, c: SetSpec, n: u64) -> Result<Self> {
        Self::new(b, c, n, n, RelationKind::Implies)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.kind {
            RelationKind::Equiv => "~",
            RelationKind::Implies => "~>",
        };
        write!(f, "{} ~({},{}){} {}", self.b, self.m, self.n, arrow, self.c)
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let open = s.find("~(").ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "expected an operator of the form ~(m,n)~ or ~(m,n)~>".into(),
        })?;
        let close = s[open..].find(")~").map(|i| open + i).ok_or_else(|| Error::Parse {
            pos: open,
            msg: "unterminated operator, expected ')~'".into(),
        })?;
        let orders = &s[open + 2..close];
        let parse_order = |t: &str| -> Result<u64> {
            t.trim().parse::<u64>().map_err(|_| Error::Parse {
                pos: open + 2,
                msg: format!("bad order '{}'", t.trim()),
            })
        };
        let (m, n) = match orders.split_once(',') {
            Some((m, n)) => (parse_order(m)?, parse_order(n)?),
            None => {
                let n = parse_order(orders)?;
                (n, n)
            }
        };
        let mut rest = &s[close + 2..];
        let kind = if let Some(r) = rest.strip_prefix('>') {
            rest = r;
            RelationKind::Implies
        } else {
            RelationKind::Equiv
        };
        let b: SetSpec = s[..open].trim().parse()?;
        let c: SetSpec = rest.trim().parse()?;
        Relation::new(b, c, m, n, kind)
    }
}

fn sumset_component(
    ctx: &SetContext<'_>,
    rel: &Relation,
    lo: u64,
    hi: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    let (m, n) = (rel.m, rel.n);
    if m == n && rel.b == rel.c {
        return Ok(RelationVerdict::holds(
            format!("{n}B = {n}C since B = C"),
            CertifiedRange::from(0),
        ));
    }
    if m == n {
        if let (Some(b), Some(c)) = (rel.b.as_cofinite(), rel.c.as_cofinite()) {
            return nfold_cover_decision(&b, &c, n, exec);
        }
    }
    let bw = rel.b.to_window(ctx, 0, hi)?;
    let cw = rel.c.to_window(ctx, 0, hi)?;
    let v = compare_sumsets(&bw, m, &cw, n, exec)?;
    if v.status == Status::Fails {
        return Ok(v);
    }
    let tail = if m != n {
        "orders differ, so no finite certificate is attempted"
    } else {
        "the infinite tail is not certified"
    };
    Ok(RelationVerdict::on_window(
        format!("{m}B = {n}C on [{lo}, {hi}]; {tail}"),
        CertifiedRange::window(lo, hi),
    ))
}

fn subset_component(
    ctx: &SetContext<'_>,
    rel: &Relation,
    lo: u64,
    hi: u64,
) -> Result<RelationVerdict> {
    if rel.c.provably_subset_of(&rel.b, ctx) {
        return Ok(RelationVerdict::holds(
            "C is a subset of B by its terms",
            CertifiedRange::from(0),
        ));
    }
    let bw = rel.b.to_window(ctx, lo, hi)?;
    let cw = rel.c.to_window(ctx, lo, hi)?;
    match cw.first_not_in(&bw) {
        Some(x) => Ok(RelationVerdict::fails(
            Counterexample::Value(x),
            format!("{x} lies in C but not in B"),
        )),
        None => {
            let finite = rel.c.as_finite().is_some_and(|f| f.iter().all(|&v| v >= lo && v <= hi));
            if finite {
                Ok(RelationVerdict::holds(
                    "every member of the finite set C lies in B",
                    CertifiedRange::window(lo, hi),
                ))
            } else {
                Ok(RelationVerdict::on_window(
                    format!("C is a subset of B on [{lo}, {hi}]"),
                    CertifiedRange::window(lo, hi),
                ))
            }
        }
    }
}

/// Checks `rel` on `[lo, hi]`; the weakest component verdict wins.
///
/// The sumset part is exact for `B = C` and for two cofinite odd sets with
/// `m = n`; otherwise the sets are restricted from 0 so every sum up to
/// `hi` is exact, and the result is windowed.
pub fn check_relation(
    ctx: &SetContext<'_>,
    rel: &Relation,
    lo: u64,
    hi: u64,
    exec: Exec,
) -> Result<RelationVerdict> {
    if lo > hi {
        return Err(Error::InvertedWindow { lo, hi });
    }
    let mut parts = vec![
        sumset_component(ctx, rel, lo, hi, exec)?,
        check_fp(ctx, &rel.b, &rel.c, lo, hi)?,
    ];
    if rel.kind == RelationKind::Implies {
        parts.push(subset_component(ctx, rel, lo, hi)?);
    }
    Ok(RelationVerdict::meet(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::PrimeTable;

    fn rel(s: &str) -> Relation {
        s.parse().unwrap()
    }

    #[test]
    fn parse_round_trip() {
        let r = rel("odd>=3 ~(2,2)~> odd>=3 \\ {9,15,21}");
        assert_eq!((r.m, r.n, r.kind), (2, 2, RelationKind::Implies));
        assert_eq!(r.to_string(), "odd>=3 ~(2,2)~> odd>=3 \\ {9,15,21}");
        let r = rel("int>=1 ~(3)~ {2} | odd>=1");
        assert_eq!((r.m, r.n, r.kind), (3, 3, RelationKind::Equiv));
        assert!("odd>=3 ~(0,2)~ odd>=3".parse::<Relation>().is_err());
        assert!("odd>=3 odd>=3".parse::<Relation>().is_err());
        assert!("odd>=3 ~(2,x)~ odd>=3".parse::<Relation>().is_err());
    }

    #[test]
    fn relation_examples() {
        let t = PrimeTable::new(20_000, Exec::Sequential).unwrap();
        let ctx = SetContext::new(&t);
        let v = check_relation(&ctx, &rel("int>=1 ~(2,2)~> {2} | odd>=1"), 1, 2000, Exec::Parallel)
            .unwrap();
        assert_eq!(v.status, Status::HoldsOnWindow, "{v:?}");
        let v = check_relation(&ctx, &rel("odd>=3 ~(2,2)~ odd>=3 \\ {9,15,21}"), 3, 1000, Exec::Parallel)
            .unwrap();
        assert_eq!(v.status, Status::Holds, "{v:?}");
        let v = check_relation(&ctx, &rel("primes>=3 ~(3,3)~> primes>=3"), 3, 1000, Exec::Parallel)
            .unwrap();
        assert_eq!(v.status, Status::Holds);
        let v = check_relation(&ctx, &rel("odd>=3 ~(2,2)~> primes>=3"), 3, 20_000, Exec::Parallel)
            .unwrap();
        assert_eq!(v.status, Status::HoldsOnWindow);
        assert!(v.note.contains("tail"));
        let v = check_relation(&ctx, &rel("odd>=3 ~(2,2)~ odd>=3 \\ {3}"), 3, 1000, Exec::Parallel)
            .unwrap();
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.counterexample, Some(Counterexample::Value(6)));
        let v = check_relation(&ctx, &rel("odd>=5 ~(2,2)~> odd>=3"), 3, 100, Exec::Parallel).unwrap();
        assert_eq!(v.status, Status::Fails);
    }
}
