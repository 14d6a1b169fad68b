//! Textual set specifications.
//!
//! ```text
//! spec   := union [ '\' finite ]
//! union  := term { '|' term }
//! term   := 'odd>=' N | 'int>=' N | 'primes>=' N | 'rough>=' N
//!         | 'composites' [ '(' K ')' ] | 'strata(' K ')' | finite
//! finite := '{' [ N { ',' N } ] '}'
//! ```
//!
//! `rough>=x` is the set of integers `≥ 2` whose prime factors are all
//! `≥ x`; for `x ≤ 2` that is all of `Z_{≥2}`. `composites(k)` is the first
//! `k` odd composites, `strata(k)` the `k`-th Goldbach layer.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::intsets::cofinite::CofiniteOddSet;
use crate::intsets::window::WindowSet;
use crate::sieve::{CompositeIndex, PrimeTable};
use crate::strata::StrataTable;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    OddGe(u64),
    IntGe(u64),
    PrimesGe(u64),
    RoughGe(u64),
    Composites,
    FirstComposites(u64),
    Strata(u32),
    Finite(BTreeSet<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetSpec {
    terms: Vec<Term>,
    minus: BTreeSet<u64>,
}

/// Arithmetic backing needed to evaluate specs.
#[derive(Clone, Copy)]
pub struct SetContext<'a> {
    pub primes: &'a PrimeTable,
    pub strata: Option<&'a StrataTable>,
}

impl<'a> SetContext<'a> {
    pub fn new(primes: &'a PrimeTable) -> Self {
        SetContext {
            primes,
            strata: None,
        }
    }

    pub fn with_strata(mut self, strata: &'a StrataTable) -> Self {
        self.strata = Some(strata);
        self
    }

    fn strata(&self) -> Result<&'a StrataTable> {
        self.strata
            .ok_or_else(|| Error::invalid("strata(k) needs a computed strata table"))
    }

    fn prime(&self, n: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        self.primes.is_prime(n)
    }

    fn composite(&self, n: u64) -> Result<bool> {
        if n < 9 || n % 2 == 0 {
            return Ok(false);
        }
        self.primes.is_odd_composite(n)
    }

    fn rough(&self, n: u64, x: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        if x <= 2 {
            return Ok(true);
        }
        if n % 2 == 0 {
            return Ok(false);
        }
        if x - 1 > self.primes.limit() {
            return Err(Error::BeyondLimit {
                what: "roughness bound",
                value: x,
                limit: self.primes.limit(),
            });
        }
        Ok(self
            .primes
            .odd_primes()
            .take_while(|&q| q < x)
            .all(|q| n % q != 0))
    }
}

fn odd_ceil(a: u64) -> u64 {
    a | 1
}

impl Term {
    fn contains(&self, ctx: &SetContext<'_>, n: u64) -> Result<bool> {
        Ok(match self {
            Term::OddGe(a) => n % 2 == 1 && n >= *a,
            Term::IntGe(a) => n >= *a,
            Term::PrimesGe(q) => n >= *q && ctx.prime(n)?,
            Term::RoughGe(x) => ctx.rough(n, *x)?,
            Term::Composites => ctx.composite(n)?,
            Term::FirstComposites(k) => {
                ctx.composite(n)? && CompositeIndex::new(ctx.primes).rank(n)? <= *k
            }
            Term::Strata(k) => {
                ctx.composite(n)? && ctx.strata()?.layer(n)? == Some(*k)
            }
            Term::Finite(f) => f.contains(&n),
        })
    }

    fn fill(&self, ctx: &SetContext<'_>, ws: &mut WindowSet) -> Result<()> {
        let (lo, hi) = (ws.lo(), ws.hi());
        match self {
            Term::OddGe(a) => {
                for n in (odd_ceil(lo.max(*a))..=hi).step_by(2) {
                    ws.insert(n);
                }
            }
            Term::IntGe(a) => {
                for n in lo.max(*a)..=hi {
                    ws.insert(n);
                }
            }
            Term::PrimesGe(q) => {
                ctx.primes.pi(hi.max(2))?;
                let from = lo.max(*q);
                for p in ctx.primes.primes().skip_while(|&p| p < from) {
                    if p > hi {
                        break;
                    }
                    ws.insert(p);
                }
            }
            Term::RoughGe(x) if *x <= 2 => {
                for n in lo.max(2)..=hi {
                    ws.insert(n);
                }
            }
            Term::RoughGe(x) => {
                ctx.rough(3, *x)?;
                let mut part = WindowSet::empty(lo, hi)?;
                for n in (odd_ceil(lo.max(3))..=hi).step_by(2) {
                    part.insert(n);
                }
                for q in ctx.primes.odd_primes().take_while(|&q| q < *x) {
                    let first = lo.div_ceil(q).max(1) * q;
                    let mut m = if first % 2 == 0 { first + q } else { first };
                    while m <= hi {
                        part.remove(m);
                        m += 2 * q;
                    }
                }
                for n in part.iter() {
                    ws.insert(n);
                }
            }
            Term::Composites | Term::FirstComposites(_) | Term::Strata(_) => {
                let top = match self {
                    Term::FirstComposites(k) => {
                        hi.min(CompositeIndex::new(ctx.primes).nth(*k)?)
                    }
                    _ => hi,
                };
                if top >= 9 {
                    ctx.primes.pi(top)?;
                }
                let strata = match self {
                    Term::Strata(_) => Some(ctx.strata()?),
                    _ => None,
                };
                for n in (odd_ceil(lo.max(9))..=top).step_by(2) {
                    if !ctx.primes.is_prime_unchecked(n) {
                        let keep = match (self, strata) {
                            (Term::Strata(k), Some(t)) => t.layer(n)? == Some(*k),
                            _ => true,
                        };
                        if keep {
                            ws.insert(n);
                        }
                    }
                }
            }
            Term::Finite(f) => {
                for &v in f.range(lo..=hi) {
                    ws.insert(v);
                }
            }
        }
        Ok(())
    }

    fn is_composite_like(&self) -> bool {
        matches!(
            self,
            Term::Composites | Term::FirstComposites(_) | Term::Strata(_)
        )
    }

    /// Sound but incomplete `self ⊆ other` for infinite terms.
    fn subset_of(&self, other: &Term) -> bool {
        use Term::*;
        match (self, other) {
            (OddGe(a), OddGe(b)) => odd_ceil(*a) >= odd_ceil(*b),
            (OddGe(a), IntGe(b)) => odd_ceil(*a) >= *b,
            (OddGe(a), RoughGe(x)) => *x <= 3 && odd_ceil(*a) >= 3,
            (IntGe(a), IntGe(b)) => a >= b,
            (IntGe(a), RoughGe(x)) => *x <= 2 && *a >= 2,
            (PrimesGe(q), PrimesGe(r)) => (*q).max(2) >= *r,
            (PrimesGe(q), OddGe(b)) => (*q).max(2) >= 3 && *q >= *b,
            (PrimesGe(q), IntGe(b)) => (*q).max(2) >= *b,
            (PrimesGe(q), RoughGe(x)) => (*q).max(2) >= *x,
            (RoughGe(x), RoughGe(y)) => (*x).max(2) >= *y,
            (RoughGe(x), OddGe(b)) => *x >= 3 && *x >= *b,
            (RoughGe(x), IntGe(b)) => (*x).max(2) >= *b,
            (FirstComposites(k), FirstComposites(j)) => k <= j,
            (Strata(k), Strata(j)) => k == j,
            (t, Composites) => t.is_composite_like(),
            (t, OddGe(b)) if t.is_composite_like() => *b <= 9,
            (t, IntGe(b)) if t.is_composite_like() => *b <= 9,
            (t, RoughGe(x)) if t.is_composite_like() => *x <= 3,
            _ => false,
        }
    }

    /// True if the term holds every prime `≥ p0`.
    fn holds_primes_from(&self, p0: u64) -> bool {
        match self {
            Term::OddGe(a) => p0 >= 3 && *a <= p0,
            Term::IntGe(a) | Term::PrimesGe(a) | Term::RoughGe(a) => *a <= p0,
            _ => false,
        }
    }
}

impl SetSpec {
    pub fn new(terms: Vec<Term>, minus: impl IntoIterator<Item = u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("a set spec needs at least one term"));
        }
        Ok(SetSpec {
            terms,
            minus: minus.into_iter().collect(),
        })
    }

    pub fn term(t: Term) -> Self {
        SetSpec {
            terms: vec![t],
            minus: BTreeSet::new(),
        }
    }

    pub fn finite(values: impl IntoIterator<Item = u64>) -> Self {
        Self::term(Term::Finite(values.into_iter().collect()))
    }

    pub fn odd_ge(a: u64) -> Self {
        Self::term(Term::OddGe(a))
    }

    pub fn primes_ge(p: u64) -> Self {
        Self::term(Term::PrimesGe(p))
    }

    pub fn minus(mut self, values: impl IntoIterator<Item = u64>) -> Self {
        self.minus.extend(values);
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn excluded(&self) -> &BTreeSet<u64> {
        &self.minus
    }

    pub fn uses_strata(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::Strata(_)))
    }

    pub fn contains(&self, ctx: &SetContext<'_>, n: u64) -> Result<bool> {
        if self.minus.contains(&n) {
            return Ok(false);
        }
        for t in &self.terms {
            if t.contains(ctx, n)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `self ∩ [lo, hi]`, exact.
    pub fn to_window(&self, ctx: &SetContext<'_>, lo: u64, hi: u64) -> Result<WindowSet> {
        let mut ws = WindowSet::empty(lo, hi)?;
        for t in &self.terms {
            t.fill(ctx, &mut ws)?;
        }
        for &v in &self.minus {
            ws.remove(v);
        }
        Ok(ws)
    }

    /// The exact cofinite form, when the spec is `odd>=a \ F`.
    pub fn as_cofinite(&self) -> Option<CofiniteOddSet> {
        match self.terms.as_slice() {
            [Term::OddGe(a)] if odd_ceil(*a) >= 3 => {
                let lower = odd_ceil(*a);
                let ex = self
                    .minus
                    .iter()
                    .copied()
                    .filter(|&e| e % 2 == 1 && e >= lower);
                CofiniteOddSet::new(lower, ex).ok()
            }
            _ => None,
        }
    }

    /// The members, when every term is finite.
    pub fn as_finite(&self) -> Option<BTreeSet<u64>> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            match t {
                Term::Finite(f) => out.extend(f.iter().copied()),
                _ => return None,
            }
        }
        Some(out.difference(&self.minus).copied().collect())
    }

    /// Every member is odd and `≥ 3`. Sound, not complete.
    pub fn within_odd_ge3(&self) -> bool {
        self.terms.iter().all(|t| match t {
            Term::OddGe(a) => odd_ceil(*a) >= 3,
            Term::PrimesGe(q) => *q >= 3,
            Term::RoughGe(x) => *x >= 3,
            Term::Finite(f) => f.iter().all(|&v| v % 2 == 1 && v >= 3 || self.minus.contains(&v)),
            Term::IntGe(_) => false,
            _ => true,
        })
    }

    /// Every member is `≥ 2`. Sound, not complete.
    pub fn within_int_ge2(&self) -> bool {
        self.terms.iter().all(|t| match t {
            Term::OddGe(a) => odd_ceil(*a) >= 3,
            Term::IntGe(a) => *a >= 2,
            Term::Finite(f) => f.iter().all(|&v| v >= 2 || self.minus.contains(&v)),
            _ => true,
        })
    }

    /// True if every prime `≥ p0` is provably a member.
    pub fn covers_primes_from(&self, ctx: &SetContext<'_>, p0: u64) -> bool {
        if !self.terms.iter().any(|t| t.holds_primes_from(p0)) {
            return false;
        }
        self.minus
            .iter()
            .filter(|&&e| e >= p0)
            .all(|&e| matches!(ctx.prime(e), Ok(false)))
    }

    /// Sound but incomplete `self ⊆ other` on all of `Z`.
    pub fn provably_subset_of(&self, other: &SetSpec, ctx: &SetContext<'_>) -> bool {
        let terms_ok = self.terms.iter().all(|t| match t {
            Term::Finite(f) => f
                .iter()
                .filter(|v| !self.minus.contains(v))
                .all(|&v| matches!(other.contains(ctx, v), Ok(true))),
            t => other.terms.iter().any(|u| t.subset_of(u)),
        });
        terms_ok
            && other
                .minus
                .iter()
                .all(|&e| matches!(self.contains(ctx, e), Ok(false)))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::OddGe(a) => write!(f, "odd>={a}"),
            Term::IntGe(a) => write!(f, "int>={a}"),
            Term::PrimesGe(a) => write!(f, "primes>={a}"),
            Term::RoughGe(a) => write!(f, "rough>={a}"),
            Term::Composites => f.write_str("composites"),
            Term::FirstComposites(k) => write!(f, "composites({k})"),
            Term::Strata(k) => write!(f, "strata({k})"),
            Term::Finite(s) => fmt_finite(f, s),
        }
    }
}

fn fmt_finite(f: &mut fmt::Formatter<'_>, s: &BTreeSet<u64>) -> fmt::Result {
    let items: Vec<String> = s.iter().map(u64::to_string).collect();
    write!(f, "{{{}}}", items.join(","))
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{t}")?;
        }
        if !self.minus.is_empty() {
            f.write_str(" \\ ")?;
            fmt_finite(f, &self.minus)?;
        }
        Ok(())
    }
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Parser<'s> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected '{token}'"))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.err("expected a non-negative integer");
        }
        let text = &self.rest()[..digits];
        let v = text
            .parse::<u64>()
            .or_else(|_| self.err(format!("integer {text} is too large")))?;
        self.pos += digits;
        Ok(v)
    }

    fn finite(&mut self) -> Result<BTreeSet<u64>> {
        self.expect("{")?;
        let mut out = BTreeSet::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.insert(self.number()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn ident(&mut self) -> &'s str {
        self.skip_ws();
        let len = self
            .rest()
            .bytes()
            .take_while(u8::is_ascii_alphabetic)
            .count();
        let id = &self.rest()[..len];
        self.pos += len;
        id
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.rest().starts_with('{') {
            return Ok(Term::Finite(self.finite()?));
        }
        let start = self.pos;
        let id = self.ident();
        let make: fn(u64) -> Term = match id {
            "odd" => Term::OddGe,
            "int" => Term::IntGe,
            "primes" => Term::PrimesGe,
            "rough" => Term::RoughGe,
            "composites" => {
                if self.eat("(") {
                    let k = self.number()?;
                    self.expect(")")?;
                    return Ok(Term::FirstComposites(k));
                }
                return Ok(Term::Composites);
            }
            "strata" => {
                self.expect("(")?;
                let k = self.number()?;
                if k == 0 || k > u32::MAX as u64 {
                    return self.err("strata layer must be a positive 32-bit integer");
                }
                self.expect(")")?;
                return Ok(Term::Strata(k as u32));
            }
            "" => return self.err("expected a set term"),
            other => {
                self.pos = start;
                return self.err(format!("unknown set term '{other}'"));
            }
        };
        self.expect(">=")?;
        Ok(make(self.number()?))
    }

    fn spec(&mut self) -> Result<SetSpec> {
        let mut terms = vec![self.term()?];
        while self.eat("|") {
            terms.push(self.term()?);
        }
        let minus = if self.eat("\\") {
            self.finite()?
        } else {
            BTreeSet::new()
        };
        self.skip_ws();
        if !self.rest().is_empty() {
            return self.err("unexpected trailing input");
        }
        Ok(SetSpec { terms, minus })
    }
}

impl FromStr for SetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser { src: s, pos: 0 }.spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;

    fn table() -> PrimeTable {
        PrimeTable::new(1000, Exec::Sequential).unwrap()
    }

    #[test]
    fn parse_and_roundtrip() {
        for text in [
            "odd>=3",
            "odd>=3 \\ {9,15,21}",
            "primes>=3",
            "rough>=5",
            "composites",
            "composites(22)",
            "strata(1)",
            "{2} | odd>=1",
            "int>=1",
        ] {
            let spec: SetSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.to_string().parse::<SetSpec>().unwrap(), spec);
        }
        assert!("odd>3".parse::<SetSpec>().is_err());
        assert!("evens>=2".parse::<SetSpec>().is_err());
        assert!("odd>=3 \\".parse::<SetSpec>().is_err());
        assert!("{1,2".parse::<SetSpec>().is_err());
        assert!("strata(0)".parse::<SetSpec>().is_err());
        let e = "odd>=3 junk".parse::<SetSpec>().unwrap_err();
        assert!(matches!(e, Error::Parse { pos: 7, .. }));
    }

    #[test]
    fn windows_match_pointwise() {
        let t = table();
        let ctx = SetContext::new(&t);
        for text in [
            "odd>=3 \\ {9}",
            "primes>=3",
            "primes>=2",
            "rough>=5",
            "rough>=2",
            "rough>=3",
            "composites",
            "composites(10)",
            "{2} | odd>=1",
            "int>=1 \\ {4,5}",
        ] {
            let spec: SetSpec = text.parse().unwrap();
            let ws = spec.to_window(&ctx, 1, 400).unwrap();
            for n in 1..=400 {
                assert_eq!(ws.contains(n), spec.contains(&ctx, n).unwrap(), "{text} at {n}");
            }
        }
        let primes: SetSpec = "primes>=3".parse().unwrap();
        assert_eq!(
            primes.to_window(&ctx, 3, 20).unwrap().members(),
            vec![3, 5, 7, 11, 13, 17, 19]
        );
        let rough: SetSpec = "rough>=5".parse().unwrap();
        assert!(rough.contains(&ctx, 35).unwrap());
        assert!(!rough.contains(&ctx, 15).unwrap());
        assert!(primes.to_window(&ctx, 3, 2000).is_err());
    }

    #[test]
    fn symbolic_facts() {
        let t = table();
        let ctx = SetContext::new(&t);
        let s = |x: &str| x.parse::<SetSpec>().unwrap();
        assert_eq!(
            s("odd>=3 \\ {9,15}").as_cofinite(),
            Some(CofiniteOddSet::new(3, [9, 15]).unwrap())
        );
        assert_eq!(s("odd>=1").as_cofinite(), None);
        assert_eq!(s("primes>=3").as_cofinite(), None);
        assert!(s("odd>=3 \\ {9}").covers_primes_from(&ctx, 3));
        assert!(!s("odd>=3 \\ {7}").covers_primes_from(&ctx, 3));
        assert!(s("primes>=3").provably_subset_of(&s("odd>=3"), &ctx));
        assert!(s("composites").provably_subset_of(&s("odd>=3 \\ {3}"), &ctx));
        assert!(!s("composites").provably_subset_of(&s("odd>=3 \\ {9}"), &ctx));
        assert!(s("odd>=3 \\ {9,15}").provably_subset_of(&s("odd>=3"), &ctx));
        assert!(s("{9,15}").provably_subset_of(&s("composites"), &ctx));
        assert!(!s("odd>=3").provably_subset_of(&s("primes>=3"), &ctx));
        assert!(s("odd>=3").within_odd_ge3());
        assert!(!s("int>=3").within_odd_ge3());
        assert!(s("int>=2").within_int_ge2());
        assert_eq!(s("{3,9} \\ {9}").as_finite(), Some([3].into()));
    }
}
