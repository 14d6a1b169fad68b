use std::fmt;

use serde::{Serialize, Serializer};

/// Outcome class of a relation check.
///
/// Ordered from weakest to strongest, so combining component verdicts is a
/// `min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Fails,
    /// A precondition of the claimed implication failed; the number names
    /// which hypothesis.
    HypothesisFailed(u8),
    /// Evidence-only reports (conjectures); never produced by a decider.
    Evidence,
    HoldsOnWindow,
    Holds,
}

impl Status {
    pub fn is_failure(self) -> bool {
        self == Status::Fails
    }

    pub fn holds(self) -> bool {
        matches!(self, Status::Holds | Status::HoldsOnWindow)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Fails => f.write_str("fails"),
            Status::HypothesisFailed(h) => write!(f, "hypothesis_failed:{h}"),
            Status::Evidence => f.write_str("evidence"),
            Status::HoldsOnWindow => f.write_str("holds_on_window"),
            Status::Holds => f.write_str("holds"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Counterexample {
    Value(u64),
    Tuple(Vec<u64>),
}

/// Inclusive range; `hi == None` means unbounded (an exact certificate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifiedRange {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl CertifiedRange {
    pub fn window(lo: u64, hi: u64) -> Self {
        CertifiedRange { lo, hi: Some(hi) }
    }

    pub fn from(lo: u64) -> Self {
        CertifiedRange { lo, hi: None }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.hi, Some(h) if h < self.lo)
    }
}

impl Serialize for CertifiedRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.lo, self.hi).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationVerdict {
    pub status: Status,
    pub counterexample: Option<Counterexample>,
    pub certified_range: Option<CertifiedRange>,
    pub note: String,
    pub witnesses: Vec<String>,
}

impl RelationVerdict {
    pub fn holds(note: impl Into<String>, range: CertifiedRange) -> Self {
        RelationVerdict {
            status: Status::Holds,
            counterexample: None,
            certified_range: Some(range),
            note: note.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn on_window(note: impl Into<String>, range: CertifiedRange) -> Self {
        RelationVerdict {
            status: Status::HoldsOnWindow,
            counterexample: None,
            certified_range: Some(range),
            note: note.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn fails(counterexample: Counterexample, note: impl Into<String>) -> Self {
        RelationVerdict {
            status: Status::Fails,
            counterexample: Some(counterexample),
            certified_range: None,
            note: note.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn hypothesis_failed(h: u8, note: impl Into<String>) -> Self {
        RelationVerdict {
            status: Status::HypothesisFailed(h),
            counterexample: None,
            certified_range: None,
            note: note.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witnesses.push(w.into());
        self
    }

    /// Conjunction of component verdicts: weakest status wins, the first
    /// failing component supplies the counterexample, notes are joined.
    pub fn meet(parts: impl IntoIterator<Item = RelationVerdict>) -> RelationVerdict {
        let parts: Vec<RelationVerdict> = parts.into_iter().collect();
        let weakest = parts
            .iter()
            .min_by_key(|v| v.status)
            .expect("meet of zero verdicts");
        let status = weakest.status;
        let counterexample = weakest.counterexample.clone();
        let certified_range = if status.holds() {
            parts
                .iter()
                .filter_map(|v| v.certified_range)
                .reduce(|a, b| CertifiedRange {
                    lo: a.lo.max(b.lo),
                    hi: match (a.hi, b.hi) {
                        (Some(x), Some(y)) => Some(x.min(y)),
                        (x, None) => x,
                        (None, y) => y,
                    },
                })
        } else {
            None
        };
        let note = parts
            .iter()
            .map(|v| v.note.as_str())
            .filter(|n| !n.is_empty())
            .collect::<Vec<_>>()
            .join("; ");
        let witnesses = parts.into_iter().flat_map(|v| v.witnesses).collect();
        RelationVerdict {
            status,
            counterexample,
            certified_range,
            note,
            witnesses,
        }
    }
}
