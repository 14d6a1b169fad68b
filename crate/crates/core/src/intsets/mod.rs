//! Exact and windowed integer sets.
//!
//! Infinite sets are exact only in the cofinite form [`CofiniteOddSet`];
//! everything else is evaluated on a [`WindowSet`] whose `exact_from`
//! bound says where its membership is certified.

mod cofinite;
mod spec;
mod sumset;
mod verdict;
mod window;

pub use cofinite::{nfold_cover_decision, pair_sum_cover_decision, CofiniteOddSet};
pub use spec::{SetContext, SetSpec, Term};
pub use sumset::{
    compare_sumsets, find_representation, iterated_sumset, iterated_sumset_levels, sumset_equal_window,
    sumset_pair,
};
pub use verdict::{CertifiedRange, Counterexample, RelationVerdict, Status};
pub use window::{restrict, Membership, WindowSet};
