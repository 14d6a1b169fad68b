//! Sum-factor collapse relations over the integers and over `Z/mZ`.
//!
//! The crate is layered: [`sieve`] supplies primes and odd composites,
//! [`intsets`] the set representations and sumset kernels, [`collapse`] and
//! [`strata`] the relation checkers over `Z`, and [`finite_ring`] the
//! exhaustive analogues over `Z/mZ`. [`suite`] bundles the named checks
//! into one deterministic report.

pub mod collapse;
pub mod error;
pub mod exec;
pub mod finite_ring;
pub mod intsets;
pub mod sieve;
pub mod strata;
pub mod suite;

pub use error::{Error, Result};
pub use exec::Exec;
pub use intsets::{RelationVerdict, Status};
pub use sieve::{build_table, CompositeIndex, PrimeTable};
