//! Relation checkers over `Z`: condition (FP), `⋗⇌` and `⋗⇒`, the
//! decomposition and partition enumerators, and the named theorem checks.

mod counting;
mod fp;
mod relation;
mod theorems;

pub use counting::{
    chebyshev_check, composite_identity_check, cor311_bounds, cor311_log_bound, cor39_report,
    prop310_bounds, prop310_check, BoundsReport, ChebyshevReport, Cor311Bounds, Cor39Report,
    IdentityReport, LogBoundReport, Prop310Report, CHEBYSHEV_UPPER, FLOAT_GUARD,
};
pub use fp::{
    check_fp, decompositions, factor_stats, k_partitions, Count, DecompositionRecord, FactorStats,
    PartitionRecord,
};
pub use relation::{check_relation, Relation, RelationKind};
pub use theorems::{
    first_violation, gap_subsequence_check, odoni_set, primorial_set, prop315_check, prop31_check,
    theorem312_check, theorem38_check, theorem38_hypothesis, Prop315Report, Prop31Case,
    Prop31Report, Theorem312Report,
};
