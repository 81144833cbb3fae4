//! Term rewriting for APTC: normalization of closed terms to basic terms
//! with a replayable trace, AC-equality, and termination evidence for the
//! rule set.

pub mod basic;
pub mod lpo;
pub mod normalize;
pub mod trace;

pub use aptc_term::eq_ac;
pub use basic::{is_basic, step_of, step_term, BasicTerm, Branch, Step};
pub use lpo::{check_all_rules, lpo_check, LpoResult, OrientedRule, Pat, PathOrdering};
pub use normalize::{
    normalize, normalize_with, canonical_order, unless_atoms, CausalOrder, NormalizeOptions, Normalized, RedexOrder, RewriteError,
    DEFAULT_BUDGET,
};
pub use trace::{path_string, replace_at, replay, subterm_at, ReplayError, RewriteTrace, TraceEntry};
