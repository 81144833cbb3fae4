//! Core data of the APTC workbench: event labels, signatures, process terms,
//! recursive specifications, and the specification language.

pub mod label;
pub mod parse;
pub mod print;
pub mod random;
pub mod signature;
pub mod spec;
pub mod term;

pub use label::{step_string, Action, Label, LabelKind};
pub use parse::{parse_closed, parse_spec, parse_term, var_key, ParseError};
pub use print::{canonical_print, print_term};
pub use signature::{validate_signature, Signature, SignatureViolation};
pub use spec::{RecSpec, SpecFile, UnresolvedCall};
pub use term::{eq_ac, LabelSet, Node, Term};

use std::collections::BTreeSet;
use std::sync::Arc;

/// Every recursion call occurring in `t`.
pub fn closed_variables(t: &Term) -> BTreeSet<(Arc<str>, Arc<str>)> {
    t.rec_calls()
}

/// Builds a label set from action names without data.
pub fn label_set(names: &[&str]) -> LabelSet {
    Arc::new(names.iter().map(|n| Action::new(n)).collect())
}
