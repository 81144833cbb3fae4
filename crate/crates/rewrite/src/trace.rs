//! Rewrite traces and their replay.

use std::fmt;

use aptc_term::{eq_ac, print_term, Term};

/// A position in a term: child indices from the root (0-based internally,
/// printed 1-based; the root prints as `ε`).
pub type Path = Vec<u32>;

/// One rule application.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub rule: &'static str,
    pub path: Path,
    pub before: Term,
    pub after: Term,
}

/// The sequence of rule applications performed by a normalization.
#[derive(Clone, Debug, Default)]
pub struct RewriteTrace {
    pub entries: Vec<TraceEntry>,
}

pub fn path_string(p: &[u32]) -> String {
    if p.is_empty() {
        "ε".to_string()
    } else {
        p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(".")
    }
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} @ {} : {} ==> {}",
            self.rule,
            path_string(&self.path),
            print_term(&self.before),
            print_term(&self.after)
        )
    }
}

impl fmt::Display for RewriteTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Why a trace fails to replay.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("entry {index}: no subterm at position {path}")]
    NoSuchPosition { index: usize, path: String },
    #[error("entry {index}: subterm at {path} does not match the recorded redex")]
    Mismatch { index: usize, path: String },
}

pub fn subterm_at(t: &Term, path: &[u32]) -> Option<Term> {
    let mut cur = t.clone();
    for &i in path {
        let next = cur.children().get(i as usize).map(|c| (*c).clone())?;
        cur = next;
    }
    Some(cur)
}

pub fn replace_at(t: &Term, path: &[u32], new: Term) -> Term {
    match path.split_first() {
        None => new,
        Some((&i, rest)) => {
            let kids: Vec<Term> = t
                .children()
                .into_iter()
                .enumerate()
                .map(|(k, c)| if k == i as usize { replace_at(c, rest, new.clone()) } else { c.clone() })
                .collect();
            t.with_children(kids)
        }
    }
}

/// Replays a trace from `start`: each entry's redex must match the current
/// subterm at its position modulo AC; the final term is returned.
pub fn replay(start: &Term, trace: &RewriteTrace) -> Result<Term, ReplayError> {
    let mut cur = start.clone();
    for (index, e) in trace.entries.iter().enumerate() {
        let sub = subterm_at(&cur, &e.path)
            .ok_or_else(|| ReplayError::NoSuchPosition { index, path: path_string(&e.path) })?;
        if !eq_ac(&sub, &e.before) {
            return Err(ReplayError::Mismatch { index, path: path_string(&e.path) });
        }
        cur = replace_at(&cur, &e.path, e.after.clone());
    }
    Ok(cur)
}
