//! Basic terms: the normal forms produced by the rewriter.
//!
//! Because `·` distributes over `+` only from the right, a normal form is a
//! prefix tree of steps: a sum of branches, each a step optionally followed
//! by a further basic term. `δ` is the empty sum; it appears only as the
//! whole term or as the continuation of a branch (`a·δ`).

use std::fmt;

use aptc_term::{print_term, Label, Node, Term};

/// A nonempty multiset of atomic labels, kept sorted.
pub type Step = Vec<Label>;

/// One summand: a step and what follows it (`None` means successful
/// termination after the step).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    pub step: Step,
    pub next: Option<BasicTerm>,
}

/// A basic term; the empty sum is `δ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicTerm {
    pub branches: Vec<Branch>,
}

impl BasicTerm {
    pub fn delta() -> Self {
        BasicTerm { branches: vec![] }
    }

    pub fn is_delta(&self) -> bool {
        self.branches.is_empty()
    }

    /// Sorts and deduplicates branches recursively.
    pub fn normalized(mut self) -> Self {
        for b in &mut self.branches {
            b.step.sort();
            if let Some(n) = b.next.take() {
                b.next = Some(n.normalized());
            }
        }
        self.branches.sort();
        self.branches.dedup();
        self
    }

    /// Reads a term of basic shape; `None` if the term is not basic.
    pub fn from_term(t: &Term) -> Option<BasicTerm> {
        if t.is_delta() {
            return Some(BasicTerm::delta());
        }
        let mut branches = Vec::new();
        for s in t.alt_operands() {
            branches.push(branch_of(&s)?);
        }
        Some(BasicTerm { branches }.normalized())
    }

    /// The canonical term of this basic term.
    pub fn to_term(&self) -> Term {
        let mut summands: Vec<Term> = self
            .branches
            .iter()
            .map(|b| {
                let head = step_term(&b.step);
                match &b.next {
                    None => head,
                    Some(n) => Term::seq(head, n.to_term()),
                }
            })
            .collect();
        summands.sort();
        Term::alt_all(summands)
    }

    /// Length of the longest step sequence.
    pub fn depth(&self) -> usize {
        self.branches
            .iter()
            .map(|b| 1 + b.next.as_ref().map_or(0, |n| n.depth()))
            .max()
            .unwrap_or(0)
    }

    /// Number of atom occurrences.
    pub fn atoms(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.step.len() + b.next.as_ref().map_or(0, |n| n.atoms()))
            .sum()
    }
}

/// A step as a right-nested parallel composition of sorted atoms.
pub fn step_term(step: &[Label]) -> Term {
    let mut atoms: Vec<Term> = step.iter().cloned().map(Term::atom).collect();
    atoms.sort();
    Term::par_all(atoms).unwrap_or_else(Term::delta)
}

fn branch_of(t: &Term) -> Option<Branch> {
    match t.node() {
        Node::Seq(x, y) => Some(Branch { step: step_of(x)?, next: Some(BasicTerm::from_term(y)?) }),
        _ => Some(Branch { step: step_of(t)?, next: None }),
    }
}

/// The atoms of a step term (`a`, `a ∥ b ∥ …`), excluding `δ`.
pub fn step_of(t: &Term) -> Option<Step> {
    let mut out = Vec::new();
    for op in t.par_operands() {
        match op.node() {
            Node::Atom(Label::Delta) => return None,
            Node::Atom(l) => out.push(l.clone()),
            _ => return None,
        }
    }
    out.sort();
    Some(out)
}

/// True iff `t` has basic shape: a sum of branches `s` or `s · t'` where
/// `s` is a parallel composition of atoms and `t'` is basic; `δ` only as
/// the whole term or a continuation.
pub fn is_basic(t: &Term) -> bool {
    BasicTerm::from_term(t).is_some()
}

impl fmt::Display for BasicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(&self.to_term()))
    }
}
