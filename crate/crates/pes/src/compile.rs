//! Compilation of terms into event structures.
//!
//! [`compile_basic`] gives the event structure of a normal form: steps are
//! sets of concurrent events that causally follow the whole prefix of their
//! branch, and different branches are in conflict. [`compile_structural`]
//! gives the standard event structure of terms over atoms, `δ`, `+`, `·`,
//! `∥`, abstraction and renaming, where `∥` is the disjoint union of its
//! operands; this is the free-concurrency reading under which the truly
//! concurrent equivalences are usually compared.

use aptc_rewrite::{BasicTerm, Branch};
use aptc_term::{Label, Node, Signature, Term};

use crate::pes::{bit, EventSet, Pes, PesError, MAX_EVENTS};

#[derive(Default)]
struct Builder {
    labels: Vec<Label>,
    causes: Vec<EventSet>,
    conflicts: Vec<(usize, usize)>,
    terminal: Vec<EventSet>,
}

impl Builder {
    fn event(&mut self, l: Label, causes: EventSet) -> Result<usize, PesError> {
        if self.labels.len() == MAX_EVENTS {
            return Err(PesError::TooManyEvents);
        }
        self.labels.push(l);
        self.causes.push(causes);
        Ok(self.labels.len() - 1)
    }

    fn conflict_all(&mut self, a: EventSet, b: EventSet) {
        for x in crate::pes::members(a) {
            for y in crate::pes::members(b) {
                self.conflicts.push((x, y));
            }
        }
    }

    fn finish(self) -> Result<Pes, PesError> {
        Pes::from_parts(self.labels, self.causes, &self.conflicts, self.terminal)
    }
}

/// The labels a step of a normal form contributes as events: shadows are
/// silent and dropped; a silent step is absorbed by visible events in the
/// same step (`x ∥ τ = x`); a step of silent events only is one τ event.
pub fn step_events(step: &[Label]) -> Vec<Label> {
    let visible: Vec<Label> = step.iter().filter(|l| l.is_visible()).cloned().collect();
    if !visible.is_empty() {
        visible
    } else if step.iter().any(Label::is_tau) {
        vec![Label::Tau]
    } else {
        vec![]
    }
}

/// Event structure of a basic term, with events numbered depth-first.
pub fn compile_basic(b: &BasicTerm) -> Result<Pes, PesError> {
    let mut bld = Builder::default();
    basic_into(&mut bld, b, 0)?;
    bld.finish()
}

fn basic_into(bld: &mut Builder, b: &BasicTerm, base: EventSet) -> Result<EventSet, PesError> {
    let mut branch_masks = Vec::new();
    for Branch { step, next } in &b.branches {
        let mut mask = 0;
        for l in step_events(step) {
            mask |= bit(bld.event(l, base)?);
        }
        let after = base | mask;
        match next {
            None => bld.terminal.push(after),
            Some(n) => mask |= basic_into(bld, n, after)?,
        }
        branch_masks.push(mask);
    }
    let mut all = 0;
    for (i, &m) in branch_masks.iter().enumerate() {
        for &o in &branch_masks[i + 1..] {
            bld.conflict_all(m, o);
        }
        all |= m;
    }
    Ok(all)
}

/// True iff `t` uses only atoms (no shadows), `+`, `·`, `∥`, abstraction
/// and renaming.
pub fn in_structural_fragment(t: &Term) -> bool {
    match t.node() {
        Node::Atom(l) => !l.is_shadow(),
        Node::Alt(x, y) | Node::Seq(x, y) | Node::Par(x, y) => in_structural_fragment(x) && in_structural_fragment(y),
        Node::Abstract(_, x) | Node::Rename(_, x) => in_structural_fragment(x),
        _ => false,
    }
}

/// Free-concurrency event structure of a term in the structural fragment.
/// In `x·y` a copy of `y` follows each terminating configuration of `x`;
/// `δ ∥ x = x ∥ δ = δ`.
pub fn compile_structural(t: &Term, sig: &Signature) -> Result<Pes, PesError> {
    if !in_structural_fragment(t) {
        return Err(PesError::NotInFragment(t.to_string()));
    }
    let mut bld = Builder::default();
    let (_, terms) = structural_into(&mut bld, t, sig, 0)?;
    bld.terminal = terms;
    bld.finish()
}

fn structural_into(
    bld: &mut Builder,
    t: &Term,
    sig: &Signature,
    base: EventSet,
) -> Result<(EventSet, Vec<EventSet>), PesError> {
    Ok(match t.node() {
        Node::Atom(Label::Delta) => (0, vec![]),
        Node::Atom(l) => {
            let e = bit(bld.event(l.clone(), base)?);
            (e, vec![base | e])
        }
        Node::Alt(x, y) => {
            let (mx, mut tx) = structural_into(bld, x, sig, base)?;
            let (my, ty) = structural_into(bld, y, sig, base)?;
            bld.conflict_all(mx, my);
            tx.extend(ty);
            (mx | my, tx)
        }
        Node::Seq(x, y) => {
            let (mx, tx) = structural_into(bld, x, sig, base)?;
            let mut all = mx;
            let mut terms = Vec::new();
            let mut copies: Vec<EventSet> = Vec::new();
            for tc in tx {
                let (my, ty) = structural_into(bld, y, sig, tc)?;
                for &c in &copies {
                    bld.conflict_all(c, my);
                }
                copies.push(my);
                all |= my;
                terms.extend(ty);
            }
            (all, terms)
        }
        Node::Par(x, y) => {
            if x.is_delta() || y.is_delta() {
                return Ok((0, vec![]));
            }
            let (mx, tx) = structural_into(bld, x, sig, base)?;
            let (my, ty) = structural_into(bld, y, sig, base)?;
            let terms = tx.iter().flat_map(|a| ty.iter().map(move |b| a | b)).collect();
            (mx | my, terms)
        }
        Node::Abstract(i, x) => {
            let (m, terms) = structural_into(bld, x, sig, base)?;
            for e in crate::pes::members(m) {
                if bld.labels[e].as_action().is_some_and(|a| i.contains(a)) {
                    bld.labels[e] = Label::Tau;
                }
            }
            (m, terms)
        }
        Node::Rename(f, x) => {
            if !sig.has_renaming(f) {
                return Err(PesError::UnknownRenaming(f.to_string()));
            }
            let (m, terms) = structural_into(bld, x, sig, base)?;
            for e in crate::pes::members(m) {
                if let Some(l) = sig.apply_renaming(f, &bld.labels[e]) {
                    bld.labels[e] = l;
                }
            }
            (m, terms)
        }
        _ => return Err(PesError::NotInFragment(t.to_string())),
    })
}
