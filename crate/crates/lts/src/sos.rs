//! Step layers of terms.
//!
//! `layers(t)` is the set of first steps of `t` together with their
//! residues, computed compositionally. The result coincides with the
//! branches of the normal form of `t`: shadow cancellation is applied in
//! the same places as by the rewriter (SC1 to SC3 only outside parallel
//! contexts, SC4 inside every step), and `Θ` and `◁` follow the conflict
//! elimination axioms.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

use aptc_pes::compile::step_events;
use aptc_rewrite::{step_term, unless_atoms, BasicTerm, Branch, CausalOrder};
use aptc_term::{Label, LabelSet, Node, SpecFile, Term, UnresolvedCall};

/// One first step and its residue (`None` is successful termination).
pub type Layer = (Vec<Label>, Option<Term>);

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LtsError {
    #[error(transparent)]
    Unresolved(#[from] UnresolvedCall),
    #[error("unguarded recursion through <{var}|{spec}>")]
    Unguarded { var: String, spec: String },
    #[error("recursion inside theta is not supported: {0}")]
    RecursionInTheta(String),
    #[error("unknown renaming {0}")]
    UnknownRenaming(String),
    #[error("conflict label {0} is not declared in the signature")]
    UndeclaredConflictLabel(String),
    #[error("state bound of {max} exceeded")]
    StateBound { max: usize },
    #[error("a basic form needs a recursion-free term: <{var}|{spec}>")]
    NotRecursionFree { var: String, spec: String },
}

/// The observable transitions of a state: steps after silent absorption
/// with their targets, and whether the state may terminate silently.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Steps {
    pub steps: Vec<(Vec<Label>, Option<Term>)>,
    pub silent_termination: bool,
}

/// Bound on the residues visited when collecting the labels a term can
/// perform (the right operand of `◁`).
const LABEL_SCAN_BOUND: usize = 100_000;

/// Canonical state representative: `·` right-associated, then AC-sorted.
pub fn canon(t: &Term) -> Term {
    right_assoc(t).canonical()
}

fn right_assoc(t: &Term) -> Term {
    match t.node() {
        Node::Atom(_) | Node::RecCall(..) => t.clone(),
        Node::Seq(x, y) => match x.node() {
            Node::Seq(a, b) => right_assoc(&Term::seq(a.clone(), Term::seq(b.clone(), y.clone()))),
            _ => Term::seq(right_assoc(x), right_assoc(y)),
        },
        _ => t.with_children(t.children().into_iter().map(right_assoc).collect()),
    }
}

/// Evaluator of step layers with memoization, for one specification.
pub struct Sos<'a> {
    spec: &'a SpecFile,
    causal: CausalOrder,
    memo: HashMap<(Term, bool), Rc<Vec<Layer>>>,
    labels_memo: HashMap<(Term, bool), Rc<BTreeSet<Label>>>,
    active: Vec<(Arc<str>, Arc<str>)>,
}

impl<'a> Sos<'a> {
    /// The causal order used by `◁` is taken from `root` and every
    /// recursion equation of `spec`.
    pub fn new(spec: &'a SpecFile, root: &Term) -> Self {
        let mut all = vec![root.clone()];
        for e in spec.recspecs.values() {
            all.extend(e.equations.values().cloned());
        }
        Sos {
            spec,
            causal: CausalOrder::of(&Term::alt_all(all)),
            memo: HashMap::new(),
            labels_memo: HashMap::new(),
            active: Vec::new(),
        }
    }

    /// First steps of `t`; `in_par` is true below `∥`, `|` or `≬`.
    pub fn layers(&mut self, t: &Term, in_par: bool) -> Result<Rc<Vec<Layer>>, LtsError> {
        let key = (t.clone(), in_par);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let mut out = self.compute(t, in_par)?;
        for (step, r) in &mut out {
            step.sort();
            if let Some(u) = r {
                // SC3: a lone shadow after a step outside parallel contexts.
                if !in_par && self.is_bare(u, false)? {
                    *r = None;
                } else {
                    *u = canon(u);
                }
            }
        }
        let out = Rc::new(dedup(out));
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn compute(&mut self, t: &Term, p: bool) -> Result<Vec<Layer>, LtsError> {
        Ok(match t.node() {
            Node::Atom(Label::Delta) => vec![],
            Node::Atom(l) => vec![(vec![l.clone()], None)],
            Node::Alt(..) => {
                let mut out = Vec::new();
                for op in t.alt_operands() {
                    out.extend(self.layers(&op, p)?.iter().cloned());
                }
                if !p {
                    // SC1: shadow summands disappear, one is kept if nothing else remains.
                    while out.len() > 1 {
                        match out.iter().position(is_bare_layer) {
                            Some(i) => {
                                out.remove(i);
                            }
                            None => break,
                        }
                    }
                }
                out
            }
            Node::Seq(x, y) => {
                if !p && self.is_bare(x, p)? {
                    return Ok(self.layers(y, p)?.to_vec());
                }
                if !p && self.is_bare(y, p)? {
                    return Ok(self.layers(x, p)?.to_vec());
                }
                self.layers(x, p)?
                    .iter()
                    .map(|(s, r)| {
                        let next = match r {
                            None => y.clone(),
                            Some(r) => Term::seq(r.clone(), y.clone()),
                        };
                        (s.clone(), Some(next))
                    })
                    .collect()
            }
            Node::Par(x, y) => self.par_layers(x, y)?,
            Node::Comm(x, y) => self.comm_layers(x, y)?,
            Node::FullPar(x, y) => {
                let mut out = self.par_layers(x, y)?;
                out.extend(self.comm_layers(x, y)?);
                out
            }
            Node::Theta(x) => {
                self.check_conflict_labels()?;
                let e = self.theta_expansion(x, p)?;
                self.layers(&e, p)?.to_vec()
            }
            Node::Unless(x, y) => {
                self.check_conflict_labels()?;
                let fs = self.reachable_labels(y, p)?;
                let lx = self.layers(x, p)?;
                let sig = &self.spec.signature;
                let causal = &self.causal;
                let relabel = |l: &Label| {
                    if fs.iter().any(|f| unless_atoms(sig, causal, l, f).1 == Label::Tau) {
                        Label::Tau
                    } else {
                        l.clone()
                    }
                };
                lx.iter()
                    .map(|(s, r)| (s.iter().map(relabel).collect(), r.as_ref().map(|r| Term::unless(r.clone(), y.clone()))))
                    .collect()
            }
            Node::Encap(h, x) => self
                .layers(x, p)?
                .iter()
                .filter(|(s, _)| !s.iter().any(|l| in_set(h, l)))
                .map(|(s, r)| (s.clone(), r.as_ref().map(|r| Term::encap(h.clone(), r.clone()))))
                .collect(),
            Node::Abstract(i, x) => self
                .layers(x, p)?
                .iter()
                .map(|(s, r)| {
                    let s = s.iter().map(|l| if in_set(i, l) { Label::Tau } else { l.clone() }).collect();
                    (s, r.as_ref().map(|r| Term::hide(i.clone(), r.clone())))
                })
                .collect(),
            Node::Project(0, _) => vec![],
            Node::Project(n, x) => self
                .layers(x, p)?
                .iter()
                .map(|(s, r)| (s.clone(), r.as_ref().map(|r| Term::project(n - 1, r.clone()))))
                .collect(),
            Node::Rename(f, x) => {
                let spec = self.spec;
                let sig = &spec.signature;
                if !sig.has_renaming(f) {
                    return Err(LtsError::UnknownRenaming(f.to_string()));
                }
                let lx = self.layers(x, p)?;
                lx.iter()
                    .map(|(s, r)| {
                        let s = s.iter().map(|l| sig.apply_renaming(f, l).expect("renaming exists")).collect();
                        (cancel_shadows(s), r.as_ref().map(|r| Term::rename(f, r.clone())))
                    })
                    .collect()
            }
            Node::RecCall(x, e) => {
                let call = (x.clone(), e.clone());
                if self.active.contains(&call) {
                    return Err(LtsError::Unguarded { var: x.to_string(), spec: e.to_string() });
                }
                let body = self.spec.body(x, e)?.clone();
                self.active.push(call);
                let r = self.layers(&body, p);
                self.active.pop();
                r?.to_vec()
            }
        })
    }

    fn par_layers(&mut self, x: &Term, y: &Term) -> Result<Vec<Layer>, LtsError> {
        let lx = self.layers(x, true)?;
        let ly = self.layers(y, true)?;
        let mut out = Vec::new();
        for (s1, r1) in lx.iter() {
            for (s2, r2) in ly.iter() {
                let s = s1.iter().chain(s2).cloned().collect();
                out.push((cancel_shadows(s), join(r1, r2)));
            }
        }
        Ok(out)
    }

    fn comm_layers(&mut self, x: &Term, y: &Term) -> Result<Vec<Layer>, LtsError> {
        let lx = self.layers(x, true)?;
        let ly = self.layers(y, true)?;
        let mut out = Vec::new();
        for (s1, r1) in lx.iter() {
            for (s2, r2) in ly.iter() {
                if let ([a], [b]) = (&s1[..], &s2[..]) {
                    if let Some(g) = self.spec.signature.gamma(a, b) {
                        out.push((vec![g], join(r1, r2)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// True iff `t` evaluates to a lone shadow constant.
    fn is_bare(&mut self, t: &Term, p: bool) -> Result<bool, LtsError> {
        if !t.atom_labels().iter().any(Label::is_shadow) || !t.rec_calls().is_empty() {
            return Ok(false);
        }
        let l = self.layers(t, p)?;
        Ok(l.len() == 1 && is_bare_layer(&l[0]))
    }

    /// Every label occurring in a step reachable from `t`.
    pub fn reachable_labels(&mut self, t: &Term, p: bool) -> Result<Rc<BTreeSet<Label>>, LtsError> {
        let key = (t.clone(), p);
        if let Some(r) = self.labels_memo.get(&key) {
            return Ok(r.clone());
        }
        let mut labels = BTreeSet::new();
        let mut seen = HashSet::from([t.clone()]);
        let mut todo = vec![t.clone()];
        while let Some(u) = todo.pop() {
            for (s, r) in self.layers(&u, p)?.iter() {
                labels.extend(s.iter().cloned());
                if let Some(r) = r {
                    if seen.insert(r.clone()) {
                        if seen.len() > LABEL_SCAN_BOUND {
                            return Err(LtsError::StateBound { max: LABEL_SCAN_BOUND });
                        }
                        todo.push(r.clone());
                    }
                }
            }
        }
        let labels = Rc::new(labels);
        self.labels_memo.insert(key, labels.clone());
        Ok(labels)
    }

    fn check_conflict_labels(&self) -> Result<(), LtsError> {
        let sig = &self.spec.signature;
        if !sig.events_declared {
            return Ok(());
        }
        for (a, b) in sig.conflict_entries() {
            for l in [a, b] {
                if !l.as_action().is_some_and(|x| sig.events.contains(x)) {
                    return Err(LtsError::UndeclaredConflictLabel(l.to_string()));
                }
            }
        }
        Ok(())
    }

    /// `Θ(x)` with its argument prepared: `≬` is split by P1, and subterms
    /// outside `+`, `·`, `∥`, `|` are replaced by their basic forms.
    fn theta_expansion(&mut self, x: &Term, p: bool) -> Result<Term, LtsError> {
        if let Some((v, e)) = x.rec_calls().into_iter().next() {
            return Err(LtsError::RecursionInTheta(format!("<{v}|{e}>")));
        }
        let pre = self.theta_pre(x, p)?;
        Ok(crate::theta::expand(&pre))
    }

    fn theta_pre(&mut self, u: &Term, p: bool) -> Result<Term, LtsError> {
        match u.node() {
            Node::Atom(_) => Ok(u.clone()),
            Node::Alt(..) | Node::Seq(..) | Node::Par(..) | Node::Comm(..) => {
                let kp = p || matches!(u.node(), Node::Par(..) | Node::Comm(..));
                let kids = u.children().into_iter().map(|c| self.theta_pre(c, kp)).collect::<Result<_, _>>()?;
                Ok(u.with_children(kids))
            }
            Node::FullPar(a, b) => {
                self.theta_pre(&Term::alt(Term::par(a.clone(), b.clone()), Term::comm(a.clone(), b.clone())), p)
            }
            _ => Ok(self.basic_in(u, p)?.to_term()),
        }
    }

    /// The basic term whose branches are the layers of `t`, recursively.
    pub fn basic_in(&mut self, t: &Term, p: bool) -> Result<BasicTerm, LtsError> {
        if let Some((v, e)) = t.rec_calls().into_iter().next() {
            return Err(LtsError::NotRecursionFree { var: v.to_string(), spec: e.to_string() });
        }
        let mut branches = Vec::new();
        for (step, r) in self.layers(t, p)?.iter() {
            let next = match r {
                None => None,
                Some(r) => Some(self.basic_in(r, p)?),
            };
            branches.push(Branch { step: step.clone(), next });
        }
        Ok(BasicTerm { branches }.normalized())
    }

    /// Observable transitions of a state: each layer is executed as any
    /// nonempty sub-multiset of its events, and layers without events are
    /// passed through silently.
    pub fn steps(&mut self, t: &Term) -> Result<Steps, LtsError> {
        let mut out = Steps::default();
        let start = canon(t);
        let mut seen = HashSet::from([start.clone()]);
        let mut todo = vec![start];
        while let Some(s) = todo.pop() {
            for (step, r) in self.layers(&s, false)?.iter() {
                let ev = step_events(step);
                if ev.is_empty() {
                    match r {
                        None => out.silent_termination = true,
                        Some(r) => {
                            if seen.insert(r.clone()) {
                                todo.push(r.clone());
                            }
                        }
                    }
                    continue;
                }
                for (x, rest) in sub_multisets(&ev) {
                    let target = if rest.is_empty() {
                        r.clone()
                    } else {
                        let head = step_term(&rest);
                        Some(canon(&match r {
                            None => head,
                            Some(r) => Term::seq(head, r.clone()),
                        }))
                    };
                    out.steps.push((x, target));
                }
            }
        }
        out.steps.sort();
        out.steps.dedup();
        Ok(out)
    }
}

/// The observable transitions of `t`.
pub fn sos_steps(t: &Term, spec: &SpecFile) -> Result<Steps, LtsError> {
    Sos::new(spec, t).steps(t)
}

/// The basic term read off the step layers of a recursion-free term. It is
/// computed independently of the rewriter and agrees with the normal form
/// up to bisimulation.
pub fn sos_basic(t: &Term, spec: &SpecFile) -> Result<BasicTerm, LtsError> {
    Sos::new(spec, t).basic_in(t, false)
}

fn in_set(set: &LabelSet, l: &Label) -> bool {
    l.as_action().is_some_and(|a| set.contains(a))
}

fn is_bare_layer(l: &Layer) -> bool {
    l.1.is_none() && l.0.len() == 1 && l.0[0].is_shadow()
}

/// SC4: a shadow leaves a step that contains its event.
fn cancel_shadows(mut s: Vec<Label>) -> Vec<Label> {
    while let Some(i) = s
        .iter()
        .position(|l| l.shadow_of().is_some_and(|(a, _)| s.iter().any(|m| m.as_action() == Some(a))))
    {
        s.remove(i);
    }
    s
}

/// Residue of two joined steps; both continuing gives `x' ≬ y'`.
fn join(r1: &Option<Term>, r2: &Option<Term>) -> Option<Term> {
    match (r1, r2) {
        (None, None) => None,
        (Some(r), None) | (None, Some(r)) => Some(r.clone()),
        (Some(a), Some(b)) => Some(Term::full_par(a.clone(), b.clone())),
    }
}

fn dedup(mut v: Vec<Layer>) -> Vec<Layer> {
    let mut seen = HashSet::new();
    v.retain(|l| seen.insert(l.clone()));
    v
}

/// Every nonempty sub-multiset of a sorted multiset, with its complement.
fn sub_multisets(ev: &[Label]) -> Vec<(Vec<Label>, Vec<Label>)> {
    let mut groups: Vec<(Label, usize)> = Vec::new();
    for l in ev {
        match groups.last_mut() {
            Some((g, n)) if g == l => *n += 1,
            _ => groups.push((l.clone(), 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (l, n) in groups {
        let mut next = Vec::new();
        for (take, rest) in &out {
            for k in 0..=n {
                let mut t: Vec<Label> = take.clone();
                let mut r: Vec<Label> = rest.clone();
                t.extend(std::iter::repeat(l.clone()).take(k));
                r.extend(std::iter::repeat(l.clone()).take(n - k));
                next.push((t, r));
            }
        }
        out = next;
    }
    out.retain(|(t, _)| !t.is_empty());
    out
}
