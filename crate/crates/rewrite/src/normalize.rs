//! Innermost normalization to basic terms.
//!
//! Children are normalized before their parent; a rule is then applied at
//! the root and the right-hand side is normalized in turn. Every rule
//! application is recorded with its position, so the trace replays from
//! the input term. Operands of `+` and `∥` are compared modulo AC.

use std::collections::{BTreeSet, HashSet};

use aptc_term::{Label, LabelSet, Node, Signature, Term};

use crate::basic::{step_of, BasicTerm};
use crate::trace::{Path, RewriteTrace, TraceEntry};

/// Default bound on rule applications.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Which child of a binary node is normalized first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RedexOrder {
    LeftFirst,
    RightFirst,
}

#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    /// Maximum number of rule applications.
    pub budget: u64,
    /// Also apply the silent-step laws B1, B2 and B3.
    pub silent_laws: bool,
    /// Record the rewrite trace.
    pub trace: bool,
    pub order: RedexOrder,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { budget: DEFAULT_BUDGET, silent_laws: false, trace: true, order: RedexOrder::LeftFirst }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("rewrite budget of {budget} steps exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("term is not closed: recursion variable <{var}|{spec}> occurs")]
    OpenTerm { var: String, spec: String },
    #[error("unknown renaming {0}")]
    UnknownRenaming(String),
    #[error("internal error: normal form is not basic: {0}")]
    NotBasic(String),
}

/// Result of a normalization.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub term: Term,
    pub basic: BasicTerm,
    pub trace: RewriteTrace,
    pub steps: u64,
}

/// Normalizes a closed term with default options.
pub fn normalize(t: &Term, sig: &Signature) -> Result<(BasicTerm, RewriteTrace), RewriteError> {
    let n = normalize_with(t, sig, &NormalizeOptions::default())?;
    Ok((n.basic, n.trace))
}

pub fn normalize_with(t: &Term, sig: &Signature, opts: &NormalizeOptions) -> Result<Normalized, RewriteError> {
    let mut nz = Normalizer { sig, opts, steps: 0, trace: Vec::new(), causal: CausalOrder::of(t) };
    let mut path = Vec::new();
    let out = nz.nf(t, &mut path, Ctx { in_par: false })?;
    let basic = BasicTerm::from_term(&out).ok_or_else(|| RewriteError::NotBasic(out.to_string()))?;
    Ok(Normalized { term: out, basic, trace: RewriteTrace { entries: nz.trace }, steps: nz.steps })
}

/// The causal order `≤` between labels used by the unless rules: the
/// reflexive-transitive closure of "occurs in the left operand of a `·`
/// whose right operand contains the other".
#[derive(Clone, Debug, Default)]
pub struct CausalOrder {
    pairs: HashSet<(Label, Label)>,
}

impl CausalOrder {
    pub fn of(t: &Term) -> Self {
        let mut pairs = HashSet::new();
        t.visit(&mut |u| {
            if let Node::Seq(x, y) = u.node() {
                for a in x.atom_labels() {
                    for b in y.atom_labels() {
                        if a.is_visible() && b.is_visible() {
                            pairs.insert((a.clone(), b));
                        }
                    }
                }
            }
        });
        let labels: BTreeSet<Label> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        for k in &labels {
            for i in &labels {
                if !pairs.contains(&(i.clone(), k.clone())) {
                    continue;
                }
                for j in &labels {
                    if pairs.contains(&(k.clone(), j.clone())) {
                        pairs.insert((i.clone(), j.clone()));
                    }
                }
            }
        }
        CausalOrder { pairs }
    }

    pub fn leq(&self, a: &Label, b: &Label) -> bool {
        a == b || self.pairs.contains(&(a.clone(), b.clone()))
    }
}

/// Result of `e ◁ f` for atoms, with the rule that justifies it.
pub fn unless_atoms(sig: &Signature, causal: &CausalOrder, e: &Label, f: &Label) -> (&'static str, Label) {
    if sig.in_conflict(e, f) {
        return ("RU25", Label::Tau);
    }
    for (a, b) in sig.conflict_entries() {
        for (c1, c2) in [(a, b), (b, a)] {
            // f ♯ e2 with e2 ≤ e
            if c1 == f && c2 != e && causal.leq(c2, e) {
                return ("RU27", Label::Tau);
            }
        }
    }
    for (a, b) in sig.conflict_entries() {
        for (c1, c2) in [(a, b), (b, a)] {
            if c1 == e && causal.leq(c2, f) {
                return ("RU26", e.clone());
            }
        }
    }
    ("RU28", e.clone())
}

#[derive(Clone, Copy, Debug)]
struct Ctx {
    in_par: bool,
}

struct Normalizer<'a> {
    sig: &'a Signature,
    opts: &'a NormalizeOptions,
    steps: u64,
    trace: Vec<TraceEntry>,
    causal: CausalOrder,
}

fn in_set(set: &LabelSet, l: &Label) -> bool {
    l.as_action().is_some_and(|a| set.contains(a))
}

fn is_shadow_atom(t: &Term) -> bool {
    t.label().is_some_and(Label::is_shadow)
}

fn rebuild_alt(ops: Vec<Term>) -> Term {
    Term::alt_all(ops)
}

impl<'a> Normalizer<'a> {
    fn record(&mut self, rule: &'static str, path: &Path, before: &Term, after: &Term) -> Result<(), RewriteError> {
        self.steps += 1;
        if self.steps > self.opts.budget {
            return Err(RewriteError::BudgetExceeded { budget: self.opts.budget });
        }
        if self.opts.trace {
            self.trace.push(TraceEntry { rule, path: path.clone(), before: before.clone(), after: after.clone() });
        }
        Ok(())
    }

    fn nf(&mut self, t: &Term, p: &mut Path, ctx: Ctx) -> Result<Term, RewriteError> {
        match t.node() {
            Node::Atom(_) => Ok(t.clone()),
            Node::RecCall(x, e) => Err(RewriteError::OpenTerm { var: x.to_string(), spec: e.to_string() }),
            Node::Theta(_) => self.theta(t, p, ctx),
            _ => {
                let t1 = self.children_nf(t, p, ctx)?;
                self.root(t1, p, ctx)
            }
        }
    }

    fn children_nf(&mut self, t: &Term, p: &mut Path, ctx: Ctx) -> Result<Term, RewriteError> {
        let kids = t.children();
        if kids.is_empty() {
            return Ok(t.clone());
        }
        let kctx = match t.node() {
            Node::Par(..) | Node::Comm(..) | Node::FullPar(..) => Ctx { in_par: true },
            _ => ctx,
        };
        let mut out: Vec<Option<Term>> = vec![None; kids.len()];
        let order: Vec<usize> = match self.opts.order {
            RedexOrder::LeftFirst => (0..kids.len()).collect(),
            RedexOrder::RightFirst => (0..kids.len()).rev().collect(),
        };
        for i in order {
            p.push(i as u32);
            let r = self.nf(kids[i], p, kctx);
            p.pop();
            out[i] = Some(r?);
        }
        Ok(t.with_children(out.into_iter().map(|k| k.expect("normalized")).collect()))
    }

    /// Normalizes a term whose children are already normal.
    fn root(&mut self, mut cur: Term, p: &mut Path, ctx: Ctx) -> Result<Term, RewriteError> {
        loop {
            match self.step_root(&cur, ctx)? {
                None => return Ok(shape(&cur)),
                Some((rule, r)) => {
                    self.record(rule, p, &cur, &r)?;
                    if matches!(r.node(), Node::Theta(_)) {
                        return self.theta(&r, p, ctx);
                    }
                    cur = self.children_nf(&r, p, ctx)?;
                }
            }
        }
    }

    /// One rule application at the root, assuming normal children.
    fn step_root(&self, t: &Term, ctx: Ctx) -> Result<Option<(&'static str, Term)>, RewriteError> {
        let r = match t.node() {
            Node::Atom(_) | Node::RecCall(..) | Node::Theta(_) => None,
            Node::Alt(..) => self.alt_rule(t, ctx),
            Node::Seq(x, y) => self.seq_rule(x, y, ctx),
            Node::Par(x, y) => self.par_rule(t, x, y),
            Node::FullPar(x, y) => {
                Some(("RP1", Term::alt(Term::par(x.clone(), y.clone()), Term::comm(x.clone(), y.clone()))))
            }
            Node::Comm(x, y) => self.comm_rule(x, y),
            Node::Unless(x, y) => self.unless_rule(x, y),
            Node::Encap(h, x) => distribute(x, |u| Term::encap(h.clone(), u), ["RD4", "RD5", "RD6"]).or_else(|| {
                let l = x.label()?;
                Some(match l {
                    Label::Delta => ("RD3", Term::delta()),
                    l if in_set(h, l) => ("RD2", Term::delta()),
                    _ => ("RD1", x.clone()),
                })
            }),
            Node::Abstract(i, x) => distribute(x, |u| Term::hide(i.clone(), u), ["TI4", "TI5", "TI6"]).or_else(|| {
                let l = x.label()?;
                Some(match l {
                    Label::Delta => ("TI3", Term::delta()),
                    l if in_set(i, l) => ("TI2", Term::tau()),
                    _ => ("TI1", x.clone()),
                })
            }),
            Node::Project(n, x) => self.project_rule(*n, x),
            Node::Rename(f, x) => {
                if !self.sig.has_renaming(f) {
                    return Err(RewriteError::UnknownRenaming(f.to_string()));
                }
                distribute(x, |u| Term::rename(f, u), ["RN3", "RN4", "RN5"]).or_else(|| {
                    let l = x.label()?;
                    Some(match l {
                        Label::Delta => ("RN2", Term::delta()),
                        l => ("RN1", Term::atom(self.sig.apply_renaming(f, l).expect("renaming exists"))),
                    })
                })
            }
        };
        Ok(r)
    }

    fn alt_rule(&self, t: &Term, ctx: Ctx) -> Option<(&'static str, Term)> {
        let ops = t.alt_operands();
        let without = |i: usize| {
            let mut v = ops.clone();
            v.remove(i);
            rebuild_alt(v)
        };
        if let Some(i) = ops.iter().position(Term::is_delta) {
            return Some(("RA6", without(i)));
        }
        if !ctx.in_par {
            if let Some(i) = ops.iter().position(is_shadow_atom) {
                return Some(("SC1", without(i)));
            }
        }
        for i in 0..ops.len() {
            if ops[i + 1..].contains(&ops[i]) {
                return Some(("RA3", without(i)));
            }
        }
        None
    }

    fn seq_rule(&self, x: &Term, y: &Term, ctx: Ctx) -> Option<(&'static str, Term)> {
        if x.is_delta() {
            return Some(("RA7", Term::delta()));
        }
        if !ctx.in_par && is_shadow_atom(x) {
            return Some(("SC2", y.clone()));
        }
        if !ctx.in_par && is_shadow_atom(y) {
            return Some(("SC3", x.clone()));
        }
        match x.node() {
            Node::Alt(x1, x2) => {
                return Some(("RA4", Term::alt(Term::seq(x1.clone(), y.clone()), Term::seq(x2.clone(), y.clone()))))
            }
            Node::Seq(a, b) => return Some(("RA5", Term::seq(a.clone(), Term::seq(b.clone(), y.clone())))),
            _ => {}
        }
        if self.opts.silent_laws {
            if y.label() == Some(&Label::Tau) {
                return Some(("B1", x.clone()));
            }
            if let Some(z) = b2_match(y) {
                return Some(("B2", Term::seq(x.clone(), z)));
            }
        }
        None
    }

    fn par_rule(&self, t: &Term, x: &Term, y: &Term) -> Option<(&'static str, Term)> {
        if x.is_delta() {
            return Some(("RP9", Term::delta()));
        }
        if y.is_delta() {
            return Some(("RP10", Term::delta()));
        }
        if let Node::Alt(x1, x2) = x.node() {
            return Some(("RP7", Term::alt(Term::par(x1.clone(), y.clone()), Term::par(x2.clone(), y.clone()))));
        }
        if let Node::Alt(y1, y2) = y.node() {
            return Some(("RP8", Term::alt(Term::par(x.clone(), y1.clone()), Term::par(x.clone(), y2.clone()))));
        }
        match (x.node(), y.node()) {
            (Node::Seq(s1, t1), Node::Seq(s2, t2)) => {
                return Some((
                    "RP6",
                    Term::seq(Term::par(s1.clone(), s2.clone()), Term::full_par(t1.clone(), t2.clone())),
                ))
            }
            (_, Node::Seq(s, r)) => return Some(("RP4", Term::seq(Term::par(x.clone(), s.clone()), r.clone()))),
            (Node::Seq(s, r), _) => return Some(("RP5", Term::seq(Term::par(s.clone(), y.clone()), r.clone()))),
            _ => {}
        }
        // Both operands are steps.
        let mut atoms = step_of(t)?;
        if let Some(i) = atoms.iter().position(|l| {
            l.shadow_of().is_some_and(|(a, _)| atoms.iter().any(|m| m.as_action() == Some(a)))
        }) {
            atoms.remove(i);
            return Some(("SC4", crate::basic::step_term(&atoms)));
        }
        if self.opts.silent_laws && atoms.len() > 1 && atoms.contains(&Label::Tau) {
            let i = atoms.iter().position(Label::is_tau).expect("tau present");
            atoms.remove(i);
            return Some(("B3", crate::basic::step_term(&atoms)));
        }
        None
    }

    fn comm_rule(&self, x: &Term, y: &Term) -> Option<(&'static str, Term)> {
        if x.is_delta() {
            return Some(("RC17", Term::delta()));
        }
        if y.is_delta() {
            return Some(("RC18", Term::delta()));
        }
        if let Node::Alt(x1, x2) = x.node() {
            return Some(("RC15", Term::alt(Term::comm(x1.clone(), y.clone()), Term::comm(x2.clone(), y.clone()))));
        }
        if let Node::Alt(y1, y2) = y.node() {
            return Some(("RC16", Term::alt(Term::comm(x.clone(), y1.clone()), Term::comm(x.clone(), y2.clone()))));
        }
        Some(match (x.node(), y.node()) {
            (Node::Seq(s1, t1), Node::Seq(s2, t2)) => (
                "RC14",
                Term::seq(Term::comm(s1.clone(), s2.clone()), Term::full_par(t1.clone(), t2.clone())),
            ),
            (_, Node::Seq(s, r)) => ("RC12", Term::seq(Term::comm(x.clone(), s.clone()), r.clone())),
            (Node::Seq(s, r), _) => ("RC13", Term::seq(Term::comm(s.clone(), y.clone()), r.clone())),
            _ => {
                // Communication is defined between single events only.
                let g = match (x.label(), y.label()) {
                    (Some(a), Some(b)) => self.sig.gamma(a, b),
                    _ => None,
                };
                ("RC11", g.map(Term::atom).unwrap_or_else(Term::delta))
            }
        })
    }

    fn unless_rule(&self, x: &Term, y: &Term) -> Option<(&'static str, Term)> {
        let un = |a: &Term, b: &Term| Term::unless(a.clone(), b.clone());
        Some(match x.node() {
            Node::Atom(Label::Delta) => ("RU29", Term::delta()),
            Node::Alt(a, b) => ("RU30", Term::alt(un(a, y), un(b, y))),
            Node::Seq(a, b) => ("RU31", Term::seq(un(a, y), un(b, y))),
            Node::Par(a, b) => ("RU32", Term::par(un(a, y), un(b, y))),
            Node::Atom(e) => match y.node() {
                Node::Atom(Label::Delta) => ("RU28", x.clone()),
                Node::Alt(a, b) => ("RU34", un(&un(x, a), b)),
                Node::Seq(a, b) => ("RU35", un(&un(x, a), b)),
                Node::Par(a, b) => ("RU36", un(&un(x, a), b)),
                Node::Atom(f) => {
                    let (rule, l) = unless_atoms(self.sig, &self.causal, e, f);
                    (rule, Term::atom(l))
                }
                _ => return None,
            },
            _ => return None,
        })
    }

    fn project_rule(&self, n: u32, x: &Term) -> Option<(&'static str, Term)> {
        if n == 0 {
            return Some(("PR5", Term::delta()));
        }
        let pr = |u: &Term| Term::project(n, u.clone());
        Some(match x.node() {
            Node::Atom(Label::Delta) => ("PR6", Term::delta()),
            Node::Atom(_) => ("PR3", x.clone()),
            Node::Alt(a, b) => ("PR1", Term::alt(pr(a), pr(b))),
            Node::Par(a, b) => ("PR2", Term::par(pr(a), pr(b))),
            Node::Seq(s, r) => ("PR4", Term::seq(s.clone(), Term::project(n - 1, r.clone()))),
            _ => return None,
        })
    }

    /// `Θ(x)`: the argument is brought into a shape built from atoms, `+`,
    /// `·`, `∥` and `|`; the conflict elimination rules are then expanded
    /// top-down and the result is normalized.
    fn theta(&mut self, t: &Term, p: &mut Path, ctx: Ctx) -> Result<Term, RewriteError> {
        let Node::Theta(x) = t.node() else { unreachable!("theta node") };
        p.push(0);
        let xp = self.theta_pre(x, p, ctx);
        p.pop();
        let ex = self.theta_expand(&xp?, p)?;
        self.nf(&ex, p, ctx)
    }

    fn theta_pre(&mut self, u: &Term, q: &mut Path, ctx: Ctx) -> Result<Term, RewriteError> {
        match u.node() {
            Node::Atom(_) => Ok(u.clone()),
            Node::Alt(..) | Node::Seq(..) | Node::Par(..) | Node::Comm(..) => {
                let kctx = if matches!(u.node(), Node::Par(..) | Node::Comm(..)) { Ctx { in_par: true } } else { ctx };
                let mut kids = Vec::new();
                for (i, c) in u.children().into_iter().enumerate() {
                    q.push(i as u32);
                    let r = self.theta_pre(c, q, kctx);
                    q.pop();
                    kids.push(r?);
                }
                Ok(u.with_children(kids))
            }
            Node::FullPar(a, b) => {
                let r = Term::alt(Term::par(a.clone(), b.clone()), Term::comm(a.clone(), b.clone()));
                self.record("RP1", q, u, &r)?;
                self.theta_pre(&r, q, ctx)
            }
            _ => self.nf(u, q, ctx),
        }
    }

    /// Expands `Θ(u)` located at `q`.
    fn theta_expand(&mut self, u: &Term, q: &mut Path) -> Result<Term, RewriteError> {
        let before = Term::theta(u.clone());
        let th = |v: &Term| Term::theta(v.clone());
        match u.node() {
            Node::Atom(Label::Delta) => {
                self.record("RCE20", q, &before, u)?;
                Ok(u.clone())
            }
            Node::Atom(_) => {
                self.record("RCE19", q, &before, u)?;
                Ok(u.clone())
            }
            Node::Seq(a, b) => {
                self.record("RCE22", q, &before, &Term::seq(th(a), th(b)))?;
                let ea = self.expand_at(a, q, &[0])?;
                let eb = self.expand_at(b, q, &[1])?;
                Ok(Term::seq(ea, eb))
            }
            Node::Alt(..) => {
                let ops = canonical_order(u.alt_operands());
                let (a, b) = (ops[0].clone(), Term::alt_all(ops[1..].to_vec()));
                let r = Term::alt(Term::unless(th(&a), b.clone()), Term::unless(th(&b), a.clone()));
                self.record("RCE21", q, &before, &r)?;
                let ea = self.expand_at(&a, q, &[0, 0])?;
                let eb = self.expand_at(&b, q, &[1, 0])?;
                Ok(Term::alt(Term::unless(ea, b), Term::unless(eb, a)))
            }
            Node::Par(..) | Node::Comm(..) => {
                let (a, b, rule, op): (Term, Term, &'static str, fn(Term, Term) -> Term) = match u.node() {
                    Node::Par(..) => {
                        let ops = canonical_order(u.par_operands());
                        (ops[0].clone(), Term::par_all(ops[1..].to_vec()).expect("two operands"), "RCE23", Term::par)
                    }
                    Node::Comm(a, b) => (a.clone(), b.clone(), "RCE24", Term::comm),
                    _ => unreachable!(),
                };
                let r = Term::alt(
                    op(Term::unless(th(&a), b.clone()), b.clone()),
                    op(Term::unless(th(&b), a.clone()), a.clone()),
                );
                self.record(rule, q, &before, &r)?;
                let ea = self.expand_at(&a, q, &[0, 0, 0])?;
                let eb = self.expand_at(&b, q, &[1, 0, 0])?;
                Ok(Term::alt(op(Term::unless(ea, b.clone()), b), op(Term::unless(eb, a.clone()), a)))
            }
            _ => unreachable!("theta argument shape"),
        }
    }

    fn expand_at(&mut self, u: &Term, q: &mut Path, rel: &[u32]) -> Result<Term, RewriteError> {
        let n = q.len();
        q.extend_from_slice(rel);
        let r = self.theta_expand(u, q);
        q.truncate(n);
        r
    }
}

/// Distribution of a unary operator over `+`, `·` and `∥`.
fn distribute(
    x: &Term,
    wrap: impl Fn(Term) -> Term,
    rules: [&'static str; 3],
) -> Option<(&'static str, Term)> {
    match x.node() {
        Node::Alt(a, b) => Some((rules[0], Term::alt(wrap(a.clone()), wrap(b.clone())))),
        Node::Seq(a, b) => Some((rules[1], Term::seq(wrap(a.clone()), wrap(b.clone())))),
        Node::Par(a, b) => Some((rules[2], Term::par(wrap(a.clone()), wrap(b.clone())))),
        _ => None,
    }
}

/// Matches `τ·(x+y) + x` (with `x` nonempty) and returns `x+y`.
fn b2_match(y: &Term) -> Option<Term> {
    let ops = y.alt_operands();
    if ops.len() < 2 {
        return None;
    }
    for (i, op) in ops.iter().enumerate() {
        let Node::Seq(h, z) = op.node() else { continue };
        if h.label() != Some(&Label::Tau) {
            continue;
        }
        let zs = z.alt_operands();
        if ops.iter().enumerate().all(|(j, o)| j == i || zs.contains(o)) {
            return Some(z.clone());
        }
    }
    None
}

/// Operands sorted by their AC-canonical form. The conflict elimination
/// rules are not invariant under reassociation of `+` and `∥`, so the
/// split into first operand and rest is made canonical.
pub fn canonical_order(mut ops: Vec<Term>) -> Vec<Term> {
    ops.sort_by_cached_key(Term::canonical);
    ops
}

/// AC-canonical shape of a normal node (sorted `+` and step operands).
fn shape(t: &Term) -> Term {
    match t.node() {
        Node::Alt(..) => {
            let mut ops = t.alt_operands();
            ops.sort();
            Term::alt_all(ops)
        }
        Node::Par(..) => {
            let mut ops = t.par_operands();
            ops.sort();
            Term::par_all(ops).expect("nonempty")
        }
        _ => t.clone(),
    }
}
