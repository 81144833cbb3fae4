//! Process terms. Terms are immutable and structurally shared; the derived
//! order (node tag, then labels and children) is the total order used for
//! AC-canonical forms.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::label::{Action, Label};

/// A set of visible actions, as used by encapsulation and abstraction.
pub type LabelSet = Arc<BTreeSet<Action>>;

/// Node forms of the term language.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Atom(Label),
    Seq(Term, Term),
    Alt(Term, Term),
    Par(Term, Term),
    Comm(Term, Term),
    FullPar(Term, Term),
    Theta(Term),
    Unless(Term, Term),
    Encap(LabelSet, Term),
    Abstract(LabelSet, Term),
    Project(u32, Term),
    Rename(Arc<str>, Term),
    RecCall(Arc<str>, Arc<str>),
}

/// A shared, immutable process term.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Term {
    pub fn new(node: Node) -> Self {
        Term(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn atom(l: Label) -> Self {
        Term::new(Node::Atom(l))
    }

    pub fn act(name: &str) -> Self {
        Term::atom(Label::act(name))
    }

    pub fn action(a: Action) -> Self {
        Term::atom(Label::Act(a))
    }

    pub fn tau() -> Self {
        Term::atom(Label::Tau)
    }

    pub fn delta() -> Self {
        Term::atom(Label::Delta)
    }

    pub fn shadow(of: Action, index: u32) -> Self {
        Term::atom(Label::Shadow(of, index))
    }

    pub fn seq(x: Term, y: Term) -> Self {
        Term::new(Node::Seq(x, y))
    }

    pub fn alt(x: Term, y: Term) -> Self {
        Term::new(Node::Alt(x, y))
    }

    pub fn par(x: Term, y: Term) -> Self {
        Term::new(Node::Par(x, y))
    }

    pub fn comm(x: Term, y: Term) -> Self {
        Term::new(Node::Comm(x, y))
    }

    pub fn full_par(x: Term, y: Term) -> Self {
        Term::new(Node::FullPar(x, y))
    }

    pub fn theta(x: Term) -> Self {
        Term::new(Node::Theta(x))
    }

    pub fn unless(x: Term, y: Term) -> Self {
        Term::new(Node::Unless(x, y))
    }

    pub fn encap(h: LabelSet, x: Term) -> Self {
        Term::new(Node::Encap(h, x))
    }

    pub fn hide(i: LabelSet, x: Term) -> Self {
        Term::new(Node::Abstract(i, x))
    }

    pub fn project(n: u32, x: Term) -> Self {
        Term::new(Node::Project(n, x))
    }

    pub fn rename(f: &str, x: Term) -> Self {
        Term::new(Node::Rename(f.into(), x))
    }

    pub fn rec_call(x: &str, e: &str) -> Self {
        Term::new(Node::RecCall(x.into(), e.into()))
    }

    /// Right-nested sum; the empty sum is δ.
    pub fn alt_all<I: IntoIterator<Item = Term>>(items: I) -> Term {
        fold_right(items.into_iter().collect(), Term::alt).unwrap_or_else(Term::delta)
    }

    /// Right-nested parallel composition; `None` when empty.
    pub fn par_all<I: IntoIterator<Item = Term>>(items: I) -> Option<Term> {
        fold_right(items.into_iter().collect(), Term::par)
    }

    /// Right-nested sequential composition; `None` when empty.
    pub fn seq_all<I: IntoIterator<Item = Term>>(items: I) -> Option<Term> {
        fold_right(items.into_iter().collect(), Term::seq)
    }

    pub fn label(&self) -> Option<&Label> {
        match self.node() {
            Node::Atom(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_delta(&self) -> bool {
        matches!(self.node(), Node::Atom(Label::Delta))
    }

    /// Immediate subterms in left-to-right order.
    pub fn children(&self) -> Vec<&Term> {
        match self.node() {
            Node::Atom(_) | Node::RecCall(..) => vec![],
            Node::Seq(x, y)
            | Node::Alt(x, y)
            | Node::Par(x, y)
            | Node::Comm(x, y)
            | Node::FullPar(x, y)
            | Node::Unless(x, y) => vec![x, y],
            Node::Theta(x)
            | Node::Encap(_, x)
            | Node::Abstract(_, x)
            | Node::Project(_, x)
            | Node::Rename(_, x) => vec![x],
        }
    }

    /// Rebuilds this node with new children (same arity and order as `children`).
    pub fn with_children(&self, mut kids: Vec<Term>) -> Term {
        let mut next = || kids.remove(0);
        let node = match self.node() {
            Node::Atom(_) | Node::RecCall(..) => return self.clone(),
            Node::Seq(..) => Node::Seq(next(), next()),
            Node::Alt(..) => Node::Alt(next(), next()),
            Node::Par(..) => Node::Par(next(), next()),
            Node::Comm(..) => Node::Comm(next(), next()),
            Node::FullPar(..) => Node::FullPar(next(), next()),
            Node::Unless(..) => Node::Unless(next(), next()),
            Node::Theta(_) => Node::Theta(next()),
            Node::Encap(h, _) => Node::Encap(h.clone(), next()),
            Node::Abstract(i, _) => Node::Abstract(i.clone(), next()),
            Node::Project(n, _) => Node::Project(*n, next()),
            Node::Rename(f, _) => Node::Rename(f.clone(), next()),
        };
        Term::new(node)
    }

    /// Operands of a maximal `+` tree.
    pub fn alt_operands(&self) -> Vec<Term> {
        let mut out = Vec::new();
        collect_op(self, &mut out, &|n| matches!(n, Node::Alt(..)));
        out
    }

    /// Operands of a maximal `∥` tree.
    pub fn par_operands(&self) -> Vec<Term> {
        let mut out = Vec::new();
        collect_op(self, &mut out, &|n| matches!(n, Node::Par(..)));
        out
    }

    /// The AC-canonical representative: `+` and `∥` trees are flattened,
    /// their operands sorted by the term order, and rebuilt right-nested.
    pub fn canonical(&self) -> Term {
        match self.node() {
            Node::Atom(_) | Node::RecCall(..) => self.clone(),
            Node::Alt(..) => {
                let mut ops: Vec<Term> = self.alt_operands().iter().map(Term::canonical).collect();
                ops.sort();
                fold_right(ops, Term::alt).expect("nonempty")
            }
            Node::Par(..) => {
                let mut ops: Vec<Term> = self.par_operands().iter().map(Term::canonical).collect();
                ops.sort();
                fold_right(ops, Term::par).expect("nonempty")
            }
            _ => {
                let kids: Vec<Term> = self.children().into_iter().map(Term::canonical).collect();
                self.with_children(kids)
            }
        }
    }

    /// Every recursion call occurring syntactically in the term.
    pub fn rec_calls(&self) -> BTreeSet<(Arc<str>, Arc<str>)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Node::RecCall(x, e) = t.node() {
                out.insert((x.clone(), e.clone()));
            }
        });
        out
    }

    /// Every atom label occurring syntactically in the term.
    pub fn atom_labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Node::Atom(l) = t.node() {
                out.insert(l.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Replaces every recursion call by the result of `f`, when it returns `Some`.
    pub fn substitute_calls(&self, f: &dyn Fn(&str, &str) -> Option<Term>) -> Term {
        match self.node() {
            Node::RecCall(x, e) => f(x, e).unwrap_or_else(|| self.clone()),
            Node::Atom(_) => self.clone(),
            _ => {
                let kids = self.children().into_iter().map(|c| c.substitute_calls(f)).collect();
                self.with_children(kids)
            }
        }
    }
}

fn collect_op(t: &Term, out: &mut Vec<Term>, is_op: &dyn Fn(&Node) -> bool) {
    if is_op(t.node()) {
        for c in t.children() {
            collect_op(c, out, is_op);
        }
    } else {
        out.push(t.clone());
    }
}

fn fold_right(mut items: Vec<Term>, f: fn(Term, Term) -> Term) -> Option<Term> {
    let mut acc = items.pop()?;
    while let Some(x) = items.pop() {
        acc = f(x, acc);
    }
    Some(acc)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// AC-equality: equal after flattening and sorting `+` and `∥` operands.
pub fn eq_ac(t1: &Term, t2: &Term) -> bool {
    t1 == t2 || t1.canonical() == t2.canonical()
}
