//! Linearity and guardedness of recursive specifications.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use aptc_term::{Action, Label, Node, RecSpec, Signature, Term};

/// Verdicts for one recursive specification. `offending` names a variable
/// whose equation is not linear, or that lies on a silent cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardReport {
    pub linear: bool,
    pub guarded: bool,
    pub offending: Option<String>,
    pub detail: Option<String>,
}

/// Checks that every equation is a sum of `s` and `s·X` summands with `s` a
/// step, and that no variable can reach itself through silent prefixes.
pub fn check_guarded_linear(e: &RecSpec, _sig: &Signature) -> GuardReport {
    let mut report = GuardReport { linear: true, guarded: true, offending: None, detail: None };
    for (x, rhs) in &e.equations {
        if !is_linear_rhs(rhs, &e.name) {
            report.linear = false;
            report.offending.get_or_insert_with(|| x.to_string());
            report.detail.get_or_insert_with(|| format!("{x} = {rhs} is not linear"));
        }
    }
    let graph: BTreeMap<Arc<str>, BTreeSet<Arc<str>>> = e
        .equations
        .iter()
        .map(|(x, rhs)| {
            let (heads, _) = heads(rhs, &e.name, &BTreeSet::new());
            (x.clone(), heads)
        })
        .collect();
    if let Some(v) = on_cycle(&graph) {
        report.guarded = false;
        report.offending = Some(v.to_string());
        report.detail = Some(format!("{v} reaches itself without a visible event"));
    }
    report
}

fn is_linear_rhs(t: &Term, spec: &str) -> bool {
    if t.is_delta() {
        return true;
    }
    t.alt_operands().iter().all(|s| match s.node() {
        Node::Seq(h, tail) => is_step(h) && matches!(tail.node(), Node::RecCall(_, e) if &**e == spec),
        _ => is_step(s),
    })
}

fn is_step(t: &Term) -> bool {
    t.par_operands().iter().all(|a| a.label().is_some_and(|l| *l != Label::Delta))
}

/// Variables reachable before any visible event, and whether the term can
/// terminate silently.
fn heads(t: &Term, spec: &str, hidden: &BTreeSet<Action>) -> (BTreeSet<Arc<str>>, bool) {
    match t.node() {
        Node::Atom(l) => {
            let silent = match l {
                Label::Tau | Label::Shadow(..) => true,
                Label::Act(a) => hidden.contains(a),
                Label::Delta => false,
            };
            (BTreeSet::new(), silent)
        }
        Node::RecCall(x, e) => {
            let mut s = BTreeSet::new();
            if &**e == spec {
                s.insert(x.clone());
            }
            (s, false)
        }
        Node::Seq(x, y) => {
            let (mut hx, sx) = heads(x, spec, hidden);
            if !sx {
                return (hx, false);
            }
            let (hy, sy) = heads(y, spec, hidden);
            hx.extend(hy);
            (hx, sy)
        }
        Node::Alt(x, y) | Node::Par(x, y) | Node::FullPar(x, y) | Node::Comm(x, y) | Node::Unless(x, y) => {
            let (mut hx, sx) = heads(x, spec, hidden);
            let (hy, sy) = heads(y, spec, hidden);
            hx.extend(hy);
            let silent = match t.node() {
                Node::Alt(..) => sx || sy,
                Node::Par(..) | Node::FullPar(..) => sx && sy,
                Node::Unless(..) => sx,
                _ => false,
            };
            (hx, silent)
        }
        Node::Abstract(i, x) => {
            let mut h = hidden.clone();
            h.extend(i.iter().cloned());
            heads(x, spec, &h)
        }
        Node::Project(0, _) => (BTreeSet::new(), false),
        Node::Theta(x) | Node::Encap(_, x) | Node::Project(_, x) | Node::Rename(_, x) => heads(x, spec, hidden),
    }
}

fn on_cycle(graph: &BTreeMap<Arc<str>, BTreeSet<Arc<str>>>) -> Option<Arc<str>> {
    for start in graph.keys() {
        let mut seen = BTreeSet::new();
        let mut todo: Vec<&Arc<str>> = graph[start].iter().collect();
        while let Some(v) = todo.pop() {
            if v == start {
                return Some(start.clone());
            }
            if seen.insert(v.clone()) {
                if let Some(next) = graph.get(v) {
                    todo.extend(next.iter());
                }
            }
        }
    }
    None
}
