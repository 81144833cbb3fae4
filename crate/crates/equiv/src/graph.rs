//! Bisimulation on finite labelled graphs by signature refinement.
//!
//! Both inputs are placed side by side in one graph; a partition of the
//! union is refined until stable. Strong refinement compares the labelled
//! moves of each state; branching refinement first closes over inert `τ`
//! moves, those that stay inside the current block.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use aptc_lts::StepGraph;
use aptc_pes::PomsetKey;
use aptc_term::{step_string, Label};

/// Labels of graph edges.
pub trait StepLabel: Clone + Ord + Hash + Debug {
    /// True for a step made only of silent events.
    fn is_silent(&self) -> bool;
    fn show(&self) -> String;
}

impl StepLabel for Vec<Label> {
    fn is_silent(&self) -> bool {
        !self.is_empty() && self.iter().all(Label::is_tau)
    }

    fn show(&self) -> String {
        format!("{{{}}}", step_string(self))
    }
}

impl StepLabel for PomsetKey {
    fn is_silent(&self) -> bool {
        !self.labels.is_empty() && self.labels.iter().all(Label::is_tau)
    }

    fn show(&self) -> String {
        let order: Vec<String> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(j, row)| (0..64).filter(move |i| row & (1 << i) != 0).map(move |i| format!("{i}<{j}")))
            .collect();
        let evs: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        if order.is_empty() {
            format!("[{}]", evs.join(","))
        } else {
            format!("[{}; {}]", evs.join(","), order.join(","))
        }
    }
}

/// `None` is the empty weak move `ε`.
impl<L: StepLabel> StepLabel for Option<L> {
    fn is_silent(&self) -> bool {
        self.as_ref().is_none_or(|l| l.is_silent())
    }

    fn show(&self) -> String {
        self.as_ref().map_or_else(|| "eps".to_string(), |l| l.show())
    }
}

/// A finite graph with a termination predicate; `initial` is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LGraph<L> {
    pub initial: usize,
    pub edges: Vec<Vec<(L, usize)>>,
    pub terminal: Vec<bool>,
}

impl<L: StepLabel> LGraph<L> {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl From<&StepGraph> for LGraph<Vec<Label>> {
    fn from(g: &StepGraph) -> Self {
        LGraph { initial: g.initial, edges: g.edges.clone(), terminal: g.terminal.clone() }
    }
}

/// Outcome of comparing the roots of two graphs.
#[derive(Clone, Debug)]
pub(crate) struct GraphOutcome {
    pub related: bool,
    /// Pairs of states (left index, right index) in the same final block.
    pub pairs: Vec<(usize, usize)>,
    pub sequence: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Strong,
    Branching { rooted: bool },
}

/// Disjoint union; right states are shifted by `left.len()`.
fn union<L: StepLabel>(left: &LGraph<L>, right: &LGraph<L>) -> LGraph<L> {
    let n = left.len();
    let mut edges = left.edges.clone();
    edges.extend(right.edges.iter().map(|es| es.iter().map(|(l, j)| (l.clone(), j + n)).collect()));
    let mut terminal = left.terminal.clone();
    terminal.extend(right.terminal.iter().copied());
    LGraph { initial: left.initial, edges, terminal }
}

/// A move in a signature: a label, or termination (`None`).
type Move<L> = (Option<L>, usize);

struct Refiner<'g, L> {
    g: &'g LGraph<L>,
    kind: Kind,
}

impl<L: StepLabel> Refiner<'_, L> {
    /// States reachable from `s` by silent moves inside the block of `s`.
    fn inert_closure(&self, s: usize, blocks: &[u32]) -> Vec<usize> {
        let mut seen = BTreeSet::from([s]);
        let mut todo = vec![s];
        while let Some(u) = todo.pop() {
            for (l, v) in &self.g.edges[u] {
                if l.is_silent() && blocks[*v] == blocks[s] && seen.insert(*v) {
                    todo.push(*v);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn moves(&self, s: usize, blocks: &[u32]) -> Vec<Move<L>> {
        match self.kind {
            Kind::Strong => {
                let mut m: Vec<Move<L>> = self.g.edges[s].iter().map(|(l, v)| (Some(l.clone()), *v)).collect();
                if self.g.terminal[s] {
                    m.push((None, s));
                }
                m
            }
            Kind::Branching { .. } => {
                let mut m = Vec::new();
                for u in self.inert_closure(s, blocks) {
                    if self.g.terminal[u] {
                        m.push((None, u));
                    }
                    for (l, v) in &self.g.edges[u] {
                        if !(l.is_silent() && blocks[*v] == blocks[s]) {
                            m.push((Some(l.clone()), *v));
                        }
                    }
                }
                m
            }
        }
    }

    fn signature(&self, s: usize, blocks: &[u32]) -> Vec<(Option<L>, u32)> {
        let mut sig: Vec<(Option<L>, u32)> = self
            .moves(s, blocks)
            .into_iter()
            .map(|(l, v)| {
                let b = if l.is_none() { 0 } else { blocks[v] };
                (l, b)
            })
            .collect();
        sig.sort();
        sig.dedup();
        sig
    }

    /// Coarsest stable partition, with the partition after every round.
    fn run(&self) -> Vec<Vec<u32>> {
        let n = self.g.len();
        let mut blocks = vec![0u32; n];
        let mut count = 1;
        let mut history = vec![blocks.clone()];
        loop {
            let mut ids: HashMap<(u32, Vec<(Option<L>, u32)>), u32> = HashMap::new();
            let next: Vec<u32> = (0..n)
                .map(|s| {
                    let key = (blocks[s], self.signature(s, &blocks));
                    let k = ids.len() as u32;
                    *ids.entry(key).or_insert(k)
                })
                .collect();
            let new_count = ids.len();
            blocks = next;
            history.push(blocks.clone());
            if new_count == count {
                return history;
            }
            count = new_count;
        }
    }

    /// A sequence of moves that tells `s` and `t` apart, read off the
    /// refinement history.
    fn distinguish(&self, history: &[Vec<u32>], mut s: usize, mut t: usize, split: usize) -> Vec<String> {
        let side = |x: usize| if x < split { "left" } else { "right" };
        let mut out = Vec::new();
        for _ in 0..history.len() + 1 {
            let Some(k) = (0..history.len()).find(|&k| history[k][s] != history[k][t]) else { break };
            if k == 0 {
                break;
            }
            let prev = &history[k - 1];
            let ms = self.moves(s, prev);
            let mt = self.moves(t, prev);
            let key = |m: &Move<L>| (m.0.clone(), if m.0.is_none() { 0 } else { prev[m.1] });
            let kt: BTreeSet<_> = mt.iter().map(key).collect();
            let ks: BTreeSet<_> = ms.iter().map(key).collect();
            let found = ms
                .iter()
                .find(|m| !kt.contains(&key(m)))
                .map(|m| (m.clone(), s, &mt))
                .or_else(|| mt.iter().find(|m| !ks.contains(&key(m))).map(|m| (m.clone(), t, &ms)));
            let Some(((label, target), from, others)) = found else { break };
            match label {
                None => {
                    out.push(format!("{} terminates", side(from)));
                    break;
                }
                Some(l) => {
                    out.push(format!("{} {}", side(from), l.show()));
                    let partner = others.iter().find(|m| m.0.as_ref() == Some(&l)).map(|m| m.1);
                    match partner {
                        None => break,
                        Some(p) => {
                            if from == s {
                                s = target;
                                t = p;
                            } else {
                                s = p;
                                t = target;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Compares the roots of `left` and `right`.
pub(crate) fn compare<L: StepLabel>(left: &LGraph<L>, right: &LGraph<L>, kind: Kind) -> GraphOutcome {
    let g = union(left, right);
    let n = left.len();
    let r = Refiner { g: &g, kind };
    let history = r.run();
    let blocks = history.last().expect("nonempty history");
    let (s0, t0) = (left.initial, right.initial + n);
    let mut related = blocks[s0] == blocks[t0];
    let mut sequence = Vec::new();
    if related {
        if let Kind::Branching { rooted: true } = kind {
            if let Some(reason) = root_violation(&g, blocks, s0, t0) {
                related = false;
                sequence.push(reason);
            }
        }
    } else {
        sequence = r.distinguish(&history, s0, t0, n);
    }
    let pairs = if related { related_pairs(&g, blocks, s0, t0, n) } else { Vec::new() };
    GraphOutcome { related, pairs, sequence }
}

/// Root clauses: initial moves, silent ones included, are matched by a
/// single move into the same block; termination must agree exactly.
fn root_violation<L: StepLabel>(g: &LGraph<L>, blocks: &[u32], s0: usize, t0: usize) -> Option<String> {
    if g.terminal[s0] != g.terminal[t0] {
        return Some("root termination differs".to_string());
    }
    for (a, b, name) in [(s0, t0, "left"), (t0, s0, "right")] {
        for (l, v) in &g.edges[a] {
            if !g.edges[b].iter().any(|(m, w)| m == l && blocks[*w] == blocks[*v]) {
                return Some(format!("{name} {} at the root", l.show()));
            }
        }
    }
    None
}

/// Pairs of related states reachable from the roots by matching moves.
fn related_pairs<L: StepLabel>(g: &LGraph<L>, blocks: &[u32], s0: usize, t0: usize, n: usize) -> Vec<(usize, usize)> {
    let mut seen = BTreeSet::from([(s0, t0)]);
    let mut todo = VecDeque::from([(s0, t0)]);
    while let Some((s, t)) = todo.pop_front() {
        for (_, v) in &g.edges[s] {
            for (_, w) in &g.edges[t] {
                if blocks[*v] == blocks[*w] && seen.insert((*v, *w)) {
                    todo.push_back((*v, *w));
                }
            }
        }
        for (l, v) in &g.edges[s] {
            if l.is_silent() && blocks[*v] == blocks[t] && seen.insert((*v, t)) {
                todo.push_back((*v, t));
            }
        }
        for (l, w) in &g.edges[t] {
            if l.is_silent() && blocks[*w] == blocks[s] && seen.insert((s, *w)) {
                todo.push_back((s, *w));
            }
        }
    }
    seen.into_iter().map(|(s, t)| (s, t - n)).collect()
}
