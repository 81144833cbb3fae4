//! Breadth-first exploration of step transition systems.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use aptc_term::{step_string, Label, SpecFile, Term};

use crate::sos::{canon, LtsError, Sos};

/// Default bound on the number of explored states.
pub const DEFAULT_MAX_STATES: usize = 100_000;

/// Target of a transition: a state, or successful termination `√`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    State(usize),
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: usize,
    pub step: Vec<Label>,
    pub target: Target,
}

/// A finite step transition system. State 0 is initial; states are
/// canonical terms, pairwise distinct up to AC.
#[derive(Clone, Debug)]
pub struct StepLTS {
    pub states: Vec<Term>,
    pub transitions: Vec<Transition>,
    /// States that may terminate without an observable step.
    pub silent_termination: BTreeSet<usize>,
}

/// A plain step-labelled graph with a termination predicate, the common
/// input of the bisimulation checkers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepGraph {
    pub initial: usize,
    pub edges: Vec<Vec<(Vec<Label>, usize)>>,
    pub terminal: Vec<bool>,
}

impl StepGraph {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn transition_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}

/// Explores the step transition system of `t` breadth-first.
pub fn explore(t: &Term, spec: &SpecFile, max_states: usize) -> Result<StepLTS, LtsError> {
    let mut sos = Sos::new(spec, t);
    let start = canon(t);
    let mut index: HashMap<Term, usize> = HashMap::from([(start.clone(), 0)]);
    let mut lts = StepLTS { states: vec![start.clone()], transitions: Vec::new(), silent_termination: BTreeSet::new() };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = lts.states[i].clone();
        let steps = sos.steps(&s)?;
        if steps.silent_termination {
            lts.silent_termination.insert(i);
        }
        for (step, r) in steps.steps {
            let target = match r {
                None => Target::Done,
                Some(r) => {
                    let j = match index.get(&r) {
                        Some(&j) => j,
                        None => {
                            if lts.states.len() == max_states {
                                return Err(LtsError::StateBound { max: max_states });
                            }
                            let j = lts.states.len();
                            index.insert(r.clone(), j);
                            lts.states.push(r);
                            queue.push_back(j);
                            j
                        }
                    };
                    Target::State(j)
                }
            };
            lts.transitions.push(Transition { source: i, step, target });
        }
    }
    Ok(lts)
}

impl StepLTS {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    /// States with a transition to `√`.
    pub fn terminating(&self) -> BTreeSet<usize> {
        self.transitions.iter().filter(|t| t.target == Target::Done).map(|t| t.source).collect()
    }

    /// Every label on some transition.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.transitions.iter().flat_map(|t| t.step.iter().cloned()).collect()
    }

    pub fn outgoing(&self, i: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.source == i)
    }

    /// The graph form: `√` becomes one extra terminal sink state.
    pub fn to_graph(&self) -> StepGraph {
        let n = self.states.len();
        let mut g = StepGraph { initial: 0, edges: vec![Vec::new(); n + 1], terminal: vec![false; n + 1] };
        g.terminal[n] = true;
        for &i in &self.silent_termination {
            g.terminal[i] = true;
        }
        for t in &self.transitions {
            let j = match t.target {
                Target::State(j) => j,
                Target::Done => n,
            };
            g.edges[t.source].push((t.step.clone(), j));
        }
        g
    }

    /// Aldebaran text. Transitions into `√` lead to a state whose only
    /// transition is `tick`; silently terminating states have a direct
    /// `tick`.
    pub fn to_aldebaran(&self) -> String {
        let n = self.states.len();
        let needs_done = self.transitions.iter().any(|t| t.target == Target::Done);
        let needs_end = needs_done || !self.silent_termination.is_empty();
        let done = n;
        let end = if needs_done { n + 1 } else { n };
        let mut lines = Vec::new();
        for t in &self.transitions {
            let j = match t.target {
                Target::State(j) => j,
                Target::Done => done,
            };
            lines.push(format!("({}, \"{}\", {})", t.source, step_string(&t.step), j));
        }
        for &i in &self.silent_termination {
            lines.push(format!("({i}, \"tick\", {end})"));
        }
        if needs_done {
            lines.push(format!("({done}, \"tick\", {end})"));
        }
        let states = n + usize::from(needs_done) + usize::from(needs_end);
        let mut out = String::new();
        let _ = writeln!(out, "des (0, {}, {})", lines.len(), states);
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}
