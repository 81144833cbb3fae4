//! The event structure itself. Event sets are bitmasks, which caps a PES at
//! 128 events; every structure built here stays far below that.

use std::collections::{BTreeSet, HashSet};

use aptc_term::Label;

use crate::pomset::Pomset;

/// A set of events as a bitmask over event indices.
pub type EventSet = u128;

/// A configuration: a conflict-free, downward-closed event set.
pub type Configuration = EventSet;

pub const MAX_EVENTS: usize = 128;

/// Default bound on the number of configurations enumerated.
pub const DEFAULT_CONFIG_BOUND: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PesError {
    #[error("event structure exceeds {MAX_EVENTS} events")]
    TooManyEvents,
    #[error("more than {bound} configurations")]
    ConfigurationBound { bound: usize },
    #[error("term is outside the structurally compiled fragment: {0}")]
    NotInFragment(String),
    #[error("unknown renaming {0}")]
    UnknownRenaming(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A finite prime event structure with recorded terminating configurations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pes {
    labels: Vec<Label>,
    /// `down[e]`: the events `e' ≤ e`, including `e`.
    down: Vec<EventSet>,
    conflict: Vec<EventSet>,
    terminal: BTreeSet<EventSet>,
}

pub(crate) fn bit(e: usize) -> EventSet {
    1u128 << e
}

pub(crate) fn members(s: EventSet) -> impl Iterator<Item = usize> {
    (0..MAX_EVENTS).filter(move |&i| s & bit(i) != 0)
}

impl Pes {
    /// Builds a PES from labels, strict causes, conflicts and terminal
    /// configurations. Causality is closed transitively and conflict is
    /// made symmetric and hereditary.
    pub fn from_parts(
        labels: Vec<Label>,
        causes: Vec<EventSet>,
        conflicts: &[(usize, usize)],
        terminal: impl IntoIterator<Item = EventSet>,
    ) -> Result<Pes, PesError> {
        let n = labels.len();
        if n > MAX_EVENTS {
            return Err(PesError::TooManyEvents);
        }
        let mut down: Vec<EventSet> = (0..n).map(|e| causes[e] | bit(e)).collect();
        loop {
            let mut changed = false;
            for e in 0..n {
                let mut d = down[e];
                for c in members(down[e]) {
                    d |= down[c];
                }
                if d != down[e] {
                    down[e] = d;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut conflict = vec![0; n];
        for &(a, b) in conflicts {
            conflict[a] |= bit(b);
            conflict[b] |= bit(a);
        }
        let mut pes = Pes { labels, down, conflict, terminal: terminal.into_iter().collect() };
        pes.close_conflict();
        Ok(pes)
    }

    /// Hereditary closure: `e ♯ e' ≤ e''` implies `e ♯ e''`.
    fn close_conflict(&mut self) {
        let n = self.len();
        loop {
            let mut changed = false;
            for e in 0..n {
                for f in 0..n {
                    if self.conflict[e] & bit(f) == 0 && self.down[f] & self.conflict[e] != 0 {
                        self.conflict[e] |= bit(f);
                        self.conflict[f] |= bit(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, e: usize) -> &Label {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// `{e' | e' ≤ e}`.
    pub fn down(&self, e: usize) -> EventSet {
        self.down[e]
    }

    /// Strict causes of `e`.
    pub fn causes(&self, e: usize) -> EventSet {
        self.down[e] & !bit(e)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.down[b] & bit(a) != 0
    }

    pub fn in_conflict(&self, a: usize, b: usize) -> bool {
        self.conflict[a] & bit(b) != 0
    }

    pub fn conflicts(&self, e: usize) -> EventSet {
        self.conflict[e]
    }

    pub fn concurrent(&self, a: usize, b: usize) -> bool {
        a != b && !self.leq(a, b) && !self.leq(b, a) && !self.in_conflict(a, b)
    }

    pub fn all_events(&self) -> EventSet {
        if self.len() == MAX_EVENTS {
            !0
        } else {
            bit(self.len()) - 1
        }
    }

    /// Recorded terminating configurations.
    pub fn terminal(&self) -> &BTreeSet<EventSet> {
        &self.terminal
    }

    pub fn is_terminal(&self, c: Configuration) -> bool {
        self.terminal.contains(&c)
    }

    pub fn is_configuration(&self, c: EventSet) -> bool {
        members(c).all(|e| self.down[e] & !c == 0 && self.conflict[e] & c == 0)
    }

    /// Events that can be added to `c` one at a time.
    pub fn enabled(&self, c: Configuration) -> EventSet {
        let mut out = 0;
        for e in 0..self.len() {
            if c & bit(e) == 0 && self.causes(e) & !c == 0 && self.conflict[e] & c == 0 {
                out |= bit(e);
            }
        }
        out
    }

    /// Every configuration, in increasing numeric order.
    pub fn configurations(&self, bound: usize) -> Result<Vec<Configuration>, PesError> {
        let mut seen = HashSet::new();
        let mut stack = vec![0u128];
        seen.insert(0u128);
        while let Some(c) = stack.pop() {
            for e in members(self.enabled(c)) {
                let d = c | bit(e);
                if seen.insert(d) {
                    if seen.len() > bound {
                        return Err(PesError::ConfigurationBound { bound });
                    }
                    stack.push(d);
                }
            }
        }
        let mut v: Vec<_> = seen.into_iter().collect();
        v.sort();
        Ok(v)
    }

    /// All nonempty `X` with `c ∪ X` a configuration, paired with `c ∪ X`.
    pub fn pomset_transitions(&self, c: Configuration) -> Vec<(Pomset, Configuration)> {
        self.extensions(c, &|_| true)
            .into_iter()
            .map(|d| (Pomset::of(self, d & !c), d))
            .collect()
    }

    /// Strict extensions of `c` through events satisfying `allowed`.
    pub fn extensions(&self, c: Configuration, allowed: &dyn Fn(usize) -> bool) -> Vec<Configuration> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![c];
        while let Some(d) = stack.pop() {
            for e in members(self.enabled(d)) {
                if !allowed(e) {
                    continue;
                }
                let n = d | bit(e);
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Steps: nonempty sets of pairwise concurrent enabled events, with the
    /// sorted label multiset and target configuration.
    pub fn step_transitions(&self, c: Configuration) -> Vec<(Vec<Label>, Configuration)> {
        let en: Vec<usize> = members(self.enabled(c)).collect();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.steps_from(&en, 0, c, &mut cur, &mut out);
        out
    }

    fn steps_from(
        &self,
        en: &[usize],
        i: usize,
        c: Configuration,
        cur: &mut Vec<usize>,
        out: &mut Vec<(Vec<Label>, Configuration)>,
    ) {
        if i == en.len() {
            if !cur.is_empty() {
                let mut ls: Vec<Label> = cur.iter().map(|&e| self.labels[e].clone()).collect();
                ls.sort();
                let target = cur.iter().fold(c, |acc, &e| acc | bit(e));
                out.push((ls, target));
            }
            return;
        }
        self.steps_from(en, i + 1, c, cur, out);
        let e = en[i];
        if cur.iter().all(|&f| !self.in_conflict(e, f)) {
            cur.push(e);
            self.steps_from(en, i + 1, c, cur, out);
            cur.pop();
        }
    }

    pub fn is_tau(&self, e: usize) -> bool {
        self.labels[e].is_tau()
    }

    pub fn tau_events(&self) -> EventSet {
        (0..self.len()).filter(|&e| self.is_tau(e)).fold(0, |acc, e| acc | bit(e))
    }

    /// Configurations reachable from `c` by τ events only (including `c`).
    pub fn tau_closure(&self, c: Configuration) -> Vec<Configuration> {
        let mut v = vec![c];
        v.extend(self.extensions(c, &|e| self.is_tau(e)));
        v
    }

    /// Weak pomset transitions: extensions whose new visible events `X`
    /// are nonempty, with τ events fired before, between or after them.
    /// The pomset is the visible part with the induced order.
    pub fn weak_pomset_transitions(&self, c: Configuration) -> Vec<(Pomset, Configuration)> {
        let tau = self.tau_events();
        self.extensions(c, &|_| true)
            .into_iter()
            .filter(|d| (d & !c) & !tau != 0)
            .map(|d| (Pomset::of(self, (d & !c) & !tau), d))
            .collect()
    }

    /// Whether a terminating configuration is reachable from `c` by τ events.
    pub fn weakly_terminates(&self, c: Configuration) -> bool {
        self.tau_closure(c).into_iter().any(|d| self.is_terminal(d))
    }
}
