//! History-preserving bisimulations over posetal triples `(C1, f, C2)`.
//!
//! Candidate triples are generated from `(∅, ∅, ∅)` by single-event moves:
//! a matched pair of events that keeps `f` an isomorphism, or, in the weak
//! and branching variants, a silent event on one side (silent events stay
//! outside the domain of `f`). Triples violating a transfer clause are then
//! deleted until a fixed point is reached. For hhp a triple is also deleted
//! when removing a pair of maximal related events leads outside the
//! relation.

use std::collections::{HashMap, VecDeque};

use aptc_pes::{Configuration, Pes};

use crate::verdict::EquivError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum HpKind {
    Strong,
    Weak,
    Branching { rooted: bool },
}

/// A surviving triple; `f` pairs left events with right events.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosetalTriple {
    pub c1: Configuration,
    pub f: Vec<(usize, usize)>,
    pub c2: Configuration,
}

pub(crate) struct HpOutcome {
    pub related: bool,
    pub triples: Vec<PosetalTriple>,
    pub sequence: Vec<String>,
}

type Key = (Configuration, Configuration, Vec<(u8, u8)>);

fn bit(e: usize) -> u128 {
    1u128 << e
}

fn members(x: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |i| x & (1u128 << i) != 0)
}

struct Checker<'a> {
    p: [&'a Pes; 2],
    kind: HpKind,
    hhp: bool,
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    alive: Vec<bool>,
    reason: Vec<Option<(String, Option<usize>)>>,
    closure: [HashMap<Configuration, Vec<Configuration>>; 2],
}

/// Failure of a clause, with a label and the triple to continue from.
type Fail = (String, Option<usize>);

impl<'a> Checker<'a> {
    fn in_dom(&self, side: usize, e: usize) -> bool {
        self.kind == HpKind::Strong || !self.p[side].is_tau(e)
    }

    /// `f` oriented from side `a` to the other side.
    fn oriented(f: &[(u8, u8)], a: usize) -> Vec<(usize, usize)> {
        f.iter().map(|&(x, y)| if a == 0 { (x as usize, y as usize) } else { (y as usize, x as usize) }).collect()
    }

    fn key(&self, a: usize, ca: Configuration, cb: Configuration, f: &[(usize, usize)]) -> Key {
        let mut g: Vec<(u8, u8)> =
            f.iter().map(|&(x, y)| if a == 0 { (x as u8, y as u8) } else { (y as u8, x as u8) }).collect();
        g.sort();
        if a == 0 {
            (ca, cb, g)
        } else {
            (cb, ca, g)
        }
    }

    fn lookup(&self, k: &Key) -> Option<usize> {
        self.index.get(k).copied()
    }

    fn live(&self, k: &Key) -> bool {
        self.lookup(k).is_some_and(|i| self.alive[i])
    }

    fn ext_ok(&self, a: usize, f: &[(usize, usize)], e1: usize, e2: usize) -> bool {
        let b = 1 - a;
        self.p[a].label(e1) == self.p[b].label(e2)
            && f.iter().all(|&(x, y)| self.p[a].leq(x, e1) == self.p[b].leq(y, e2))
    }

    fn tau_closure(&mut self, side: usize, c: Configuration) -> Vec<Configuration> {
        if let Some(v) = self.closure[side].get(&c) {
            return v.clone();
        }
        let v = self.p[side].tau_closure(c);
        self.closure[side].insert(c, v.clone());
        v
    }

    /// Builds every candidate triple reachable from the empty one.
    fn generate(&mut self, limit: usize) -> Result<(), EquivError> {
        let seed: Key = (0, 0, Vec::new());
        self.index.insert(seed.clone(), 0);
        self.keys.push(seed);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (c0, c1, f) = self.keys[i].clone();
            let mut next: Vec<Key> = Vec::new();
            let cs = [c0, c1];
            for a in 0..2 {
                let b = 1 - a;
                let fa = Self::oriented(&f, a);
                for e1 in members(self.p[a].enabled(cs[a])) {
                    if !self.in_dom(a, e1) {
                        next.push(self.key(a, cs[a] | bit(e1), cs[b], &fa));
                        continue;
                    }
                    if a == 1 {
                        continue;
                    }
                    for e2 in members(self.p[b].enabled(cs[b])) {
                        if self.in_dom(b, e2) && self.ext_ok(a, &fa, e1, e2) {
                            let mut g = fa.clone();
                            g.push((e1, e2));
                            next.push(self.key(a, cs[a] | bit(e1), cs[b] | bit(e2), &g));
                        }
                    }
                }
            }
            for k in next {
                if !self.index.contains_key(&k) {
                    if self.keys.len() >= limit {
                        return Err(EquivError::TripleBound { bound: limit });
                    }
                    self.index.insert(k.clone(), self.keys.len());
                    queue.push_back(self.keys.len());
                    self.keys.push(k);
                }
            }
        }
        self.alive = vec![true; self.keys.len()];
        self.reason = vec![None; self.keys.len()];
        Ok(())
    }

    fn label(&self, side: usize, e: usize) -> String {
        let name = if side == 0 { "left" } else { "right" };
        format!("{name} {}", self.p[side].label(e))
    }

    /// Transfer clause for event `e1` of side `a` in triple `i`.
    fn transfer(&mut self, i: usize, a: usize, e1: usize) -> Result<(), Fail> {
        let b = 1 - a;
        let (c0, c1, f) = self.keys[i].clone();
        let cs = [c0, c1];
        let (ca, cb) = (cs[a], cs[b]);
        let fa = Self::oriented(&f, a);
        let na = ca | bit(e1);
        let mut fallback: Option<usize> = None;
        let mut note = |k: &Key, this: &Self| {
            if fallback.is_none() {
                fallback = this.lookup(k);
            }
        };
        match self.kind {
            HpKind::Strong => {
                for e2 in members(self.p[b].enabled(cb)) {
                    if self.ext_ok(a, &fa, e1, e2) {
                        let mut g = fa.clone();
                        g.push((e1, e2));
                        let k = self.key(a, na, cb | bit(e2), &g);
                        if self.live(&k) {
                            return Ok(());
                        }
                        note(&k, self);
                    }
                }
            }
            HpKind::Weak => {
                let silent = !self.in_dom(a, e1);
                for mid in self.tau_closure(b, cb) {
                    if silent {
                        let k = self.key(a, na, mid, &fa);
                        if self.live(&k) {
                            return Ok(());
                        }
                        note(&k, self);
                        continue;
                    }
                    for e2 in members(self.p[b].enabled(mid)) {
                        if !self.in_dom(b, e2) || !self.ext_ok(a, &fa, e1, e2) {
                            continue;
                        }
                        let mut g = fa.clone();
                        g.push((e1, e2));
                        for end in self.tau_closure(b, mid | bit(e2)) {
                            let k = self.key(a, na, end, &g);
                            if self.live(&k) {
                                return Ok(());
                            }
                            note(&k, self);
                        }
                    }
                }
            }
            HpKind::Branching { .. } => {
                let silent = !self.in_dom(a, e1);
                if silent {
                    let k = self.key(a, na, cb, &fa);
                    if self.live(&k) {
                        return Ok(());
                    }
                    note(&k, self);
                }
                for mid in self.tau_closure(b, cb) {
                    if !self.live(&self.key(a, ca, mid, &fa)) {
                        continue;
                    }
                    for e2 in members(self.p[b].enabled(mid)) {
                        let k = if silent {
                            if self.in_dom(b, e2) {
                                continue;
                            }
                            self.key(a, na, mid | bit(e2), &fa)
                        } else {
                            if !self.in_dom(b, e2) || !self.ext_ok(a, &fa, e1, e2) {
                                continue;
                            }
                            let mut g = fa.clone();
                            g.push((e1, e2));
                            self.key(a, na, mid | bit(e2), &g)
                        };
                        if self.live(&k) {
                            return Ok(());
                        }
                        note(&k, self);
                    }
                }
            }
        }
        Err((self.label(a, e1), fallback))
    }

    fn termination(&mut self, i: usize) -> Result<(), Fail> {
        let (c0, c1, f) = self.keys[i].clone();
        let cs = [c0, c1];
        for a in 0..2 {
            let b = 1 - a;
            if !self.p[a].is_terminal(cs[a]) {
                continue;
            }
            let ok = match self.kind {
                HpKind::Strong => self.p[b].is_terminal(cs[b]),
                HpKind::Weak => self.p[b].weakly_terminates(cs[b]),
                HpKind::Branching { .. } => {
                    let fa = Self::oriented(&f, a);
                    self.tau_closure(b, cs[b])
                        .into_iter()
                        .any(|m| self.p[b].is_terminal(m) && self.live(&self.key(a, cs[a], m, &fa)))
                }
            };
            if !ok {
                let name = if a == 0 { "left" } else { "right" };
                return Err((format!("{name} terminates"), None));
            }
        }
        Ok(())
    }

    fn maximal(&self, side: usize, c: Configuration, e: usize) -> bool {
        members(c).all(|z| z == e || !self.p[side].leq(e, z))
    }

    /// Downward closure: removing a pair of maximal related events stays
    /// inside the relation.
    fn downward(&self, i: usize) -> Result<(), Fail> {
        let (c0, c1, f) = &self.keys[i];
        for (j, &(x, y)) in f.iter().enumerate() {
            let (x, y) = (x as usize, y as usize);
            if !(self.maximal(0, *c0, x) && self.maximal(1, *c1, y)) {
                continue;
            }
            let mut g = f.clone();
            g.remove(j);
            let k = (c0 & !bit(x), c1 & !bit(y), g);
            if !self.live(&k) {
                return Err((format!("backtrack {}", self.p[0].label(x)), self.lookup(&k)));
            }
        }
        Ok(())
    }

    fn check(&mut self, i: usize) -> Result<(), Fail> {
        self.termination(i)?;
        let (c0, c1, _) = self.keys[i].clone();
        let cs = [c0, c1];
        for a in 0..2 {
            for e1 in members(self.p[a].enabled(cs[a])).collect::<Vec<_>>() {
                self.transfer(i, a, e1)?;
            }
        }
        if self.hhp {
            self.downward(i)?;
        }
        Ok(())
    }

    fn fixpoint(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.keys.len() {
                if !self.alive[i] {
                    continue;
                }
                if let Err(r) = self.check(i) {
                    self.alive[i] = false;
                    self.reason[i] = Some(r);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Root clauses: initial events are matched by a single event of the
    /// same kind, landing in the relation; termination agrees exactly.
    fn root_violation(&mut self) -> Option<String> {
        if self.p[0].is_terminal(0) != self.p[1].is_terminal(0) {
            return Some("root termination differs".to_string());
        }
        for a in 0..2 {
            let b = 1 - a;
            for e1 in members(self.p[a].enabled(0)) {
                let silent = !self.in_dom(a, e1);
                let matched = members(self.p[b].enabled(0)).any(|e2| {
                    if silent {
                        !self.in_dom(b, e2) && self.live(&self.key(a, bit(e1), bit(e2), &[]))
                    } else {
                        self.in_dom(b, e2)
                            && self.ext_ok(a, &[], e1, e2)
                            && self.live(&self.key(a, bit(e1), bit(e2), &[(e1, e2)]))
                    }
                });
                if !matched {
                    return Some(format!("{} at the root", self.label(a, e1)));
                }
            }
        }
        None
    }

    fn sequence(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut i = 0;
        for _ in 0..self.keys.len() {
            match &self.reason[i] {
                Some((s, next)) => {
                    out.push(s.clone());
                    match next {
                        Some(j) if !self.alive[*j] && *j != i => i = *j,
                        _ => break,
                    }
                }
                None => break,
            }
        }
        out
    }
}

pub(crate) fn check(
    p1: &Pes,
    p2: &Pes,
    kind: HpKind,
    hhp: bool,
    triple_bound: usize,
) -> Result<HpOutcome, EquivError> {
    let mut c = Checker {
        p: [p1, p2],
        kind,
        hhp,
        keys: Vec::new(),
        index: HashMap::new(),
        alive: Vec::new(),
        reason: Vec::new(),
        closure: [HashMap::new(), HashMap::new()],
    };
    c.generate(triple_bound)?;
    c.fixpoint();
    let mut related = c.alive[0];
    let mut sequence = if related { Vec::new() } else { c.sequence() };
    if related {
        if let HpKind::Branching { rooted: true } = kind {
            if let Some(r) = c.root_violation() {
                related = false;
                sequence.push(r);
            }
        }
    }
    let triples = if related {
        c.keys
            .iter()
            .zip(&c.alive)
            .filter(|(_, &a)| a)
            .map(|((c1, c2, f), _)| PosetalTriple {
                c1: *c1,
                f: f.iter().map(|&(x, y)| (x as usize, y as usize)).collect(),
                c2: *c2,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(HpOutcome { related, triples, sequence })
}
