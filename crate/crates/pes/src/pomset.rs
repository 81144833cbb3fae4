//! Labelled partial orders and their canonical forms.
//!
//! Two pomsets are isomorphic iff their [`PomsetKey`]s are equal. The key
//! is computed by colour refinement on the order relation, then
//! individualization of one vertex at a time where classes remain, taking
//! the least encoding. Interchangeable vertices (same label, predecessors
//! and successors) are individualized only once.

use aptc_term::Label;

use crate::pes::{members, EventSet, Pes};

/// A finite labelled strict partial order; `below[i]` holds the vertices
/// strictly before `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pomset {
    pub labels: Vec<Label>,
    pub below: Vec<u64>,
}

/// Canonical form of a pomset up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PomsetKey {
    pub labels: Vec<Label>,
    pub rows: Vec<u64>,
}

impl Pomset {
    /// The events `x` of `pes` with the induced order.
    pub fn of(pes: &Pes, x: EventSet) -> Pomset {
        let evs: Vec<usize> = members(x).collect();
        let labels = evs.iter().map(|&e| pes.label(e).clone()).collect();
        let below = evs
            .iter()
            .map(|&b| {
                evs.iter()
                    .enumerate()
                    .filter(|&(_, &a)| a != b && pes.leq(a, b))
                    .fold(0u64, |acc, (i, _)| acc | (1 << i))
            })
            .collect();
        Pomset { labels, below }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The sorted label multiset.
    pub fn label_multiset(&self) -> Vec<Label> {
        let mut v = self.labels.clone();
        v.sort();
        v
    }

    /// True iff no two vertices are ordered.
    pub fn is_antichain(&self) -> bool {
        self.below.iter().all(|&b| b == 0)
    }

    fn above(&self) -> Vec<u64> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).filter(|&j| self.below[j] & (1 << i) != 0).fold(0u64, |acc, j| acc | (1 << j)))
            .collect()
    }

    pub fn key(&self) -> PomsetKey {
        let n = self.len();
        let mut distinct = self.labels.clone();
        distinct.sort();
        distinct.dedup();
        let colors: Vec<u32> =
            self.labels.iter().map(|l| distinct.binary_search(l).expect("label present") as u32).collect();
        let above = self.above();
        let mut best: Option<PomsetKey> = None;
        search(self, &above, colors, n, &mut best);
        best.expect("search yields a key")
    }
}

fn class_count(colors: &[u32]) -> usize {
    let mut v = colors.to_vec();
    v.sort();
    v.dedup();
    v.len()
}

fn refine(p: &Pomset, above: &[u64], colors: &mut Vec<u32>) {
    let n = p.len();
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut pre: Vec<u32> = (0..n).filter(|&u| p.below[v] & (1 << u) != 0).map(|u| colors[u]).collect();
                let mut post: Vec<u32> = (0..n).filter(|&u| above[v] & (1 << u) != 0).map(|u| colors[u]).collect();
                pre.sort();
                post.sort();
                (colors[v], pre, post)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        let before = class_count(colors);
        *colors = sigs.iter().map(|s| uniq.binary_search(s).expect("present") as u32).collect();
        if uniq.len() == before {
            return;
        }
    }
}

fn search(p: &Pomset, above: &[u64], mut colors: Vec<u32>, n: usize, best: &mut Option<PomsetKey>) {
    refine(p, above, &mut colors);
    let mut by_color: Vec<(u32, usize)> = colors.iter().enumerate().map(|(v, &c)| (c, v)).collect();
    by_color.sort();
    let tied = (0..n).map(|c| c as u32).find(|&c| colors.iter().filter(|&&x| x == c).count() > 1);
    let Some(c) = tied else {
        let order: Vec<usize> = by_color.iter().map(|&(_, v)| v).collect();
        let key = encode(p, &order);
        if best.as_ref().is_none_or(|b| key < *b) {
            *best = Some(key);
        }
        return;
    };
    let class: Vec<usize> = (0..n).filter(|&v| colors[v] == c).collect();
    let twins = class.iter().all(|&v| p.below[v] == p.below[class[0]] && above[v] == above[class[0]]);
    let candidates = if twins { &class[..1] } else { &class[..] };
    for &v in candidates {
        let next: Vec<u32> =
            (0..n).map(|u| colors[u] * 2 + u32::from(colors[u] == c && u != v)).collect();
        search(p, above, next, n, best);
    }
}

fn encode(p: &Pomset, order: &[usize]) -> PomsetKey {
    let pos: Vec<usize> = {
        let mut pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    };
    let labels = order.iter().map(|&v| p.labels[v].clone()).collect();
    let rows = order
        .iter()
        .map(|&v| members(p.below[v] as EventSet).fold(0u64, |acc, u| acc | (1 << pos[u])))
        .collect();
    PomsetKey { labels, rows }
}
