//! Configuration graphs of event structures.

use std::collections::HashMap;

use aptc_lts::StepGraph;
use aptc_pes::{Configuration, Pes, Pomset, PomsetKey};
use aptc_term::Label;

use crate::graph::LGraph;
use crate::verdict::EquivError;

/// Reachable configurations with their graph indices; index 0 is `∅`.
pub(crate) struct Configs {
    pub list: Vec<Configuration>,
    pub index: HashMap<Configuration, usize>,
}

pub(crate) fn configs(p: &Pes, bound: usize) -> Result<Configs, EquivError> {
    let list = p.configurations(bound)?;
    let index = list.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    Ok(Configs { list, index })
}

fn build<L>(
    cs: &Configs,
    terminal: impl Fn(Configuration) -> bool,
    edges: impl Fn(Configuration) -> Vec<(L, Configuration)>,
) -> LGraph<L> {
    LGraph {
        initial: 0,
        edges: cs.list.iter().map(|&c| edges(c).into_iter().map(|(l, d)| (l, cs.index[&d])).collect()).collect(),
        terminal: cs.list.iter().map(|&c| terminal(c)).collect(),
    }
}

fn visible_part(p: &Pes, x: Configuration) -> Configuration {
    x & !p.tau_events()
}

fn tau_key() -> PomsetKey {
    Pomset { labels: vec![Label::Tau], below: vec![0] }.key()
}

/// Strong step transitions between configurations.
pub(crate) fn step_graph(p: &Pes, cs: &Configs) -> LGraph<Vec<Label>> {
    build(cs, |c| p.is_terminal(c), |c| p.step_transitions(c))
}

/// Strong pomset transitions between configurations.
pub(crate) fn pomset_graph(p: &Pes, cs: &Configs) -> LGraph<PomsetKey> {
    build(cs, |c| p.is_terminal(c), |c| p.pomset_transitions(c).into_iter().map(|(q, d)| (q.key(), d)).collect())
}

/// Step transitions with silent events absorbed: a step with visible
/// events is labelled by them alone, a silent step by a single `τ`.
pub(crate) fn absorbed_step_graph(p: &Pes, cs: &Configs) -> LGraph<Vec<Label>> {
    build(
        cs,
        |c| p.is_terminal(c),
        |c| {
            p.step_transitions(c)
                .into_iter()
                .map(|(ls, d)| {
                    let vis: Vec<Label> = ls.iter().filter(|l| !l.is_tau()).cloned().collect();
                    (if vis.is_empty() { vec![Label::Tau] } else { vis }, d)
                })
                .collect()
        },
    )
}

/// Pomset transitions with silent events absorbed.
pub(crate) fn absorbed_pomset_graph(p: &Pes, cs: &Configs) -> LGraph<PomsetKey> {
    build(
        cs,
        |c| p.is_terminal(c),
        |c| {
            p.pomset_transitions(c)
                .into_iter()
                .map(|(_, d)| {
                    let vis = visible_part(p, d & !c);
                    (if vis == 0 { tau_key() } else { Pomset::of(p, vis).key() }, d)
                })
                .collect()
        },
    )
}

/// Weak transitions: `ε` to every silent extension, and visible steps
/// with silent events fired before, between or after them.
pub(crate) fn weak_step_graph(p: &Pes, cs: &Configs) -> LGraph<Option<Vec<Label>>> {
    build(
        cs,
        |c| p.weakly_terminates(c),
        |c| {
            let mut out: Vec<(Option<Vec<Label>>, Configuration)> =
                p.tau_closure(c).into_iter().map(|d| (None, d)).collect();
            for (q, d) in p.weak_pomset_transitions(c) {
                if q.is_antichain() {
                    out.push((Some(q.label_multiset()), d));
                }
            }
            out
        },
    )
}

pub(crate) fn weak_pomset_graph(p: &Pes, cs: &Configs) -> LGraph<Option<PomsetKey>> {
    build(
        cs,
        |c| p.weakly_terminates(c),
        |c| {
            let mut out: Vec<(Option<PomsetKey>, Configuration)> =
                p.tau_closure(c).into_iter().map(|d| (None, d)).collect();
            out.extend(p.weak_pomset_transitions(c).into_iter().map(|(q, d)| (Some(q.key()), d)));
            out
        },
    )
}

/// The step transition graph of an event structure, as used for LTS
/// comparison: configurations are states, steps are labelled by their
/// sorted label multisets.
pub fn pes_step_graph(p: &Pes, bound: usize) -> Result<StepGraph, EquivError> {
    let cs = configs(p, bound)?;
    let g = step_graph(p, &cs);
    Ok(StepGraph { initial: 0, edges: g.edges, terminal: g.terminal })
}
