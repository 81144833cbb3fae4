//! Truly concurrent bisimulations: strong and weak step, pomset, hp and
//! hhp bisimulation on finite event structures; branching and rooted
//! branching variants; branching step bisimulation on step transition
//! systems.

pub mod graph;
pub mod hp;
pub mod pes_graph;
pub mod verdict;

use aptc_lts::{StepGraph, StepLTS};
use aptc_pes::Pes;
use aptc_term::Label;

use graph::{compare, GraphOutcome, Kind, LGraph, StepLabel};
use hp::HpKind;
pub use hp::PosetalTriple;
pub use pes_graph::pes_step_graph;
pub use verdict::{Bounds, EquivError, Mode, Verdict, Witness};

fn check_size(p1: &Pes, p2: &Pes, mode: Mode, b: &Bounds) -> Result<(), EquivError> {
    let bound = match mode {
        Mode::Step | Mode::Pomset => b.step_events,
        Mode::Hp | Mode::Hhp => b.hp_events,
    };
    let events = p1.len().max(p2.len());
    if events > bound {
        return Err(EquivError::TooManyEvents { events, bound, mode });
    }
    Ok(())
}

fn config_verdict(relation: String, o: GraphOutcome, c1: &[u128], c2: &[u128]) -> Verdict {
    Verdict {
        related: o.related,
        relation,
        witness: if o.related {
            Witness::ConfigPairs(o.pairs.iter().map(|&(s, t)| (c1[s], c2[t])).collect())
        } else {
            Witness::None
        },
        sequence: o.sequence,
    }
}

fn on_graphs<L: StepLabel>(
    p1: &Pes,
    p2: &Pes,
    b: &Bounds,
    relation: String,
    kind: Kind,
    build: fn(&Pes, &pes_graph::Configs) -> LGraph<L>,
) -> Result<Verdict, EquivError> {
    let c1 = pes_graph::configs(p1, b.configurations)?;
    let c2 = pes_graph::configs(p2, b.configurations)?;
    let o = compare(&build(p1, &c1), &build(p2, &c2), kind);
    Ok(config_verdict(relation, o, &c1.list, &c2.list))
}

fn on_triples(p1: &Pes, p2: &Pes, b: &Bounds, relation: String, kind: HpKind, hhp: bool) -> Result<Verdict, EquivError> {
    let o = hp::check(p1, p2, kind, hhp, b.triples)?;
    Ok(Verdict {
        related: o.related,
        relation,
        witness: if o.related { Witness::Triples(o.triples) } else { Witness::None },
        sequence: o.sequence,
    })
}

/// Strong bisimulation in the given mode; `τ` is an ordinary label.
pub fn strong_bisim(p1: &Pes, p2: &Pes, mode: Mode) -> Result<Verdict, EquivError> {
    strong_bisim_with(p1, p2, mode, &Bounds::default())
}

pub fn strong_bisim_with(p1: &Pes, p2: &Pes, mode: Mode, b: &Bounds) -> Result<Verdict, EquivError> {
    check_size(p1, p2, mode, b)?;
    let rel = mode.name().to_string();
    match mode {
        Mode::Step => on_graphs(p1, p2, b, rel, Kind::Strong, pes_graph::step_graph),
        Mode::Pomset => on_graphs(p1, p2, b, rel, Kind::Strong, pes_graph::pomset_graph),
        Mode::Hp => on_triples(p1, p2, b, rel, HpKind::Strong, false),
        Mode::Hhp => on_triples(p1, p2, b, rel, HpKind::Strong, true),
    }
}

/// Weak bisimulation: silent events may precede, interleave with and
/// follow the observed events; they are outside the posetal bijection.
pub fn weak_bisim(p1: &Pes, p2: &Pes, mode: Mode) -> Result<Verdict, EquivError> {
    weak_bisim_with(p1, p2, mode, &Bounds::default())
}

pub fn weak_bisim_with(p1: &Pes, p2: &Pes, mode: Mode, b: &Bounds) -> Result<Verdict, EquivError> {
    check_size(p1, p2, mode, b)?;
    let rel = format!("weak-{}", mode.name());
    match mode {
        Mode::Step => on_graphs(p1, p2, b, rel, Kind::Strong, pes_graph::weak_step_graph),
        Mode::Pomset => on_graphs(p1, p2, b, rel, Kind::Strong, pes_graph::weak_pomset_graph),
        Mode::Hp => on_triples(p1, p2, b, rel, HpKind::Weak, false),
        Mode::Hhp => on_triples(p1, p2, b, rel, HpKind::Weak, true),
    }
}

fn branching_name(mode: Mode, rooted: bool) -> String {
    let m = match mode {
        Mode::Step => "s",
        Mode::Pomset => "p",
        Mode::Hp => "hp",
        Mode::Hhp => "hhp",
    };
    format!("{}b{m}", if rooted { "r" } else { "" })
}

/// Branching bisimulation on event structures, rooted or not. A step or
/// pomset made only of silent events may stutter.
pub fn branching_bisim_pes(p1: &Pes, p2: &Pes, mode: Mode, rooted: bool, b: &Bounds) -> Result<Verdict, EquivError> {
    check_size(p1, p2, mode, b)?;
    let rel = branching_name(mode, rooted);
    let kind = Kind::Branching { rooted };
    match mode {
        Mode::Step => on_graphs(p1, p2, b, rel, kind, pes_graph::absorbed_step_graph),
        Mode::Pomset => on_graphs(p1, p2, b, rel, kind, pes_graph::absorbed_pomset_graph),
        Mode::Hp => on_triples(p1, p2, b, rel, HpKind::Branching { rooted }, false),
        Mode::Hhp => Err(EquivError::UnsupportedMode(mode)),
    }
}

/// Rooted branching bisimulation on event structures (`rbs`, `rbp`, `rbhp`).
pub fn rooted_branching_bisim_pes(p1: &Pes, p2: &Pes, mode: Mode) -> Result<Verdict, EquivError> {
    branching_bisim_pes(p1, p2, mode, true, &Bounds::default())
}

fn graph_verdict(relation: &str, o: GraphOutcome) -> Verdict {
    Verdict {
        related: o.related,
        relation: relation.to_string(),
        witness: if o.related { Witness::StatePairs(o.pairs) } else { Witness::None },
        sequence: o.sequence,
    }
}

/// Strong step bisimulation of two step graphs.
pub fn step_bisim_graphs(g1: &StepGraph, g2: &StepGraph) -> Verdict {
    let (a, b): (LGraph<Vec<Label>>, LGraph<Vec<Label>>) = (g1.into(), g2.into());
    graph_verdict("step", compare(&a, &b, Kind::Strong))
}

/// Branching step bisimulation of two step graphs.
pub fn branching_step_bisim_graphs(g1: &StepGraph, g2: &StepGraph, rooted: bool) -> Verdict {
    let (a, b): (LGraph<Vec<Label>>, LGraph<Vec<Label>>) = (g1.into(), g2.into());
    graph_verdict(if rooted { "rbs" } else { "bs" }, compare(&a, &b, Kind::Branching { rooted }))
}

/// Strong step bisimulation of two step transition systems.
pub fn step_bisim_lts(l1: &StepLTS, l2: &StepLTS) -> Verdict {
    step_bisim_graphs(&l1.to_graph(), &l2.to_graph())
}

/// Branching step bisimulation of two step transition systems, with the
/// root clauses when `rooted`.
pub fn branching_step_bisim_lts(l1: &StepLTS, l2: &StepLTS, rooted: bool) -> Verdict {
    branching_step_bisim_graphs(&l1.to_graph(), &l2.to_graph(), rooted)
}
