//! Modes, bounds, errors and verdicts.

use std::fmt;

use aptc_pes::{Configuration, PesError};

use crate::hp::PosetalTriple;

/// What a transition observes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Step,
    Pomset,
    Hp,
    Hhp,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Step, Mode::Pomset, Mode::Hp, Mode::Hhp];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Step => "step",
            Mode::Pomset => "pomset",
            Mode::Hp => "hp",
            Mode::Hhp => "hhp",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Size limits of the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Events per side for step and pomset modes.
    pub step_events: usize,
    /// Events per side for hp and hhp modes.
    pub hp_events: usize,
    pub configurations: usize,
    pub triples: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { step_events: 20, hp_events: 12, configurations: aptc_pes::DEFAULT_CONFIG_BOUND, triples: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("{events} events exceed the bound of {bound} for {mode} checking")]
    TooManyEvents { events: usize, bound: usize, mode: Mode },
    #[error("more than {bound} posetal triples")]
    TripleBound { bound: usize },
    #[error("rooted branching is not defined for mode {0}")]
    UnsupportedMode(Mode),
    #[error(transparent)]
    Pes(#[from] PesError),
}

/// The relation found for a positive verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Related pairs of graph states (left index, right index).
    StatePairs(Vec<(usize, usize)>),
    /// Related pairs of configurations.
    ConfigPairs(Vec<(Configuration, Configuration)>),
    Triples(Vec<PosetalTriple>),
    None,
}

impl Witness {
    pub fn len(&self) -> usize {
        match self {
            Witness::StatePairs(v) => v.len(),
            Witness::ConfigPairs(v) => v.len(),
            Witness::Triples(v) => v.len(),
            Witness::None => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Result of an equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub related: bool,
    /// The relation that was checked, for example `step` or `rbs`.
    pub relation: String,
    pub witness: Witness,
    /// Moves telling the two sides apart, when not related.
    pub sequence: Vec<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.related {
            write!(f, "RELATED {} (witness size {})", self.relation, self.witness.len())
        } else if self.sequence.is_empty() {
            write!(f, "DISTINGUISHED {}", self.relation)
        } else {
            write!(f, "DISTINGUISHED {}: {}", self.relation, self.sequence.join(" ; "))
        }
    }
}
