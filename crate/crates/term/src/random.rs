//! Seeded random generation of closed terms and signatures for property
//! suites and corpus-based checks.

use std::collections::BTreeMap;

use rand::Rng;

use crate::label::Label;
use crate::signature::Signature;
use crate::term::Term;

/// Which operators the generator may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpMix {
    /// Atoms, `τ`, `+`, `·`, `∥`.
    Basic,
    /// Every operator except recursion.
    Full,
}

/// Corpus generation parameters.
#[derive(Clone, Copy, Debug)]
pub struct CorpusConfig {
    pub max_depth: usize,
    pub atoms: usize,
    pub tau: bool,
    pub mix: OpMix,
    /// Also generate shadow constants of the configured atoms.
    pub shadows: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { max_depth: 4, atoms: 3, tau: true, mix: OpMix::Full, shadows: false }
    }
}

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Atom names used by a configuration.
pub fn atom_names(cfg: &CorpusConfig) -> Vec<&'static str> {
    NAMES[..cfg.atoms.clamp(1, NAMES.len())].to_vec()
}

/// A random signature over the configured atoms: a random symmetric γ with
/// results among the atoms, a random conflict relation, and one renaming `f`.
pub fn random_signature<R: Rng>(rng: &mut R, cfg: &CorpusConfig) -> Signature {
    let names = atom_names(cfg);
    let mut sig = Signature::new();
    for (i, x) in names.iter().enumerate() {
        for y in &names[i..] {
            if rng.gen_bool(0.35) {
                let r = names[rng.gen_range(0..names.len())];
                sig.add_gamma(Label::act(x), Label::act(y), Label::act(r));
            }
            if x != y && rng.gen_bool(0.3) {
                sig.add_conflict(Label::act(x), Label::act(y));
            }
        }
    }
    let mut f = BTreeMap::new();
    let from = names[rng.gen_range(0..names.len())];
    let to = names[rng.gen_range(0..names.len())];
    f.insert(Label::act(from), Label::act(to));
    sig.add_renaming("f", f);
    sig
}

/// A random closed term of depth at most `cfg.max_depth`.
pub fn random_term<R: Rng>(rng: &mut R, cfg: &CorpusConfig) -> Term {
    gen(rng, cfg, cfg.max_depth)
}

fn leaf<R: Rng>(rng: &mut R, cfg: &CorpusConfig) -> Term {
    let names = atom_names(cfg);
    if cfg.tau && rng.gen_bool(0.12) {
        return Term::tau();
    }
    if cfg.mix == OpMix::Full && rng.gen_bool(0.04) {
        return Term::delta();
    }
    if cfg.shadows && rng.gen_bool(0.1) {
        let of = names[rng.gen_range(0..names.len())];
        return Term::shadow(crate::label::Action::new(of), 1);
    }
    Term::act(names[rng.gen_range(0..names.len())])
}

fn label_set<R: Rng>(rng: &mut R, cfg: &CorpusConfig) -> crate::term::LabelSet {
    let names = atom_names(cfg);
    let set = names
        .iter()
        .filter(|_| rng.gen_bool(0.4))
        .map(|n| crate::label::Action::new(n))
        .collect();
    std::sync::Arc::new(set)
}

fn gen<R: Rng>(rng: &mut R, cfg: &CorpusConfig, depth: usize) -> Term {
    if depth <= 1 || rng.gen_bool(0.25) {
        return leaf(rng, cfg);
    }
    let d = depth - 1;
    let choices = match cfg.mix {
        OpMix::Basic => 3,
        OpMix::Full => 11,
    };
    match rng.gen_range(0..choices) {
        0 => Term::seq(gen(rng, cfg, d), gen(rng, cfg, d)),
        1 => Term::alt(gen(rng, cfg, d), gen(rng, cfg, d)),
        2 => Term::par(gen(rng, cfg, d), gen(rng, cfg, d)),
        3 => Term::comm(gen(rng, cfg, d), gen(rng, cfg, d)),
        4 => Term::full_par(gen(rng, cfg, d), gen(rng, cfg, d)),
        5 => Term::encap(label_set(rng, cfg), gen(rng, cfg, d)),
        6 => Term::hide(label_set(rng, cfg), gen(rng, cfg, d)),
        7 => Term::project(rng.gen_range(0..4), gen(rng, cfg, d)),
        8 => Term::rename("f", gen(rng, cfg, d)),
        9 => Term::theta(gen(rng, cfg, d)),
        _ => Term::unless(gen(rng, cfg, d), gen(rng, cfg, d)),
    }
}
