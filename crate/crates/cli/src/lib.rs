//! Front end of the workbench: command parsing, the choice of event
//! structure semantics, report rendering and exit statuses.

pub mod abp;

use std::collections::BTreeSet;
use std::path::PathBuf;

use aptc_equiv::{
    branching_bisim_pes, branching_step_bisim_lts, step_bisim_lts, strong_bisim_with, Bounds, EquivError, Mode, Verdict,
};
use aptc_lts::{explore, LtsError, DEFAULT_MAX_STATES};
use aptc_pes::{compile_basic, compile_structural, in_structural_fragment, Pes, PesError};
use aptc_recursion::{aip_check, cfar_apply, project_n, AipVerdict, RecursionError};
use aptc_rewrite::{normalize_with, NormalizeOptions, RewriteError};
use aptc_term::{parse_spec, parse_term, Action, Label, Node, ParseError, SpecFile, Term};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use abp::{verify_abp, Variant};

/// Default for `--bound` when the flag is absent.
pub const BOUND_ENV: &str = "APTC_BOUND";

#[derive(Parser, Debug)]
#[command(name = "aptc", version, about = "Truly concurrent process algebra workbench")]
pub struct Cli {
    /// Specification file with declarations, procedures and recursion.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// step, pomset, hp, hhp, rbs, rbp or rbhp.
    #[arg(long, global = true, default_value = "step")]
    pub mode: String,
    /// Resource bound: states for transition systems, events per side
    /// for event structures. Defaults to $APTC_BOUND when set.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Projection depth or approximation bound.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Normal form of a closed term.
    Normalize {
        term: String,
        /// Also apply the silent-step laws.
        #[arg(long)]
        silent_laws: bool,
        /// Print the rule applications.
        #[arg(long)]
        trace: bool,
    },
    /// Event structure of a closed term.
    Pes { term: String },
    /// Step transition system, in Aldebaran format.
    Lts { term: String },
    /// Compares two terms in the chosen mode.
    Equiv { left: String, right: String },
    /// Projection to the given depth.
    Project { term: String },
    /// Compares projections up to the given depth.
    Aip { left: String, right: String },
    /// Cluster fair abstraction for a recursion call.
    Cfar {
        term: String,
        /// Comma-separated hidden actions.
        #[arg(long)]
        hide: String,
    },
    /// Checks the alternating bit protocol against its buffer specification.
    VerifyAbp {
        #[arg(long, value_enum, default_value = "parallel")]
        variant: VariantArg,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Use the receiver that does not recover from a corrupted acknowledgement.
        #[arg(long)]
        fault: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Parallel,
    Traditional,
}

/// What the user asked for, in one of the exit-status classes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Negative(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Bound(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Bound(_) => 3,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        match e {
            RewriteError::BudgetExceeded { .. } => CliError::Bound(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PesError> for CliError {
    fn from(e: PesError) -> Self {
        match e {
            PesError::TooManyEvents | PesError::ConfigurationBound { .. } => CliError::Bound(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EquivError> for CliError {
    fn from(e: EquivError) -> Self {
        match e {
            EquivError::TooManyEvents { .. } | EquivError::TripleBound { .. } => CliError::Bound(e.to_string()),
            EquivError::Pes(p) => p.into(),
            EquivError::UnsupportedMode(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LtsError> for CliError {
    fn from(e: LtsError) -> Self {
        match e {
            LtsError::StateBound { .. } => CliError::Bound(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<RecursionError> for CliError {
    fn from(e: RecursionError) -> Self {
        match e {
            RecursionError::Rewrite(r) => r.into(),
            RecursionError::Pes(p) => p.into(),
            RecursionError::Equiv(q) => q.into(),
            RecursionError::Lts(l) => l.into(),
            RecursionError::NoExits { .. } => CliError::Negative(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// A report and its exit status.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

/// True when the term contains `τ` or hides actions.
fn has_silent(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |u| {
        found |= matches!(u.node(), Node::Atom(Label::Tau) | Node::Abstract(..));
    });
    found
}

fn structural(t: &Term) -> bool {
    in_structural_fragment(t) && !has_silent(t)
}

fn lock_step(t: &Term, spec: &SpecFile) -> Result<Pes, CliError> {
    let opts = NormalizeOptions { trace: false, ..Default::default() };
    let n = normalize_with(t, &spec.signature, &opts)?;
    Ok(compile_basic(&n.basic)?)
}

/// The event structure of a closed term. Terms built from atoms, `+`, `·`
/// and `∥` without silent events get the free-concurrency structure, in
/// which the components of `∥` proceed independently. Every other term is
/// normalized first and its normal form compiled, where the events of a
/// step happen together and silent events in a step are absorbed.
pub fn pes_of(t: &Term, spec: &SpecFile) -> Result<Pes, CliError> {
    if structural(t) {
        return Ok(compile_structural(t, &spec.signature)?);
    }
    lock_step(t, spec)
}

/// Event structures of two terms under one semantics: free concurrency
/// when both terms admit it, the normal-form reading otherwise.
pub fn pes_pair(l: &Term, r: &Term, spec: &SpecFile) -> Result<(Pes, Pes), CliError> {
    if structural(l) && structural(r) {
        return Ok((compile_structural(l, &spec.signature)?, compile_structural(r, &spec.signature)?));
    }
    Ok((lock_step(l, spec)?, lock_step(r, spec)?))
}

/// The comparison behind a `--mode` value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Strong(Mode),
    RootedBranching(Mode),
}

pub fn parse_mode(s: &str) -> Result<Relation, CliError> {
    Ok(match s {
        "step" => Relation::Strong(Mode::Step),
        "pomset" => Relation::Strong(Mode::Pomset),
        "hp" => Relation::Strong(Mode::Hp),
        "hhp" => Relation::Strong(Mode::Hhp),
        "rbs" => Relation::RootedBranching(Mode::Step),
        "rbp" => Relation::RootedBranching(Mode::Pomset),
        "rbhp" => Relation::RootedBranching(Mode::Hp),
        _ => return Err(CliError::Usage(format!("unknown mode {s}"))),
    })
}

/// Compares two terms. Recursion-free terms are compared on their event
/// structures; recursive ones on transition systems, in step modes only.
pub fn equiv_terms(l: &Term, r: &Term, spec: &SpecFile, rel: Relation, bound: Option<usize>) -> Result<Verdict, CliError> {
    let recursive = !l.rec_calls().is_empty() || !r.rec_calls().is_empty();
    if recursive {
        let max = bound.unwrap_or(DEFAULT_MAX_STATES);
        let lts = |t: &Term| explore(t, spec, max);
        return match rel {
            Relation::Strong(Mode::Step) => Ok(step_bisim_lts(&lts(l)?, &lts(r)?)),
            Relation::RootedBranching(Mode::Step) => Ok(branching_step_bisim_lts(&lts(l)?, &lts(r)?, true)),
            _ => Err(CliError::Usage("recursive terms are compared in step and rbs modes only".to_string())),
        };
    }
    let mut b = Bounds::default();
    if let Some(n) = bound {
        b.step_events = n;
        b.hp_events = n;
    }
    let (p, q) = pes_pair(l, r, spec)?;
    Ok(match rel {
        Relation::Strong(m) => strong_bisim_with(&p, &q, m, &b)?,
        Relation::RootedBranching(m) => branching_bisim_pes(&p, &q, m, true, &b)?,
    })
}

fn load_spec(cli: &Cli) -> Result<SpecFile, CliError> {
    match &cli.spec {
        None => Ok(SpecFile::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let spec = parse_spec(&text)?;
            spec.signature
                .validate()
                .map_err(|v| CliError::Usage(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")))?;
            Ok(spec)
        }
    }
}

fn bound(cli: &Cli) -> Result<Option<usize>, CliError> {
    if cli.bound.is_some() {
        return Ok(cli.bound);
    }
    match std::env::var(BOUND_ENV) {
        Ok(v) => v.parse().map(Some).map_err(|_| CliError::Usage(format!("{BOUND_ENV}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

fn verdict_outcome(v: &Verdict, format: Format) -> Outcome {
    let text = match format {
        Format::Text => v.to_string(),
        Format::Structured => json!({
            "verdict": if v.related { "RELATED" } else { "DISTINGUISHED" },
            "relation": v.relation,
            "witness_size": v.witness.len(),
            "sequence": v.sequence,
        })
        .to_string(),
    };
    Outcome { text, status: if v.related { 0 } else { 1 } }
}

fn term_outcome(key: &str, t: &Term, format: Format) -> Outcome {
    let text = match format {
        Format::Text => t.to_string(),
        Format::Structured => json!({ key: t.to_string() }).to_string(),
    };
    Outcome { text, status: 0 }
}

/// Runs one command.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut spec = load_spec(cli)?;
    let bound = bound(cli)?;
    let fmt = cli.format;
    match &cli.verb {
        Verb::Normalize { term, silent_laws, trace } => {
            let t = parse_term(&mut spec, term)?;
            let opts = NormalizeOptions { silent_laws: *silent_laws, trace: *trace, ..Default::default() };
            let n = normalize_with(&t, &spec.signature, &opts)?;
            let steps: Vec<String> =
                n.trace.entries.iter().map(|e| format!("{} at {:?}: {} -> {}", e.rule, e.path, e.before, e.after)).collect();
            let text = match fmt {
                Format::Text if *trace => format!("{}\n{}", steps.join("\n"), n.term),
                Format::Text => n.term.to_string(),
                Format::Structured => json!({ "normal_form": n.term.to_string(), "steps": n.steps, "trace": steps }).to_string(),
            };
            Ok(Outcome { text, status: 0 })
        }
        Verb::Pes { term } => {
            let t = parse_term(&mut spec, term)?;
            let p = pes_of(&t, &spec)?;
            let text = match fmt {
                Format::Text => p.to_string().trim_end().to_string(),
                Format::Structured => json!({ "events": p.len(), "pes": p.to_string() }).to_string(),
            };
            Ok(Outcome { text, status: 0 })
        }
        Verb::Lts { term } => {
            let t = parse_term(&mut spec, term)?;
            let l = explore(&t, &spec, bound.unwrap_or(DEFAULT_MAX_STATES))?;
            let text = match fmt {
                Format::Text => l.to_aldebaran().trim_end().to_string(),
                Format::Structured => json!({
                    "states": l.state_count(),
                    "transitions": l.transition_count(),
                    "aldebaran": l.to_aldebaran(),
                })
                .to_string(),
            };
            Ok(Outcome { text, status: 0 })
        }
        Verb::Equiv { left, right } => {
            let l = parse_term(&mut spec, left)?;
            let r = parse_term(&mut spec, right)?;
            let v = equiv_terms(&l, &r, &spec, parse_mode(&cli.mode)?, bound)?;
            Ok(verdict_outcome(&v, fmt))
        }
        Verb::Project { term } => {
            let t = parse_term(&mut spec, term)?;
            let n = cli.depth.ok_or_else(|| CliError::Usage("project needs --depth".to_string()))?;
            Ok(term_outcome("projection", &project_n(&t, n, &spec)?, fmt))
        }
        Verb::Aip { left, right } => {
            let l = parse_term(&mut spec, left)?;
            let r = parse_term(&mut spec, right)?;
            let n = cli.depth.ok_or_else(|| CliError::Usage("aip needs --depth".to_string()))?;
            let Relation::Strong(m) = parse_mode(&cli.mode)? else {
                return Err(CliError::Usage("aip compares projections in strong modes".to_string()));
            };
            let v = aip_check(&l, &r, n, m, &spec)?;
            let text = match fmt {
                Format::Text => v.to_string(),
                Format::Structured => match v {
                    AipVerdict::EquivalentUpTo(k) => json!({ "verdict": "equivalent-up-to", "depth": k }),
                    AipVerdict::DistinguishedAt(k) => json!({ "verdict": "distinguished-at", "depth": k }),
                }
                .to_string(),
            };
            Ok(Outcome { text, status: if matches!(v, AipVerdict::EquivalentUpTo(_)) { 0 } else { 1 } })
        }
        Verb::Cfar { term, hide } => {
            let t = parse_term(&mut spec, term)?;
            let Node::RecCall(x, e) = t.node() else {
                return Err(CliError::Usage("cfar needs a recursion call such as 'X where X = a.X + b'".to_string()));
            };
            let hidden: BTreeSet<Action> = hide.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Action::new).collect();
            let rs = spec.recspecs.get(&**e).cloned().ok_or_else(|| CliError::Usage(format!("unknown specification {e}")))?;
            let r = cfar_apply(x, &rs, &hidden, &spec)?;
            let c = r.analysis.cluster_of(x).expect("cluster of the variable");
            let cluster: Vec<String> = r.analysis.clusters[c].iter().map(|v| v.to_string()).collect();
            let exits: Vec<String> = r.analysis.exits[c].iter().map(|t| t.to_string()).collect();
            let text = match fmt {
                Format::Text => format!("{}\ncluster: {{{}}}\nexits: {}", r.term, cluster.join(", "), exits.join(" ; ")),
                Format::Structured => json!({ "term": r.term.to_string(), "cluster": cluster, "exits": exits }).to_string(),
            };
            Ok(Outcome { text, status: 0 })
        }
        Verb::VerifyAbp { variant, delta, fault } => {
            if *delta == 0 {
                return Err(CliError::Usage("--delta must be at least 1".to_string()));
            }
            let variant = match variant {
                VariantArg::Parallel => Variant::Parallel,
                VariantArg::Traditional => Variant::Traditional,
            };
            let r = verify_abp(variant, *delta, *fault, bound.unwrap_or(DEFAULT_MAX_STATES))?;
            let verdict = if r.related { "RELATED" } else { "DISTINGUISHED" };
            let text = match fmt {
                Format::Text => {
                    let mut s = format!(
                        "{verdict} rbs\nvariant: {}{}\ndelta: {}\nprotocol: {} states, {} transitions\nspecification: {} states, {} transitions\ntime: {} ms",
                        variant.name(),
                        if r.fault { " (faulty receiver)" } else { "" },
                        r.delta_size,
                        r.states,
                        r.transitions,
                        r.spec_states,
                        r.spec_transitions,
                        r.millis
                    );
                    if !r.sequence.is_empty() {
                        s.push_str(&format!("\nsequence: {}", r.sequence.join(" ; ")));
                    }
                    s
                }
                Format::Structured => json!({
                    "verdict": verdict,
                    "variant": variant.name(),
                    "fault": r.fault,
                    "delta": r.delta_size,
                    "states": r.states,
                    "transitions": r.transitions,
                    "spec_states": r.spec_states,
                    "spec_transitions": r.spec_transitions,
                    "sequence": r.sequence,
                    "millis": r.millis,
                })
                .to_string(),
            };
            Ok(Outcome { text, status: if r.related { 0 } else { 1 } })
        }
    }
}
