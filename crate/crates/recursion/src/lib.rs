//! Recursion tools: projection, bounded approximation induction, one-step
//! unfolding, checking candidate solutions, and the cluster fair
//! abstraction rule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use aptc_equiv::{branching_step_bisim_lts, step_bisim_lts, strong_bisim, EquivError, Mode};
use aptc_lts::{check_guarded_linear, explore, LtsError, DEFAULT_MAX_STATES};
use aptc_pes::{compile_basic, PesError};
use aptc_rewrite::{normalize, step_of, RewriteError};
use aptc_term::{Action, Label, LabelSet, Node, RecSpec, SpecFile, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RecursionError {
    #[error("variable {var} is not defined in {spec}")]
    Undefined { var: String, spec: String },
    #[error("recursive specification {spec} is not guarded at {var}")]
    Unguarded { var: String, spec: String },
    #[error("recursive specification {spec} is not linear at {var}")]
    NotLinear { var: String, spec: String },
    #[error("no exits from the cluster of {var}")]
    NoExits { var: String },
    #[error("mode {0} needs recursion-free terms")]
    NeedsRecursionFree(Mode),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Pes(#[from] PesError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

type Result<T> = std::result::Result<T, RecursionError>;

fn recspec<'a>(spec: &'a SpecFile, e: &str, x: &str) -> Result<&'a RecSpec> {
    spec.recspecs
        .get(e)
        .filter(|s| s.equations.contains_key(x))
        .ok_or_else(|| RecursionError::Undefined { var: x.to_string(), spec: e.to_string() })
}

/// Every recursive specification reachable from `t` must be guarded.
fn check_guarded(t: &Term, spec: &SpecFile) -> Result<()> {
    spec.check_closed(t).map_err(|u| RecursionError::Undefined { var: u.var, spec: u.spec })?;
    let mut names: BTreeSet<Arc<str>> = BTreeSet::new();
    let mut todo: Vec<(Arc<str>, Arc<str>)> = t.rec_calls().into_iter().collect();
    while let Some((x, e)) = todo.pop() {
        if names.insert(e.clone()) {
            let rs = recspec(spec, &e, &x)?;
            let report = check_guarded_linear(rs, &spec.signature);
            if !report.guarded {
                return Err(RecursionError::Unguarded { var: report.offending.unwrap_or_default(), spec: e.to_string() });
            }
            todo.extend(rs.equations.values().flat_map(|b| b.rec_calls()));
        }
    }
    Ok(())
}

/// Replaces calls by their bodies `depth` times; remaining calls become `δ`.
fn unfold(t: &Term, spec: &SpecFile, depth: u32) -> Term {
    t.substitute_calls(&|x, e| {
        let body = spec.body(x, e).ok()?;
        Some(if depth == 0 { Term::delta() } else { unfold(body, spec, depth - 1) })
    })
}

/// `π_n(t)` in normal form. Guarded calls are unfolded `n + 1` times, which
/// places every residual call below `n` steps, so cutting it off to `δ`
/// does not change the projection.
pub fn project_n(t: &Term, n: u32, spec: &SpecFile) -> Result<Term> {
    check_guarded(t, spec)?;
    let closed = unfold(t, spec, n + 1);
    let (b, _) = normalize(&Term::project(n, closed), &spec.signature)?;
    Ok(b.to_term())
}

/// Outcome of a bounded approximation induction check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AipVerdict {
    /// All projections up to the bound agree; nothing is claimed beyond it.
    EquivalentUpTo(u32),
    DistinguishedAt(u32),
}

impl fmt::Display for AipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AipVerdict::EquivalentUpTo(n) => write!(f, "equivalent-up-to-{n} (projections beyond {n} not checked)"),
            AipVerdict::DistinguishedAt(n) => write!(f, "distinguished-at-{n}"),
        }
    }
}

/// Compares `π_n(t1)` and `π_n(t2)` for `n = 0..=n_max` in `mode`.
pub fn aip_check(t1: &Term, t2: &Term, n_max: u32, mode: Mode, spec: &SpecFile) -> Result<AipVerdict> {
    for n in 0..=n_max {
        if !projections_related(t1, t2, n, mode, spec)? {
            return Ok(AipVerdict::DistinguishedAt(n));
        }
    }
    Ok(AipVerdict::EquivalentUpTo(n_max))
}

fn projections_related(t1: &Term, t2: &Term, n: u32, mode: Mode, spec: &SpecFile) -> Result<bool> {
    let compile = |t: &Term| -> Result<aptc_pes::Pes> {
        let (b, _) = normalize(&project_n(t, n, spec)?, &spec.signature)?;
        Ok(compile_basic(&b)?)
    };
    Ok(strong_bisim(&compile(t1)?, &compile(t2)?, mode)?.related)
}

/// One unfolding of `x`: its right-hand side, whose calls already refer to `e`.
pub fn rdp_unfold(x: &str, e: &RecSpec) -> Result<Term> {
    e.equations.get(x).cloned().ok_or_else(|| RecursionError::Undefined { var: x.to_string(), spec: e.name.to_string() })
}

/// How candidate solutions are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionCheck {
    /// Strong equivalence in a mode. Only step mode accepts recursive
    /// candidates, through the transition system.
    Strong(Mode),
    /// Branching step bisimulation of transition systems.
    Branching { rooted: bool },
}

/// True iff substituting `candidate` into every equation of `e` yields a
/// term equivalent to the candidate of its left-hand side.
pub fn rsp_check(candidate: &BTreeMap<String, Term>, e: &RecSpec, spec: &SpecFile, how: SolutionCheck) -> Result<bool> {
    for (x, rhs) in &e.equations {
        let lhs = candidate
            .get(&**x)
            .ok_or_else(|| RecursionError::Undefined { var: x.to_string(), spec: "candidate".to_string() })?;
        let rhs = rhs.substitute_calls(&|y, f| if f == &*e.name { candidate.get(y).cloned() } else { None });
        if !equivalent(lhs, &rhs, spec, how)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn equivalent(l: &Term, r: &Term, spec: &SpecFile, how: SolutionCheck) -> Result<bool> {
    let recursive = !l.rec_calls().is_empty() || !r.rec_calls().is_empty();
    match how {
        SolutionCheck::Strong(Mode::Step) | SolutionCheck::Branching { .. } => {
            let a = explore(l, spec, DEFAULT_MAX_STATES)?;
            let b = explore(r, spec, DEFAULT_MAX_STATES)?;
            Ok(match how {
                SolutionCheck::Branching { rooted } => branching_step_bisim_lts(&a, &b, rooted).related,
                _ => step_bisim_lts(&a, &b).related,
            })
        }
        SolutionCheck::Strong(m) if recursive => Err(RecursionError::NeedsRecursionFree(m)),
        SolutionCheck::Strong(m) => {
            let (a, _) = normalize(l, &spec.signature)?;
            let (b, _) = normalize(r, &spec.signature)?;
            Ok(strong_bisim(&compile_basic(&a)?, &compile_basic(&b)?, m)?.related)
        }
    }
}

/// Clusters of a linear specification for a hidden set, with their exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAnalysis {
    pub hidden: BTreeSet<Action>,
    /// Variables mutually reachable through summands whose steps are
    /// silent after hiding.
    pub clusters: Vec<BTreeSet<Arc<str>>>,
    /// Per cluster, its exit summands in canonical order.
    pub exits: Vec<Vec<Term>>,
}

impl ClusterAnalysis {
    pub fn of(e: &RecSpec, hidden: &BTreeSet<Action>) -> ClusterAnalysis {
        let silent = |s: &Term| {
            step_of(s).is_some_and(|st| {
                st.iter().all(|l| match l {
                    Label::Tau => true,
                    Label::Act(a) => hidden.contains(a),
                    _ => false,
                })
            })
        };
        let mut edges: BTreeMap<Arc<str>, BTreeSet<Arc<str>>> = BTreeMap::new();
        for (x, rhs) in &e.equations {
            let out = edges.entry(x.clone()).or_default();
            for s in rhs.alt_operands() {
                if let Node::Seq(h, tail) = s.node() {
                    if let Node::RecCall(y, f) = tail.node() {
                        if f == &e.name && silent(h) {
                            out.insert(y.clone());
                        }
                    }
                }
            }
        }
        let reach = |x: &Arc<str>| {
            let mut seen = BTreeSet::from([x.clone()]);
            let mut todo = vec![x.clone()];
            while let Some(u) = todo.pop() {
                for v in edges.get(&u).into_iter().flatten() {
                    if seen.insert(v.clone()) {
                        todo.push(v.clone());
                    }
                }
            }
            seen
        };
        let reachable: BTreeMap<Arc<str>, BTreeSet<Arc<str>>> = e.equations.keys().map(|x| (x.clone(), reach(x))).collect();
        let mut clusters: Vec<BTreeSet<Arc<str>>> = Vec::new();
        for x in e.equations.keys() {
            if clusters.iter().any(|c| c.contains(x)) {
                continue;
            }
            clusters.push(reachable[x].iter().filter(|y| reachable[*y].contains(x)).cloned().collect());
        }
        let exits = clusters
            .iter()
            .map(|c| {
                let mut out: Vec<Term> = Vec::new();
                for x in c {
                    for s in e.equations[x].alt_operands() {
                        let internal = match s.node() {
                            Node::Seq(h, tail) => {
                                matches!(tail.node(), Node::RecCall(y, f) if f == &e.name && c.contains(y)) && silent(h)
                            }
                            _ => s.is_delta(),
                        };
                        if !internal {
                            out.push(s.canonical());
                        }
                    }
                }
                out.sort_by_key(|t| t.to_string());
                out.dedup();
                out
            })
            .collect();
        ClusterAnalysis { hidden: hidden.clone(), clusters, exits }
    }

    pub fn cluster_of(&self, x: &str) -> Option<usize> {
        self.clusters.iter().position(|c| c.iter().any(|y| &**y == x))
    }
}

/// The right-hand side of the cluster fair abstraction rule for `x`, with
/// the analysis it was read from.
#[derive(Clone, Debug)]
pub struct CfarResult {
    pub term: Term,
    pub analysis: ClusterAnalysis,
}

/// `τ·τ_I(Σ exits)` for the cluster of `x`, the exits listed in canonical
/// order and their calls left as calls of `e`.
pub fn cfar_apply(x: &str, e: &RecSpec, hidden: &BTreeSet<Action>, spec: &SpecFile) -> Result<CfarResult> {
    let report = check_guarded_linear(e, &spec.signature);
    if !report.linear {
        return Err(RecursionError::NotLinear { var: report.offending.unwrap_or_default(), spec: e.name.to_string() });
    }
    if !report.guarded {
        return Err(RecursionError::Unguarded { var: report.offending.unwrap_or_default(), spec: e.name.to_string() });
    }
    rdp_unfold(x, e)?;
    let analysis = ClusterAnalysis::of(e, hidden);
    let c = analysis.cluster_of(x).expect("every variable has a cluster");
    let exits = &analysis.exits[c];
    if exits.is_empty() {
        return Err(RecursionError::NoExits { var: x.to_string() });
    }
    let i: LabelSet = Arc::new(hidden.clone());
    let term = Term::seq(Term::tau(), Term::hide(i, Term::alt_all(exits.iter().cloned())));
    Ok(CfarResult { term, analysis })
}
