//! The alternating bit protocol in its parallel (dual input and output
//! channels) and traditional (shadow-aligned) variants, with the buffer
//! specifications they are checked against.
//!
//! ```text
//!            A1 +--------+  B   +----------+ C2
//!  ---------->  | Sender | ---> | Receiver | ------>
//!       A2      |        | <--- |          |
//!  ---------->  +--------+  D   +----------+
//!                   | C1
//!                   v
//! ```
//!
//! Each round runs the sender and receiver in lock-step under `≬` until a
//! positive acknowledgement ends the round; both components then terminate
//! and the next round starts with the other bit. The sender fixes the datum
//! `d'` it forwards when it reads, and resends it unchanged. Corruption is
//! a nondeterministic `⊥` summand on `B`, and on `D` for the acknowledgement
//! of a corrupted or stale message.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use aptc_equiv::branching_step_bisim_lts;
use aptc_lts::{explore, LtsError};
use aptc_term::{Action, Label, LabelSet, RecSpec, Signature, SpecFile, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Parallel,
    Traditional,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Parallel => "parallel",
            Variant::Traditional => "traditional",
        }
    }
}

/// The outcome of one protocol check.
#[derive(Clone, Debug)]
pub struct AbpReport {
    pub variant: Variant,
    pub delta_size: usize,
    pub fault: bool,
    pub related: bool,
    pub states: usize,
    pub transitions: usize,
    pub spec_states: usize,
    pub spec_transitions: usize,
    pub sequence: Vec<String>,
    pub millis: u128,
}

const BOT: &str = "bot";

fn act(name: &str, args: &[&str]) -> Action {
    Action::with_args(name, args)
}

fn ev(name: &str, args: &[&str]) -> Term {
    Term::action(act(name, args))
}

fn bit(b: u8) -> &'static str {
    if b == 0 {
        "0"
    } else {
        "1"
    }
}

fn data(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("d{i}")).collect()
}

fn sum(ts: Vec<Term>) -> Term {
    Term::alt_all(ts)
}

fn seq(ts: Vec<Term>) -> Term {
    Term::seq_all(ts).expect("nonempty sequence")
}

/// Communications `s_B|r_B = c_B` and `s_D|r_D = c_D`, and the sets `H` of
/// blocked halves and `I` of hidden communications.
fn channels(ds: &[String]) -> (Signature, LabelSet, LabelSet) {
    let mut sig = Signature::new();
    let mut h = BTreeSet::new();
    let mut i = BTreeSet::new();
    let mut pair = |ch: &str, args: &[&str]| {
        let (s, r, c) = (act(&format!("s_{ch}"), args), act(&format!("r_{ch}"), args), act(&format!("c_{ch}"), args));
        sig.add_gamma(Label::Act(s.clone()), Label::Act(r.clone()), Label::Act(c.clone()));
        h.insert(s);
        h.insert(r);
        i.insert(c);
    };
    for b in [0, 1] {
        for d in ds {
            pair("B", &[d, bit(b)]);
        }
        pair("D", &[bit(b)]);
    }
    pair("B", &[BOT]);
    pair("D", &[BOT]);
    (sig, Arc::new(h), Arc::new(i))
}

/// Builds the protocol as `τ_I(∂_H(⟨Sys0|ABP⟩))` in a specification file.
pub fn protocol(variant: Variant, delta_size: usize, fault: bool) -> (Term, SpecFile) {
    let ds = data(delta_size);
    let (sig, h, i) = channels(&ds);
    let mut e = RecSpec::new("ABP");
    let call = |x: String| Term::rec_call(&x, "ABP");
    for b in [0u8, 1] {
        let (nb, b_s, nb_s) = (1 - b, bit(b), bit(1 - b));
        for d in &ds {
            for d2 in &ds {
                let out = match variant {
                    Variant::Parallel => ev("s_C1", &[d2]),
                    Variant::Traditional => Term::shadow(act("s_C", &[d2]), 1),
                };
                // T_{d d' b} = (s_B(d',b)·out + s_B(⊥))·U_{d d' b}
                let t = Term::seq(
                    Term::alt(Term::seq(ev("s_B", &[d2, b_s]), out), ev("s_B", &[BOT])),
                    call(format!("U({d},{d2},{b_s})")),
                );
                e.equations.insert(format!("T({d},{d2},{b_s})").into(), t);
                // U_{d d' b} = r_D(b) + (r_D(1-b) + r_D(⊥))·T_{d d' b}
                let u = Term::alt(
                    ev("r_D", &[b_s]),
                    Term::seq(Term::alt(ev("r_D", &[nb_s]), ev("r_D", &[BOT])), call(format!("T({d},{d2},{b_s})"))),
                );
                e.equations.insert(format!("U({d},{d2},{b_s})").into(), u);
            }
        }
        // R'_b = Σ_{d'} (r_B(d',b)·s_C(d')·Q_b + r_B(d',1-b)·N_{1-b}) + r_B(⊥)·N_{1-b}
        let out_ch = if variant == Variant::Parallel { "s_C2" } else { "s_C" };
        let mut summands: Vec<Term> = Vec::new();
        for d2 in &ds {
            summands.push(seq(vec![ev("r_B", &[d2, b_s]), ev(out_ch, &[d2]), call(format!("Q({b_s})"))]));
            summands.push(Term::seq(ev("r_B", &[d2, nb_s]), call(format!("N({nb_s})"))));
        }
        summands.push(Term::seq(ev("r_B", &[BOT]), call(format!("N({nb_s})"))));
        e.equations.insert(format!("R'({b_s})").into(), sum(summands));
        // Q_b = s_D(b): the positive acknowledgement ends the round.
        e.equations.insert(format!("Q({b_s})").into(), ev("s_D", &[b_s]));
        // N_{1-b} = (s_D(1-b) + s_D(⊥))·R'_b, the negative acknowledgement.
        // The fault fixture drops the receiver's recovery from a corrupted
        // acknowledgement: it ends the round instead of waiting.
        let wait = call(format!("R'({b_s})"));
        let n = if fault {
            Term::alt(Term::seq(ev("s_D", &[nb_s]), wait), ev("s_D", &[BOT]))
        } else {
            Term::seq(Term::alt(ev("s_D", &[nb_s]), ev("s_D", &[BOT])), wait)
        };
        e.equations.insert(format!("N({nb_s})").into(), n);
        let round = match variant {
            Variant::Parallel => sum(
                ds.iter()
                    .flat_map(|d| {
                        let call = &call;
                        ds.iter().map(move |d2| {
                            Term::seq(
                                Term::par(ev("r_A1", &[d]), ev("r_A2", &[d])),
                                Term::full_par(call(format!("T({d},{d2},{b_s})")), call(format!("R'({b_s})"))),
                            )
                        })
                    })
                    .collect(),
            ),
            Variant::Traditional => {
                // S_b = Σ_{d,d'} r_A(d)·T_{d d' b} and R_b = Σ_d ⊛^{r_A(d)}·R'_b
                let s = sum(
                    ds.iter()
                        .flat_map(|d| ds.iter().map(move |d2| (d, d2)))
                        .map(|(d, d2)| Term::seq(ev("r_A", &[d]), call(format!("T({d},{d2},{b_s})"))))
                        .collect(),
                );
                let r = sum(
                    ds.iter().map(|d| Term::seq(Term::shadow(act("r_A", &[d]), 1), call(format!("R'({b_s})")))).collect(),
                );
                Term::full_par(s, r)
            }
        };
        e.equations.insert(format!("Sys({b_s})").into(), Term::seq(round, call(format!("Sys({})", bit(nb)))));
    }
    let mut spec = SpecFile::new(sig);
    spec.add_recspec(e);
    let t = Term::hide(i, Term::encap(h, Term::rec_call("Sys(0)", "ABP")));
    (t, spec)
}

/// The buffer specification `Σ_{d,d'} in(d)·out(d')·Spec`.
pub fn buffer_spec(variant: Variant, delta_size: usize) -> (Term, SpecFile) {
    let ds = data(delta_size);
    let mut summands = Vec::new();
    for d in &ds {
        for d2 in &ds {
            let (i, o) = match variant {
                Variant::Parallel => {
                    (Term::par(ev("r_A1", &[d]), ev("r_A2", &[d])), Term::par(ev("s_C1", &[d2]), ev("s_C2", &[d2])))
                }
                Variant::Traditional => (ev("r_A", &[d]), ev("s_C", &[d2])),
            };
            summands.push(seq(vec![i, o, Term::rec_call("Spec", "Buffer")]));
        }
    }
    let mut spec = SpecFile::default();
    spec.add_recspec(RecSpec::new("Buffer").with_equation("Spec", sum(summands)));
    (Term::rec_call("Spec", "Buffer"), spec)
}

/// Explores the protocol and its specification and compares them by
/// rooted branching step bisimulation.
pub fn verify_abp(variant: Variant, delta_size: usize, fault: bool, max_states: usize) -> Result<AbpReport, LtsError> {
    let start = Instant::now();
    let (t, spec) = protocol(variant, delta_size, fault);
    let lts = explore(&t, &spec, max_states)?;
    let (bt, bspec) = buffer_spec(variant, delta_size);
    let blts = explore(&bt, &bspec, max_states)?;
    let v = branching_step_bisim_lts(&lts, &blts, true);
    Ok(AbpReport {
        variant,
        delta_size,
        fault,
        related: v.related,
        states: lts.state_count(),
        transitions: lts.transition_count(),
        spec_states: blts.state_count(),
        spec_transitions: blts.transition_count(),
        sequence: v.sequence,
        millis: start.elapsed().as_millis(),
    })
}
