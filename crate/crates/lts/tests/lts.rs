use std::collections::BTreeSet;

use aptc_lts::*;
use aptc_rewrite::normalize;
use aptc_term::random::{random_signature, random_term, CorpusConfig, OpMix};
use aptc_term::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(src: &str) -> SpecFile {
    parse_spec(src).unwrap()
}

fn term(spec: &mut SpecFile, src: &str) -> Term {
    parse_term(spec, src).unwrap()
}

fn labels(names: &[&str]) -> Vec<Label> {
    let mut v: Vec<Label> = names.iter().map(|n| if *n == "tau" { Label::Tau } else { Label::act(n) }).collect();
    v.sort();
    v
}

fn steps_of(src: &str, decls: &str) -> Steps {
    let mut s = spec(decls);
    let t = term(&mut s, src);
    sos_steps(&t, &s).unwrap()
}

#[test]
fn parallel_offers_every_sub_step() {
    let st = steps_of("a || b", "");
    let expected = vec![
        (labels(&["a"]), Some(Term::act("b"))),
        (labels(&["a", "b"]), None),
        (labels(&["b"]), Some(Term::act("a"))),
    ];
    assert_eq!(st.steps, expected);
}

#[test]
fn communication_fires_gamma() {
    let st = steps_of("a | b", "comm gamma(a, b) = g;");
    assert_eq!(st.steps, vec![(labels(&["g"]), None)]);
    let none = steps_of("a | c", "comm gamma(a, b) = g;");
    assert!(none.steps.is_empty());
}

#[test]
fn encapsulation_blocks() {
    let st = steps_of("encap{a}(a + b)", "");
    assert_eq!(st.steps, vec![(labels(&["b"]), None)]);
}

#[test]
fn abstraction_renames_to_tau() {
    let mut s = SpecFile::default();
    let t = term(&mut s, "hide{a}(a . b)");
    let st = sos_steps(&t, &s).unwrap();
    let residue = canon(&term(&mut s, "hide{a}(b)"));
    assert_eq!(st.steps, vec![(vec![Label::Tau], Some(residue))]);
}

#[test]
fn recursion_unfolds() {
    let mut s = SpecFile::default();
    let x = term(&mut s, "X where X = a . X");
    let st = sos_steps(&x, &s).unwrap();
    assert_eq!(st.steps, vec![(labels(&["a"]), Some(x.clone()))]);
    let lts = explore(&x, &s, 10).unwrap();
    assert_eq!(lts.state_count(), 1);
    assert_eq!(lts.transitions, vec![Transition { source: 0, step: labels(&["a"]), target: Target::State(0) }]);
}

#[test]
fn sequence_has_two_states_and_termination() {
    let mut s = SpecFile::default();
    let t = term(&mut s, "a . b");
    let lts = explore(&t, &s, 10).unwrap();
    assert_eq!(lts.state_count(), 2);
    assert_eq!(lts.terminating(), BTreeSet::from([1]));
    let expected = "des (0, 3, 4)\n(0, \"a\", 1)\n(1, \"b\", 2)\n(2, \"tick\", 3)\n";
    assert_eq!(lts.to_aldebaran(), expected);
}

#[test]
fn parallel_lts_shape() {
    let mut s = SpecFile::default();
    let t = term(&mut s, "a || b");
    let lts = explore(&t, &s, 10).unwrap();
    assert_eq!(lts.state_count(), 3);
    assert_eq!(lts.outgoing(0).count(), 3);
    assert!(lts.to_aldebaran().contains("(0, \"a|b\", 3)"));
    let g = lts.to_graph();
    assert_eq!(g.len(), 4);
    assert!(g.terminal[3]);
}

#[test]
fn silent_steps_are_singletons() {
    let st = steps_of("(tau || a) . b + tau || shadow[c,1]", "");
    assert!(st.steps.iter().all(|(s, _)| !s.contains(&Label::Tau) || s.len() == 1));
    assert!(st.steps.iter().any(|(s, _)| *s == labels(&["a"])));
    assert!(st.steps.iter().any(|(s, _)| *s == vec![Label::Tau]));
}

#[test]
fn lone_shadow_terminates_silently() {
    let st = steps_of("shadow[a,1]", "");
    assert!(st.steps.is_empty());
    assert!(st.silent_termination);
}

#[test]
fn unguarded_recursion_is_reported() {
    let mut s = SpecFile::default();
    let x = term(&mut s, "X where X = X . a");
    assert!(matches!(explore(&x, &s, 10), Err(LtsError::Unguarded { .. })));
}

#[test]
fn infinite_state_space_hits_the_bound() {
    let mut s = SpecFile::default();
    let x = term(&mut s, "X where X = a . (X || X)");
    assert_eq!(explore(&x, &s, 50).unwrap_err(), LtsError::StateBound { max: 50 });
}

#[test]
fn unknown_renaming_is_reported() {
    let s = SpecFile::default();
    let t = Term::rename("g", Term::act("a"));
    assert_eq!(sos_steps(&t, &s).unwrap_err(), LtsError::UnknownRenaming("g".into()));
}

#[test]
fn theta_rejects_recursion() {
    let mut s = SpecFile::default();
    let x = term(&mut s, "theta(X) where X = a . X");
    assert!(matches!(sos_steps(&x, &s), Err(LtsError::RecursionInTheta(_))));
}

#[test]
fn guard_report_examples() {
    let s = spec("rec E { X = a . X + b; } rec F { X = tau . X; } rec G { X = X . a; } rec H { X = tau . Y + a; Y = tau . X; }");
    let sig = &s.signature;
    let r = check_guarded_linear(&s.recspecs["E"], sig);
    assert!(r.linear && r.guarded);
    let r = check_guarded_linear(&s.recspecs["F"], sig);
    assert!(r.linear && !r.guarded);
    assert_eq!(r.offending.as_deref(), Some("X"));
    let r = check_guarded_linear(&s.recspecs["G"], sig);
    assert!(!r.linear && !r.guarded);
    let r = check_guarded_linear(&s.recspecs["H"], sig);
    assert!(r.linear && !r.guarded);
}

#[test]
fn hiding_makes_guard_silent() {
    let s = spec("rec E { X = hide{a}(a . X); }");
    assert!(!check_guarded_linear(&s.recspecs["E"], &s.signature).guarded);
}

#[test]
fn shadow_merge_matches_rewriter() {
    let mut s = spec("comm gamma(r, w) = c;");
    for src in ["(a . r) <> (shadow[a,1] . w)", "(a . r) <> w", "a <> b"] {
        let t = term(&mut s, src);
        let (nf, _) = normalize(&t, &s.signature).unwrap();
        assert_eq!(sos_basic(&t, &s).unwrap(), nf, "{src}");
    }
}

/// Single-event transitions of a `∥`-free term, read off the rules for
/// atoms, `+` and `·` directly.
fn single_event(t: &Term) -> BTreeSet<(Label, Option<Term>)> {
    match t.node() {
        Node::Atom(Label::Delta) => BTreeSet::new(),
        Node::Atom(l) => BTreeSet::from([(l.clone(), None)]),
        Node::Alt(x, y) => single_event(x).union(&single_event(y)).cloned().collect(),
        Node::Seq(x, y) => single_event(x)
            .into_iter()
            .map(|(l, r)| (l, Some(r.map_or_else(|| y.clone(), |r| Term::seq(r, y.clone())))))
            .collect(),
        _ => unreachable!("fragment"),
    }
}

fn corpus(seed: u64, cfg: &CorpusConfig) -> (Signature, Term) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = random_signature(&mut rng, cfg);
    (sig, random_term(&mut rng, cfg))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn layers_agree_with_normal_forms(seed in any::<u64>(), shadows in any::<bool>()) {
        let cfg = CorpusConfig { shadows, max_depth: 5, ..Default::default() };
        let (sig, t) = corpus(seed, &cfg);
        let s = SpecFile::new(sig.clone());
        let (nf, _) = normalize(&t, &sig).unwrap();
        prop_assert_eq!(sos_basic(&t, &s).unwrap(), nf);
    }

    #[test]
    fn singleton_steps_follow_single_event_rules(seed in any::<u64>()) {
        let cfg = CorpusConfig { mix: OpMix::Basic, tau: false, ..Default::default() };
        let (_, t) = corpus(seed, &cfg);
        prop_assume!(t.par_operands().len() == 1 && !format!("{t}").contains("||"));
        let s = SpecFile::default();
        let ours: BTreeSet<(Label, Option<Term>)> = sos_steps(&t, &s)
            .unwrap()
            .steps
            .into_iter()
            .filter(|(st, _)| st.len() == 1)
            .map(|(st, r)| (st[0].clone(), r))
            .collect();
        let oracle: BTreeSet<(Label, Option<Term>)> =
            single_event(&t).into_iter().map(|(l, r)| (l, r.map(|r| canon(&r)))).collect();
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn exploration_is_canonical_and_respects_operators(seed in any::<u64>()) {
        let (sig, t) = corpus(seed, &CorpusConfig::default());
        let s = SpecFile::new(sig);
        let lts = explore(&t, &s, 10_000).unwrap();
        let again = explore(&t, &s, 10_000).unwrap();
        prop_assert_eq!(&lts.states, &again.states);
        prop_assert_eq!(&lts.transitions, &again.transitions);
        let distinct: BTreeSet<Term> = lts.states.iter().map(Term::canonical).collect();
        prop_assert_eq!(distinct.len(), lts.state_count());
        for tr in &lts.transitions {
            prop_assert!(!tr.step.is_empty());
            prop_assert!(!tr.step.contains(&Label::Tau) || tr.step.len() == 1);
            prop_assert!(tr.step.iter().all(|l| !l.is_shadow() && *l != Label::Delta));
        }
        let h = label_set(&["a", "b"]);
        let enc = explore(&Term::encap(h.clone(), t.clone()), &s, 10_000).unwrap();
        prop_assert!(enc.labels().iter().all(|l| !l.as_action().is_some_and(|a| h.contains(a))));
        let hid = explore(&Term::hide(h.clone(), t.clone()), &s, 10_000).unwrap();
        prop_assert!(hid.labels().iter().all(|l| !l.as_action().is_some_and(|a| h.contains(a))));
    }
}
