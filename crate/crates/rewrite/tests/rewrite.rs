use aptc_rewrite::*;
use aptc_term::random::{random_signature, random_term, CorpusConfig, OpMix};
use aptc_term::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(src: &str) -> SpecFile {
    parse_spec(src).unwrap()
}

fn term(sf: &mut SpecFile, s: &str) -> Term {
    parse_term(sf, s).unwrap()
}

fn nf(sf: &mut SpecFile, s: &str) -> Term {
    let t = term(sf, s);
    normalize(&t, &sf.signature).unwrap().0.to_term()
}

fn nf_silent(sf: &mut SpecFile, s: &str) -> Term {
    let t = term(sf, s);
    let opts = NormalizeOptions { silent_laws: true, ..Default::default() };
    normalize_with(&t, &sf.signature, &opts).unwrap().term
}

#[test]
fn right_distribution_of_sequence() {
    let mut sf = SpecFile::default();
    assert_eq!(canonical_print(&nf(&mut sf, "(a + b) . c")), "a . c + b . c");
    // No left distribution: a·(b+c) is already basic.
    assert_eq!(canonical_print(&nf(&mut sf, "a . (b + c)")), "a . (b + c)");
}

#[test]
fn parallel_steps_in_lock_step() {
    let mut sf = SpecFile::default();
    assert_eq!(canonical_print(&nf(&mut sf, "(a . b) || (c . d)")), "(a || c) . (b || d)");
    assert_eq!(canonical_print(&nf(&mut sf, "a || (c . d)")), "(a || c) . d");
    assert_eq!(canonical_print(&nf(&mut sf, "(a + b) || c")), "a || c + b || c");
    assert_eq!(canonical_print(&nf(&mut sf, "delta || c")), "delta");
}

#[test]
fn merge_with_communication() {
    let mut sf = spec("comm gamma(a, b) = g;");
    assert_eq!(canonical_print(&nf(&mut sf, "a <> b")), "g + a || b");
    assert_eq!(canonical_print(&nf(&mut sf, "a | c")), "delta");
}

#[test]
fn shadow_alignment_example() {
    let mut sf = spec("comm gamma(r, w) = c;");
    let raw = nf(&mut sf, "(a . r) <> (shadow[a,1] . w)");
    assert_eq!(canonical_print(&raw), "a . (c + r || w)");
    let enc = nf(&mut sf, "encap{r, w}((a . r) <> (shadow[a,1] . w))");
    assert_eq!(canonical_print(&enc), "a . c");
}

#[test]
fn misaligned_merge_deadlocks_under_encapsulation() {
    let mut sf = spec("comm gamma(r, w) = c;");
    assert_eq!(canonical_print(&nf(&mut sf, "(a . r) <> w")), "(a || w) . r");
    assert_eq!(canonical_print(&nf(&mut sf, "encap{r, w}((a . r) <> w)")), "delta");
}

#[test]
fn conflict_elimination_example() {
    let mut sf = spec("conflict b # e;");
    let got = nf_silent(&mut sf, "theta((a . b . c) || (d . e . f))");
    let want = nf_silent(&mut sf, "a || (d . e . f) + d || (a . b . c)");
    assert!(eq_ac(&got, &want), "{got} vs {want}");
    assert_eq!(canonical_print(&got), "(a || d) . b . c + (a || d) . e . f");
}

#[test]
fn theta_trace_uses_conflict_rules() {
    let mut sf = spec("conflict b # e;");
    let t = term(&mut sf, "theta(a . b + e)");
    let n = normalize_with(&t, &sf.signature, &NormalizeOptions::default()).unwrap();
    let rules: Vec<&str> = n.trace.entries.iter().map(|e| e.rule).collect();
    assert!(rules.contains(&"RCE21") && rules.contains(&"RCE22") && rules.contains(&"RU25"), "{rules:?}");
    // Both summands meet the conflicting event: e◁(a·b) = (e◁a)◁b = τ.
    assert_eq!(canonical_print(&n.term), "tau + a . tau");
    assert!(eq_ac(&replay(&t, &n.trace).unwrap(), &n.term));
}

#[test]
fn encapsulation_abstraction_projection_renaming() {
    let mut sf = spec("rename f { a -> b };");
    assert_eq!(canonical_print(&nf(&mut sf, "encap{a}(a . b + b)")), "b");
    assert_eq!(canonical_print(&nf(&mut sf, "hide{a}(a . b)")), "tau . b");
    assert_eq!(canonical_print(&nf(&mut sf, "proj[2](a . b . c)")), "a . b . delta");
    assert_eq!(canonical_print(&nf(&mut sf, "proj[0](a)")), "delta");
    assert_eq!(canonical_print(&nf(&mut sf, "rho[f](a . c)")), "b . c");
    let t = Term::rename("g", Term::act("a"));
    assert_eq!(normalize(&t, &sf.signature).unwrap_err(), RewriteError::UnknownRenaming("g".into()));
}

#[test]
fn silent_laws_are_optional() {
    let mut sf = SpecFile::default();
    assert_eq!(canonical_print(&nf(&mut sf, "a . tau")), "a . tau");
    assert_eq!(canonical_print(&nf_silent(&mut sf, "a . tau")), "a");
    assert_eq!(canonical_print(&nf_silent(&mut sf, "a || tau")), "a");
    assert_eq!(canonical_print(&nf_silent(&mut sf, "a . (tau . (b + c) + b)")), "a . (b + c)");
}

#[test]
fn open_terms_are_rejected() {
    let mut sf = SpecFile::default();
    let t = term(&mut sf, "X where X = a . X");
    assert!(matches!(normalize(&t, &sf.signature), Err(RewriteError::OpenTerm { .. })));
}

#[test]
fn budget_is_enforced() {
    let mut sf = SpecFile::default();
    let t = term(&mut sf, "(a + b) . (c + d) || (e + f) . g");
    let opts = NormalizeOptions { budget: 3, ..Default::default() };
    assert_eq!(normalize_with(&t, &sf.signature, &opts).unwrap_err(), RewriteError::BudgetExceeded { budget: 3 });
}

#[test]
fn trace_line_format() {
    let mut sf = SpecFile::default();
    let t = term(&mut sf, "(a + b) . c");
    let (_, tr) = normalize(&t, &sf.signature).unwrap();
    assert_eq!(tr.entries[0].to_string(), "RA4 @ ε : (a + b) . c ==> a . c + b . c");
    let t = term(&mut sf, "d . ((a + b) . c)");
    let (_, tr) = normalize(&t, &sf.signature).unwrap();
    assert_eq!(tr.entries[0].to_string(), "RA4 @ 2 : (a + b) . c ==> a . c + b . c");
}

#[test]
fn is_basic_examples() {
    let sig = Signature::new();
    let _ = sig;
    assert!(is_basic(&parse_closed("a . (b || c) + d").unwrap()));
    assert!(!is_basic(&parse_closed("encap{a}(a)").unwrap()));
    assert!(!is_basic(&parse_closed("(a + b) . c").unwrap()));
    assert!(!is_basic(&parse_closed("a + delta").unwrap()));
    assert!(is_basic(&parse_closed("a . delta").unwrap()));
    assert!(is_basic(&parse_closed("delta").unwrap()));
}

#[test]
fn eq_ac_examples() {
    let p = |s: &str| parse_closed(s).unwrap();
    assert!(eq_ac(&p("a + (b + c)"), &p("(c + a) + b")));
    assert!(eq_ac(&p("a || b || c"), &p("(c || b) || a")));
    assert!(!eq_ac(&p("a . b"), &p("b . a")));
    assert!(!eq_ac(&p("a + a"), &p("a")));
}

#[test]
fn lpo_examples() {
    assert!(lpo_check(&Pat::parse("seq(seq(x,y),z)"), &Pat::parse("seq(x,seq(y,z))")));
    assert!(lpo_check(&Pat::parse("alt(x,x)"), &Pat::parse("x")));
    assert!(!lpo_check(&Pat::parse("x"), &Pat::parse("alt(x,x)")));
}

#[test]
fn every_applied_rule_is_oriented() {
    let results = check_all_rules();
    let failed: Vec<&str> = results.iter().filter(|r| !r.oriented).map(|r| r.rule.name).collect();
    assert!(failed.is_empty(), "not oriented: {failed:?}");
}

#[test]
fn merge_rules_need_composition() {
    for (name, l, r) in lpo::RAW_MERGE_RULES {
        assert!(!lpo_check(&Pat::parse(l), &Pat::parse(r)), "{name} unexpectedly oriented");
    }
}

#[test]
fn every_rule_name_in_traces_is_known() {
    let names: std::collections::BTreeSet<&str> = lpo::rule_table().iter().map(|r| r.name).collect();
    for (sig, t) in corpus(150, 7) {
        for opts in [NormalizeOptions::default(), NormalizeOptions { silent_laws: true, ..Default::default() }] {
            let n = normalize_with(&t, &sig, &opts).unwrap();
            for e in &n.trace.entries {
                assert!(names.contains(e.rule), "unknown rule {}", e.rule);
            }
        }
    }
}

fn corpus(n: usize, seed: u64) -> Vec<(Signature, Term)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CorpusConfig { mix: OpMix::Full, ..Default::default() };
    (0..n)
        .map(|_| {
            let sig = random_signature(&mut rng, &cfg);
            let t = random_term(&mut rng, &cfg);
            (sig, t)
        })
        .collect()
}

/// Reorders operands of every `+` and `∥` tree.
fn permute_ac(t: &Term, rng: &mut ChaCha8Rng) -> Term {
    use rand::seq::SliceRandom;
    let kids: Vec<Term> = t.children().into_iter().map(|c| permute_ac(c, rng)).collect();
    let t = t.with_children(kids);
    match t.node() {
        Node::Alt(..) => {
            let mut ops = t.alt_operands();
            ops.shuffle(rng);
            Term::alt_all(ops)
        }
        Node::Par(..) => {
            let mut ops = t.par_operands();
            ops.shuffle(rng);
            Term::par_all(ops).unwrap()
        }
        _ => t,
    }
}

#[test]
fn corpus_normal_forms_are_basic_replayable_and_idempotent() {
    for (sig, t) in corpus(300, 1) {
        let n = normalize_with(&t, &sig, &NormalizeOptions::default()).unwrap();
        assert!(is_basic(&n.term), "{t} gave {}", n.term);
        let replayed = replay(&t, &n.trace).unwrap_or_else(|e| panic!("{t}: {e}\n{}", n.trace));
        assert!(eq_ac(&replayed, &n.term), "{t}: replay gave {replayed}, nf {}", n.term);
        let again = normalize_with(&n.term, &sig, &NormalizeOptions::default()).unwrap();
        assert_eq!(again.term, n.term);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn redex_order_does_not_change_the_normal_form(seed in any::<u64>()) {
        let (sig, t) = corpus(1, seed).pop().unwrap();
        let l = normalize_with(&t, &sig, &NormalizeOptions::default()).unwrap();
        let r = normalize_with(&t, &sig, &NormalizeOptions { order: RedexOrder::RightFirst, ..Default::default() }).unwrap();
        prop_assert_eq!(l.basic, r.basic);
    }

    #[test]
    fn normal_form_is_invariant_under_ac(seed in any::<u64>()) {
        let (sig, t) = corpus(1, seed).pop().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let u = permute_ac(&t, &mut rng);
        let a = normalize_with(&t, &sig, &NormalizeOptions::default()).unwrap();
        let b = normalize_with(&u, &sig, &NormalizeOptions::default()).unwrap();
        prop_assert_eq!(a.basic, b.basic, "{} vs {}", t, u);
    }

    #[test]
    fn normalization_terminates_within_budget(seed in any::<u64>()) {
        let (sig, t) = corpus(1, seed).pop().unwrap();
        let n = normalize_with(&t, &sig, &NormalizeOptions { trace: false, ..Default::default() }).unwrap();
        prop_assert!(n.steps <= DEFAULT_BUDGET);
    }
}
