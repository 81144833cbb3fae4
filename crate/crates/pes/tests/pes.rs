use std::collections::BTreeSet;

use aptc_pes::*;
use aptc_rewrite::{normalize, BasicTerm};
use aptc_term::random::{random_signature, random_term, CorpusConfig, OpMix};
use aptc_term::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn basic(s: &str) -> Pes {
    let t = parse_closed(s).unwrap();
    let (b, _) = normalize(&t, &Signature::new()).unwrap();
    compile_basic(&b).unwrap()
}

fn structural(s: &str) -> Pes {
    compile_structural(&parse_closed(s).unwrap(), &Signature::new()).unwrap()
}

/// Brute force: every subset that is conflict-free and downward closed.
fn oracle_configurations(p: &Pes) -> Vec<u128> {
    let n = p.len();
    let mut out = Vec::new();
    for s in 0u128..(1 << n) {
        let ok = (0..n).filter(|&e| s & (1 << e) != 0).all(|e| {
            (0..n).all(|f| !(p.leq(f, e) && s & (1 << f) == 0) && !(s & (1 << f) != 0 && p.in_conflict(e, f)))
        });
        if ok {
            out.push(s);
        }
    }
    out
}

fn named(p: &Pes, c: u128) -> String {
    let mut v: Vec<String> = (0..p.len()).filter(|&e| c & (1 << e) != 0).map(|e| p.label(e).to_string()).collect();
    v.sort();
    v.concat()
}

#[test]
fn compile_basic_examples() {
    let p = basic("a . b");
    assert_eq!(p.len(), 2);
    assert!(p.leq(0, 1) && !p.in_conflict(0, 1));
    let p = basic("a + b");
    assert!(p.in_conflict(0, 1));
    let p = basic("(a || b) . c");
    assert_eq!(p.len(), 3);
    assert!(p.concurrent(0, 1));
    assert!(p.leq(0, 2) && p.leq(1, 2));
    let confs: BTreeSet<String> = p.configurations(DEFAULT_CONFIG_BOUND).unwrap().iter().map(|&c| named(&p, c)).collect();
    let want: BTreeSet<String> = ["", "a", "b", "ab", "abc"].iter().map(|s| s.to_string()).collect();
    assert_eq!(confs, want);
    assert_eq!(p.configurations(DEFAULT_CONFIG_BOUND).unwrap(), oracle_configurations(&p));
}

#[test]
fn configuration_examples() {
    let count = |s: &str| basic(s).configurations(DEFAULT_CONFIG_BOUND).unwrap().len();
    assert_eq!(count("a + b"), 3);
    assert_eq!(count("a . b"), 3);
    assert_eq!(count("delta"), 1);
    assert!(matches!(basic("(a || b) . c").configurations(3), Err(PesError::ConfigurationBound { bound: 3 })));
}

#[test]
fn delta_has_no_behaviour_and_no_termination() {
    let p = basic("delta");
    assert!(p.is_empty() && p.terminal().is_empty());
    let p = basic("a . delta");
    assert!(!p.is_terminal(1));
    assert!(basic("a").is_terminal(1));
}

#[test]
fn pomset_transition_examples() {
    let p = basic("a . b");
    let ts = p.pomset_transitions(0);
    assert_eq!(ts.len(), 2);
    let ab = ts.iter().find(|(x, _)| x.len() == 2).unwrap();
    assert!(!ab.0.is_antichain());
    let p = structural("a || b");
    let ts = p.pomset_transitions(0);
    assert_eq!(ts.len(), 3);
    assert!(ts.iter().any(|(x, _)| x.len() == 2 && x.is_antichain()));
    let p = basic("a + b");
    assert!(p.pomset_transitions(1).is_empty());
}

#[test]
fn step_transition_examples() {
    let steps = |p: &Pes| -> BTreeSet<String> { p.step_transitions(0).iter().map(|(l, _)| step_string(l)).collect() };
    assert!(steps(&structural("a || b")).contains("a|b"));
    let s = steps(&structural("a . b + b . a"));
    assert_eq!(s, ["a", "b"].iter().map(|x| x.to_string()).collect());
    assert_eq!(steps(&basic("a")), ["a".to_string()].into_iter().collect());
    // Events of one step are concurrent; the next layer waits for all of them.
    let p = basic("(a || b) . c");
    let after_a: BTreeSet<String> = p.step_transitions(1).iter().map(|(l, _)| step_string(l)).collect();
    assert_eq!(after_a, ["b".to_string()].into_iter().collect());
}

#[test]
fn weak_pomset_transition_examples() {
    let p = basic("tau . a");
    let ts = p.weak_pomset_transitions(0);
    assert!(ts.iter().any(|(x, _)| x.labels == vec![Label::act("a")]));
    let p = basic("a . tau . b");
    let ts = p.weak_pomset_transitions(1);
    assert!(ts.iter().any(|(x, _)| x.labels == vec![Label::act("b")]));
    let p = basic("tau . tau");
    assert!(p.weak_pomset_transitions(0).is_empty());
    assert!(p.weakly_terminates(0));
}

#[test]
fn step_policy_for_silent_and_shadow_labels() {
    let p = basic("a . (tau || b)");
    assert_eq!(p.len(), 2);
    let p = basic("tau || tau");
    assert_eq!(p.labels(), &[Label::Tau]);
}

#[test]
fn structural_sequence_copies_continuation_per_ending() {
    let p = structural("(a + b) . c");
    assert_eq!(p.len(), 4);
    let p = structural("(a || b) . c");
    assert_eq!(p.len(), 3);
    assert_eq!(p.configurations(DEFAULT_CONFIG_BOUND).unwrap().len(), 5);
    assert!(structural("a || delta").is_empty());
    assert!(compile_structural(&parse_closed("a <> b").unwrap(), &Signature::new()).is_err());
}

#[test]
fn text_format_round_trip() {
    let p = structural("(a + b) . c || rA(d1)");
    let text = p.to_string();
    assert!(text.starts_with("event 0 a\n"));
    assert_eq!(parse_pes(&text).unwrap(), p);
    assert!(parse_pes("event 1 a").is_err());
    assert_eq!(parse_label("shadow[s(x),2]"), Some(Label::Shadow(Action::with_args("s", &["x"]), 2)));
}

/// Brute-force pomset isomorphism.
fn isomorphic(a: &Pomset, b: &Pomset) -> bool {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    if a.len() != b.len() {
        return false;
    }
    perms(a.len()).into_iter().any(|pi| {
        (0..a.len()).all(|i| a.labels[i] == b.labels[pi[i]])
            && (0..a.len()).all(|i| {
                (0..a.len()).all(|j| (a.below[i] >> j) & 1 == (b.below[pi[i]] >> pi[j]) & 1)
            })
    })
}

fn random_pomset(seed: u64, n: usize) -> Pomset {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Label> = (0..n).map(|_| Label::act(["a", "b"][rng.gen_range(0..2)])).collect();
    // Random DAG on 0..n respecting index order, then transitive closure.
    let mut below = vec![0u64; n];
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(0.3) {
                below[j] |= 1 << i;
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            if below[j] & (1 << i) != 0 {
                below[j] |= below[i];
            }
        }
    }
    // Shuffle vertex names.
    let mut pi: Vec<usize> = (0..n).collect();
    use rand::seq::SliceRandom;
    pi.shuffle(&mut rng);
    let mut l2 = vec![Label::Tau; n];
    let mut b2 = vec![0u64; n];
    for v in 0..n {
        l2[pi[v]] = labels[v].clone();
        for u in 0..n {
            if below[v] & (1 << u) != 0 {
                b2[pi[v]] |= 1 << pi[u];
            }
        }
    }
    Pomset { labels: l2, below: b2 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pomset_keys_decide_isomorphism(s1 in 0u64..40, s2 in 0u64..40, n in 1usize..6) {
        let a = random_pomset(s1, n);
        let b = random_pomset(s2, n);
        prop_assert_eq!(a.key() == b.key(), isomorphic(&a, &b));
    }

    #[test]
    fn compiled_corpus_satisfies_the_pes_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = CorpusConfig { mix: OpMix::Full, ..Default::default() };
        let sig = random_signature(&mut rng, &cfg);
        let t = random_term(&mut rng, &cfg);
        let (b, _) = normalize(&t, &sig).unwrap();
        let p = compile_basic(&b).unwrap();
        check_invariants(&p, &b);
        let cfg = CorpusConfig { mix: OpMix::Basic, tau: true, ..Default::default() };
        let t = random_term(&mut rng, &cfg);
        if in_structural_fragment(&t) {
            let q = compile_structural(&t, &sig).unwrap();
            check_invariants(&q, &b);
        }
    }
}

fn check_invariants(p: &Pes, _b: &BasicTerm) {
    let n = p.len();
    for e in 0..n {
        assert!(!p.in_conflict(e, e), "irreflexive");
        for f in 0..n {
            assert_eq!(p.in_conflict(e, f), p.in_conflict(f, e), "symmetric");
            for g in 0..n {
                if p.in_conflict(e, f) && p.leq(f, g) {
                    assert!(p.in_conflict(e, g), "hereditary");
                }
            }
        }
    }
    let reclosed = parse_pes(&p.to_string()).unwrap();
    assert_eq!(&reclosed, p, "closure is a fixpoint");
    if n <= 14 {
        let confs = p.configurations(DEFAULT_CONFIG_BOUND).unwrap();
        assert_eq!(confs, oracle_configurations(p));
        for &c in &confs {
            // Pomset transitions with one event are exactly the single-event moves.
            let singles: BTreeSet<u128> =
                p.pomset_transitions(c).into_iter().filter(|(x, _)| x.len() == 1).map(|(_, d)| d).collect();
            let enabled: BTreeSet<u128> = (0..n).filter(|&e| p.enabled(c) & (1 << e) != 0).map(|e| c | (1 << e)).collect();
            assert_eq!(singles, enabled);
            // Steps are the antichain pomset transitions.
            let steps: BTreeSet<u128> = p.step_transitions(c).into_iter().map(|(_, d)| d).collect();
            let anti: BTreeSet<u128> = p
                .pomset_transitions(c)
                .into_iter()
                .filter(|(x, _)| x.is_antichain())
                .map(|(_, d)| d)
                .collect();
            assert_eq!(steps, anti);
            // Brute-force pomset transitions.
            let brute: BTreeSet<u128> = confs.iter().copied().filter(|&d| d & c == c && d != c).collect();
            let got: BTreeSet<u128> = p.pomset_transitions(c).into_iter().map(|(_, d)| d).collect();
            assert_eq!(got, brute);
            // Strong τ-free pomset transitions are weak ones.
            let weak: BTreeSet<u128> = p.weak_pomset_transitions(c).into_iter().map(|(_, d)| d).collect();
            for (x, d) in p.pomset_transitions(c) {
                if !x.labels.iter().any(Label::is_tau) {
                    assert!(weak.contains(&d));
                }
            }
        }
    }
}
