use std::collections::{BTreeSet, HashSet};

use aptc_equiv::*;
use aptc_lts::{explore, StepGraph};
use aptc_pes::*;
use aptc_rewrite::normalize;
use aptc_term::random::{random_signature, random_term, CorpusConfig, OpMix};
use aptc_term::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn structural(s: &str) -> Pes {
    compile_structural(&parse_closed(s).unwrap(), &Signature::new()).unwrap()
}

fn lock_step(s: &str) -> Pes {
    let (b, _) = normalize(&parse_closed(s).unwrap(), &Signature::new()).unwrap();
    compile_basic(&b).unwrap()
}

fn strong(p: &Pes, q: &Pes, m: Mode) -> bool {
    strong_bisim(p, q, m).unwrap().related
}

#[test]
fn expansion_law_fails_in_every_mode() {
    for (l, r) in [("a || b", "a . b + b . a"), ("a || a", "a . a")] {
        for m in Mode::ALL {
            let v = strong_bisim(&structural(l), &structural(r), m).unwrap();
            assert!(!v.related, "{l} vs {r} in {m}");
            assert!(v.to_string().starts_with(&format!("DISTINGUISHED {m}")));
            assert!(!v.sequence.is_empty());
        }
    }
}

#[test]
fn absorption_law_separates_hp_from_hhp() {
    let p = structural("a || (b + c) + a || b + b || (a + c)");
    let q = structural("a || (b + c) + b || (a + c)");
    for m in [Mode::Step, Mode::Pomset, Mode::Hp] {
        assert!(strong(&p, &q, m), "{m}");
    }
    assert!(!strong(&p, &q, Mode::Hhp));
}

#[test]
fn distributivity_failures_under_step() {
    let pairs = [
        ("(a . b) || (a . c)", "a . (b || c)"),
        ("(a . c) || (b . c)", "(a || b) . c"),
        ("(a || b) . (a || c)", "a || (b . c)"),
        ("(a || c) . (b || c)", "(a . b) || c"),
    ];
    for (l, r) in pairs {
        assert!(!strong(&structural(l), &structural(r), Mode::Step), "{l} vs {r}");
    }
}

#[test]
fn choice_distributes_over_merge_only_in_lock_step() {
    for (l, r) in [("(a + b) || c", "a || c + b || c"), ("a || (b + c)", "a || b + a || c")] {
        for m in Mode::ALL {
            assert!(strong(&lock_step(l), &lock_step(r), m));
            assert!(!strong(&structural(l), &structural(r), m));
        }
    }
}

#[test]
fn idempotence_in_every_mode() {
    for m in Mode::ALL {
        assert!(strong(&structural("a + a"), &structural("a"), m));
    }
}

#[test]
fn silent_step_laws() {
    let b = Bounds::default();
    for (l, r) in [("e . tau", "e"), ("a . (tau . (b + c) + b)", "a . (b + c)"), ("a || tau", "a")] {
        for m in [Mode::Step, Mode::Pomset, Mode::Hp] {
            assert!(branching_bisim_pes(&lock_step(l), &lock_step(r), m, true, &b).unwrap().related, "{l} {m}");
        }
        for m in Mode::ALL {
            assert!(weak_bisim(&lock_step(l), &lock_step(r), m).unwrap().related, "{l} weak {m}");
        }
    }
    let (p, q) = (lock_step("tau . a"), lock_step("a"));
    for m in [Mode::Step, Mode::Pomset, Mode::Hp] {
        assert!(branching_bisim_pes(&p, &q, m, false, &b).unwrap().related);
        let v = branching_bisim_pes(&p, &q, m, true, &b).unwrap();
        assert!(!v.related);
        assert!(v.sequence[0].contains("at the root"));
    }
    assert!(matches!(branching_bisim_pes(&p, &q, Mode::Hhp, true, &b), Err(EquivError::UnsupportedMode(Mode::Hhp))));
}

#[test]
fn size_bounds_are_enforced() {
    let big = structural("a || b || c || d || e || f || g || h || i || j || k || l || m");
    let err = strong_bisim(&big, &big, Mode::Hp).unwrap_err();
    assert_eq!(err, EquivError::TooManyEvents { events: 13, bound: 12, mode: Mode::Hp });
    assert!(strong_bisim(&big, &big, Mode::Step).unwrap().related);
}

#[test]
fn lts_loops_unfold_alike() {
    let mut spec = SpecFile::default();
    let x = parse_term(&mut spec, "X where X = a . X").unwrap();
    let y = parse_term(&mut spec, "Y where Y = a . a . Y").unwrap();
    let lx = explore(&x, &spec, 100).unwrap();
    let ly = explore(&y, &spec, 100).unwrap();
    assert_eq!((lx.state_count(), ly.state_count()), (1, 2));
    assert!(branching_step_bisim_lts(&lx, &ly, true).related);
    assert!(step_bisim_lts(&lx, &ly).related);
    let z = parse_term(&mut spec, "Z where Z = a . b . Z").unwrap();
    let v = step_bisim_lts(&lx, &explore(&z, &spec, 100).unwrap());
    assert!(!v.related);
    assert_eq!(v.sequence, vec!["left {a}".to_string(), "left {a}".to_string()]);
}

#[test]
fn lts_rooted_branching_examples() {
    let spec = SpecFile::default();
    let lts = |s: &str| explore(&parse_closed(s).unwrap(), &spec, 100).unwrap();
    assert!(branching_step_bisim_lts(&lts("e . tau"), &lts("e"), true).related);
    assert!(branching_step_bisim_lts(&lts("a . (tau . (b + c) + b)"), &lts("a . (b + c)"), true).related);
    assert!(branching_step_bisim_lts(&lts("tau . a"), &lts("a"), false).related);
    assert!(!branching_step_bisim_lts(&lts("tau . a"), &lts("a"), true).related);
    assert!(!branching_step_bisim_lts(&lts("a . (tau . b + c)"), &lts("a . (b + c)"), false).related);
}

// Oracles taken directly from the definitions, by exhaustive enumeration.

fn oracle_step(p: &Pes, q: &Pes) -> bool {
    let cp = p.configurations(1 << 12).unwrap();
    let cq = q.configurations(1 << 12).unwrap();
    let mut rel: HashSet<(u128, u128)> = cp.iter().flat_map(|&a| cq.iter().map(move |&b| (a, b))).collect();
    loop {
        let before = rel.len();
        let snapshot = rel.clone();
        rel.retain(|&(a, b)| {
            let ok = |x: &Pes, y: &Pes, c: u128, d: u128, flip: bool| {
                x.step_transitions(c).iter().all(|(l, c2)| {
                    y.step_transitions(d).iter().any(|(m, d2)| {
                        l == m && snapshot.contains(&if flip { (*d2, *c2) } else { (*c2, *d2) })
                    })
                })
            };
            p.is_terminal(a) == q.is_terminal(b) && ok(p, q, a, b, false) && ok(q, p, b, a, true)
        });
        if rel.len() == before {
            return rel.contains(&(0, 0));
        }
    }
}

type Tri = (u128, Vec<(usize, usize)>, u128);

fn members(x: u128) -> Vec<usize> {
    (0..128).filter(|i| x & (1 << i) != 0).collect()
}

fn is_iso(p: &Pes, q: &Pes, f: &[(usize, usize)]) -> bool {
    f.iter().all(|&(x, y)| p.label(x) == q.label(y))
        && f.iter().all(|&(x1, y1)| f.iter().all(|&(x2, y2)| p.leq(x1, x2) == q.leq(y1, y2)))
}

fn bijections(a: &[usize], b: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if a.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &y) in b.iter().enumerate() {
        let mut rest = b.to_vec();
        rest.remove(i);
        for mut f in bijections(&a[1..], &rest) {
            f.insert(0, (a[0], y));
            out.push(f);
        }
    }
    out
}

fn oracle_hp(p: &Pes, q: &Pes, hhp: bool) -> bool {
    let cp = p.configurations(1 << 12).unwrap();
    let cq = q.configurations(1 << 12).unwrap();
    let mut rel: BTreeSet<Tri> = BTreeSet::new();
    for &a in &cp {
        for &b in &cq {
            let (ma, mb) = (members(a), members(b));
            if ma.len() != mb.len() {
                continue;
            }
            for mut f in bijections(&ma, &mb) {
                if is_iso(p, q, &f) {
                    f.sort();
                    rel.insert((a, f, b));
                }
            }
        }
    }
    loop {
        let snapshot = rel.clone();
        rel.retain(|(a, f, b)| {
            if p.is_terminal(*a) != q.is_terminal(*b) {
                return false;
            }
            let fwd = members(p.enabled(*a)).into_iter().all(|e1| {
                members(q.enabled(*b)).into_iter().any(|e2| {
                    let mut g = f.clone();
                    g.push((e1, e2));
                    g.sort();
                    snapshot.contains(&(a | 1 << e1, g, b | 1 << e2))
                })
            });
            let bwd = members(q.enabled(*b)).into_iter().all(|e2| {
                members(p.enabled(*a)).into_iter().any(|e1| {
                    let mut g = f.clone();
                    g.push((e1, e2));
                    g.sort();
                    snapshot.contains(&(a | 1 << e1, g, b | 1 << e2))
                })
            });
            let down = !hhp
                || cp.iter().filter(|&&a2| a2 & !a == 0).all(|&a2| {
                    let g: Vec<(usize, usize)> = f.iter().copied().filter(|&(x, _)| a2 & (1 << x) != 0).collect();
                    let b2 = g.iter().fold(0u128, |acc, &(_, y)| acc | 1 << y);
                    !q.is_configuration(b2) || snapshot.contains(&(a2, g, b2))
                });
            fwd && bwd && down
        });
        if rel.len() == snapshot.len() {
            return rel.iter().any(|(a, f, b)| *a == 0 && *b == 0 && f.is_empty());
        }
    }
}

fn small_term(seed: u64, tau: bool) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CorpusConfig { max_depth: 3, atoms: 2, tau, mix: OpMix::Basic, shadows: false };
    random_term(&mut rng, &cfg)
}

fn small_pes(seed: u64, tau: bool) -> Pes {
    compile_structural(&small_term(seed, tau), &Signature::new()).unwrap()
}

/// Checks that a positive strong step verdict's pairs form a bisimulation.
fn revalidate_pairs(p: &Pes, q: &Pes, pairs: &[(u128, u128)]) -> bool {
    let set: HashSet<(u128, u128)> = pairs.iter().copied().collect();
    set.contains(&(0, 0))
        && pairs.iter().all(|&(a, b)| {
            p.is_terminal(a) == q.is_terminal(b)
                && p.step_transitions(a).iter().all(|(l, a2)| {
                    q.step_transitions(b).iter().any(|(m, b2)| l == m && set.contains(&(*a2, *b2)))
                })
                && q.step_transitions(b).iter().all(|(m, b2)| {
                    p.step_transitions(a).iter().any(|(l, a2)| l == m && set.contains(&(*a2, *b2)))
                })
        })
}

fn revalidate_triples(p: &Pes, q: &Pes, triples: &[PosetalTriple]) -> bool {
    let set: BTreeSet<Tri> = triples.iter().map(|t| (t.c1, t.f.clone(), t.c2)).collect();
    set.contains(&(0, vec![], 0))
        && set.iter().all(|(a, f, b)| {
            is_iso(p, q, f)
                && p.is_terminal(*a) == q.is_terminal(*b)
                && members(p.enabled(*a)).into_iter().all(|e1| {
                    members(q.enabled(*b)).into_iter().any(|e2| {
                        let mut g = f.clone();
                        g.push((e1, e2));
                        g.sort();
                        set.contains(&(a | 1 << e1, g, b | 1 << e2))
                    })
                })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn refinement_agrees_with_definitions(s1 in 0u64..5000, s2 in 0u64..5000) {
        let (p, q) = (small_pes(s1, false), small_pes(s2, false));
        prop_assume!(p.len() <= 6 && q.len() <= 6);
        let step = strong_bisim(&p, &q, Mode::Step).unwrap();
        prop_assert_eq!(step.related, oracle_step(&p, &q));
        if let Witness::ConfigPairs(pairs) = &step.witness {
            prop_assert!(revalidate_pairs(&p, &q, pairs));
        }
        let hp = strong_bisim(&p, &q, Mode::Hp).unwrap();
        prop_assert_eq!(hp.related, oracle_hp(&p, &q, false));
        if let Witness::Triples(ts) = &hp.witness {
            prop_assert!(revalidate_triples(&p, &q, ts));
        }
        prop_assert_eq!(strong(&p, &q, Mode::Hhp), oracle_hp(&p, &q, true));
    }

    #[test]
    fn mode_hierarchy_and_weakening(s1 in 0u64..3000, s2 in 0u64..3000, tau in any::<bool>()) {
        let (p, q) = (small_pes(s1, tau), small_pes(s2, tau));
        prop_assume!(p.len() <= 8 && q.len() <= 8);
        let r: Vec<bool> = Mode::ALL.iter().map(|&m| strong(&p, &q, m)).collect();
        // step, pomset, hp, hhp from coarse to fine
        prop_assert!(!r[3] || r[2]);
        prop_assert!(!r[2] || r[1]);
        prop_assert!(!r[1] || r[0]);
        for (i, &m) in Mode::ALL.iter().enumerate() {
            let w = weak_bisim(&p, &q, m).unwrap().related;
            prop_assert!(!r[i] || w, "strong implies weak in {}", m);
            if !tau {
                prop_assert_eq!(w, r[i]);
                if m != Mode::Hhp {
                    let rb = branching_bisim_pes(&p, &q, m, true, &Bounds::default()).unwrap().related;
                    prop_assert_eq!(rb, r[i]);
                }
            }
        }
    }

    #[test]
    fn strong_bisim_is_an_equivalence(s1 in 0u64..3000, s2 in 0u64..3000, s3 in 0u64..3000) {
        let (p, q, o) = (small_pes(s1, true), small_pes(s2, true), small_pes(s3, true));
        prop_assume!(p.len() <= 8 && q.len() <= 8 && o.len() <= 8);
        for m in Mode::ALL {
            prop_assert!(strong(&p, &p, m));
            prop_assert_eq!(strong(&p, &q, m), strong(&q, &p, m));
            if strong(&p, &q, m) && strong(&q, &o, m) {
                prop_assert!(strong(&p, &o, m));
            }
        }
    }

    #[test]
    fn lts_agrees_with_event_structure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = CorpusConfig { shadows: true, ..Default::default() };
        let sig = random_signature(&mut rng, &cfg);
        let t = random_term(&mut rng, &cfg);
        let spec = SpecFile::new(sig.clone());
        let lts = explore(&t, &spec, 100_000).unwrap();
        let (b, _) = normalize(&t, &sig).unwrap();
        let pes = compile_basic(&b).unwrap();
        let g: StepGraph = pes_step_graph(&pes, 1 << 20).unwrap();
        let v = step_bisim_graphs(&lts.to_graph(), &g);
        prop_assert!(v.related, "{}: {}", t, v);
    }
}
