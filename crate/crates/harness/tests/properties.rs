use drtcalc_core::equiv::{self, Answer, Relation};
use drtcalc_core::lts::explore_pair;
use drtcalc_core::model::prepare;
use drtcalc_core::recursion::flatten_recursion;
use drtcalc_core::{canonicalize, Node, Sem, Term};
use drtcalc_harness::axioms::DEFAULT_STATE_BOUND;
use drtcalc_harness::gen::{gen_closed_term, rng, standard_table, GenOptions};
use drtcalc_harness::meta::gen_pair;
use drtcalc_harness::oracle::check_idling;
use drtcalc_harness::*;
use proptest::prelude::*;

fn sem() -> Sem {
    Sem::new(standard_table())
}

fn pair_graph(a: &Term, b: &Term) -> Option<(drtcalc_core::Lts, usize, usize)> {
    explore_pair(&sem(), &prepare(a).ok()?, &prepare(b).ok()?, DEFAULT_STATE_BOUND).ok()
}

#[test]
fn generator_basics() {
    let t = gen_closed_term(0, 1, GenOptions::full());
    assert!(t.children().is_empty() || matches!(t.node(), Node::Rec(..)), "{t}");
    assert_eq!(gen_closed_term(42, 6, GenOptions::full()), gen_closed_term(42, 6, GenOptions::full()));
    for seed in 0..200 {
        let t = gen_closed_term(seed, 7, GenOptions::bpa());
        let merge = t.any_node(true, &mut |n| {
            matches!(n.node(), Node::Par(..) | Node::LeftMerge(..) | Node::CommMerge(..) | Node::Encap(..))
        });
        assert!(!merge, "{t}");
    }
}

#[test]
fn every_axiom_has_a_relation() {
    for id in AXIOM_IDS {
        let _ = designated_relation(id);
        assert!(check_axiom_soundness(id, 1, 0).is_some(), "{id}");
    }
    assert!(check_axiom_soundness("NOPE", 1, 0).is_none());
}

#[test]
fn axioms_sound_small_sample() {
    for id in AXIOM_IDS {
        let r = check_axiom_soundness(id, 15, 99).unwrap();
        assert!(r.ok(), "{id}: {:?}", r.failures.first());
    }
}

#[test]
fn dormancy_axiom_fails_under_time_stamped_relation() {
    let r = check_axiom_under("DRB5", Some(Relation::RootedBranchingTs), 100, 7).unwrap();
    assert!(r.passed < r.samples);
}

#[test]
fn meta_small_sample() {
    let m = check_meta_properties(15, 3);
    for p in &m.properties {
        assert!(p.ok(), "{}: {:?}", p.property, p.failures.first());
    }
    assert!(m.coincidence.violations.is_empty(), "{:?}", m.coincidence.violations);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_idempotent(seed in any::<u64>(), size in 1usize..8) {
        let t = gen_closed_term(seed, size, GenOptions::full());
        let c = canonicalize(&t);
        prop_assert_eq!(canonicalize(&c), c.clone());
        if let Some((l, x, y)) = pair_graph(&t, &c) {
            prop_assert!(equiv::check(&l, Relation::Strong, x, y).is_yes());
        }
    }

    #[test]
    fn idling_is_deterministic(seed in any::<u64>(), size in 1usize..8) {
        let t = gen_closed_term(seed, size, GenOptions::full());
        if let Ok(t) = prepare(&t) {
            let c = check_idling(&sem(), &t, 5).unwrap();
            prop_assert!(c.ok(), "{:?}", c);
        }
    }

    #[test]
    fn flattening_preserves_behaviour(seed in any::<u64>(), size in 1usize..5) {
        let mut r = rng(seed);
        let inner = drtcalc_harness::gen::gen_rec_constant(&mut r, true);
        let body = Term::alt(Term::seq(Term::u("a"), Term::var("Z")), Term::seq(drtcalc_harness::gen::gen_term(&mut r, size, GenOptions::bpa()), inner));
        let t = Term::rec("Z", drtcalc_core::Spec::single("Z", body));
        let Ok(t) = prepare(&t) else { return Ok(()) };
        let f = flatten_recursion(&t).unwrap();
        let no_nesting = !f.any_node(false, &mut |n| matches!(n.node(), Node::Rec(_, s) if s.equations().values().any(|b| b.any_node(false, &mut |m| matches!(m.node(), Node::Rec(..))))));
        prop_assert!(no_nesting, "{}", f);
        if let Some((l, x, y)) = pair_graph(&t, &f) {
            prop_assert!(equiv::check(&l, Relation::Strong, x, y).is_yes());
        }
    }

    #[test]
    fn witnesses_validate(seed in any::<u64>()) {
        let (a, b) = gen_pair(&mut rng(seed), GenOptions::full());
        let Some((l, x, y)) = pair_graph(&a, &b) else { return Ok(()) };
        for rel in [Relation::Strong, Relation::Branching, Relation::RootedBranching, Relation::RootedBranchingTs, Relation::DormancyAware] {
            let v = equiv::check(&l, rel, x, y);
            if v.is_yes() {
                validate_witness(&l, rel, &v.witness, x, y).map_err(|e| TestCaseError::fail(format!("{rel} {a} vs {b}: {e}")))?;
            } else if v.answer == Answer::No {
                prop_assert!(!v.evidence.is_empty());
            }
        }
    }

    #[test]
    fn projection_respects_time_free_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let id = ["DRTFP1", "DRTFP2", "DRTFP3", "DRTFP4"][(seed % 4) as usize];
        let inst = drtcalc_harness::axioms::instance(id, &mut r).unwrap();
        let Some((l, x, y)) = pair_graph(&inst.lhs, &inst.rhs) else { return Ok(()) };
        prop_assert!(equiv::check(&l, Relation::UntimedRooted, x, y).is_yes(), "{} {} vs {}", id, inst.lhs, inst.rhs);
    }

    #[test]
    fn relations_are_reflexive_and_symmetric(seed in any::<u64>()) {
        let (a, b) = gen_pair(&mut rng(seed), GenOptions::full());
        let Some((l, x, y)) = pair_graph(&a, &b) else { return Ok(()) };
        for rel in Relation::ALL {
            prop_assert!(equiv::check(&l, rel, x, x).is_yes(), "{} {}", rel, a);
            prop_assert_eq!(equiv::check(&l, rel, x, y).answer, equiv::check(&l, rel, y, x).answer, "{} {} vs {}", rel, a, b);
        }
    }

    #[test]
    fn relations_are_ordered(seed in any::<u64>()) {
        let (a, b) = gen_pair(&mut rng(seed), GenOptions::full());
        let Some((l, x, y)) = pair_graph(&a, &b) else { return Ok(()) };
        let yes = |r| equiv::check(&l, r, x, y).is_yes();
        if yes(Relation::Strong) {
            prop_assert!(yes(Relation::RootedBranchingTs));
        }
        if yes(Relation::RootedBranchingTs) {
            prop_assert!(yes(Relation::DormancyAware));
            prop_assert!(yes(Relation::Branching));
        }
    }

    #[test]
    fn branching_equals_strong_without_silent_steps(seed in any::<u64>()) {
        let opts = GenOptions { tau: false, abstraction: false, ..GenOptions::full() };
        let mut r = rng(seed);
        let a = drtcalc_harness::gen::gen_term(&mut r, 4, opts);
        let b = drtcalc_harness::gen::gen_term(&mut r, 4, opts);
        let Some((l, x, y)) = pair_graph(&a, &b) else { return Ok(()) };
        prop_assert_eq!(equiv::check(&l, Relation::Strong, x, y).answer, equiv::check(&l, Relation::RootedBranching, x, y).answer);
    }

    #[test]
    fn dormancy_congruence_for_choice_and_sequence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = gen_pair(&mut r, GenOptions::bpa());
        let c = drtcalc_harness::gen::gen_term(&mut r, 3, GenOptions::bpa());
        let Some((l, x, y)) = pair_graph(&a, &b) else { return Ok(()) };
        if !equiv::check(&l, Relation::DormancyAware, x, y).is_yes() {
            return Ok(());
        }
        for (p, q) in [(Term::alt(a.clone(), c.clone()), Term::alt(b.clone(), c.clone())), (Term::seq(a.clone(), c.clone()), Term::seq(b.clone(), c.clone()))] {
            if let Some((l, x, y)) = pair_graph(&p, &q) {
                prop_assert!(equiv::check(&l, Relation::DormancyAware, x, y).is_yes(), "{} vs {}", p, q);
            }
        }
    }
}
