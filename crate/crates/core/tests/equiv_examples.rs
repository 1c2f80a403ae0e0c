use drtcalc_core::equiv::{rooted_branching_untimed, Answer, Relation};
use drtcalc_core::lts::UntimedLts;
use drtcalc_core::model::decide;
use drtcalc_core::{Action, ActionTable, Sem, Term};

fn sem() -> Sem {
    let mut t = ActionTable::new();
    for a in ["a", "b", "c"] {
        t.add_action(a).unwrap();
    }
    t.add_comm("a", "b", "c").unwrap();
    Sem::new(t)
}

fn answer(r: Relation, x: &Term, y: &Term) -> Answer {
    decide(&sem(), r, x, y, 10_000).unwrap().answer
}

fn u(a: &str) -> Term {
    Term::u(a)
}
fn seq(x: Term, y: Term) -> Term {
    Term::seq(x, y)
}
fn sig(x: Term) -> Term {
    Term::delay(x)
}

#[test]
fn strong_examples() {
    use Relation::Strong;
    assert_eq!(answer(Strong, &Term::alt(u("a"), u("a")), &u("a")), Answer::Yes);
    assert_eq!(answer(Strong, &u("a"), &u("b")), Answer::No);
    let rhs = Term::sum(vec![seq(u("a"), u("b")), seq(u("b"), u("a")), u("c")]);
    assert_eq!(answer(Strong, &Term::par(u("a"), u("b")), &rhs), Answer::Yes);
}

#[test]
fn termination_is_observable() {
    for r in Relation::ALL {
        assert_eq!(answer(r, &u("a"), &seq(u("a"), Term::delta())), Answer::No, "{r}");
        assert_eq!(answer(r, &u("a"), &seq(u("a"), u("b"))), Answer::No, "{r}");
    }
}

#[test]
fn branching_examples() {
    use Relation::Branching;
    assert_eq!(answer(Branching, &seq(u("a"), Term::tau()), &u("a")), Answer::Yes);
    assert_eq!(answer(Branching, &seq(Term::tau(), u("a")), &u("a")), Answer::Yes);
}

#[test]
fn rooted_examples() {
    assert_eq!(answer(Relation::RootedBranching, &seq(u("a"), Term::tau()), &u("a")), Answer::Yes);
    assert_eq!(answer(Relation::RootedBranching, &u("a"), &u("b")), Answer::No);
    assert_eq!(answer(Relation::RootedBranchingTs, &seq(Term::tau(), u("a")), &u("a")), Answer::No);
    let s = Term::alt(seq(u("a"), sig(u("b"))), sig(u("c")));
    assert_eq!(answer(Relation::RootedBranchingTs, &s, &s), Answer::Yes);
}

#[test]
fn drb2_closed_instance() {
    // a.(tau.(to(x) + y) + to(x)) against a.(to(x) + y), x = u(b), y = sigma(u(c))
    let nx = Term::timeout(u("b"));
    let y = sig(u("c"));
    let inner = Term::alt(nx.clone(), y);
    let lhs = seq(u("a"), Term::alt(seq(Term::tau(), inner.clone()), nx));
    let rhs = seq(u("a"), inner);
    assert_eq!(answer(Relation::RootedBranchingTs, &lhs, &rhs), Answer::Yes);
    assert_eq!(answer(Relation::RootedBranching, &lhs, &rhs), Answer::Yes);
}

#[test]
fn dormancy_examples() {
    let l = seq(u("a"), sig(u("b")));
    let r = seq(u("a"), seq(Term::tau(), sig(u("b"))));
    assert_eq!(answer(Relation::DormancyAware, &l, &r), Answer::Yes);
    // DRB5 closed instance with n = 0, x = u(b), y = delta
    let lhs = seq(u("a"), Term::alt(seq(Term::tau(), sig(u("b"))), Term::delta()));
    let rhs = seq(u("a"), Term::alt(sig(u("b")), Term::delta()));
    assert_eq!(answer(Relation::DormancyAware, &lhs, &rhs), Answer::Yes);
}

#[test]
fn untimed_tau_cycle_collapses() {
    let a = Action::obs("a");
    let b = Action::obs("b");
    // b then a tau cycle s1 <-> s2 that may exit with a, against b.a
    let cyc = UntimedLts {
        edges: vec![
            vec![(b.clone(), 1)],
            vec![(Action::Tau, 2), (a.clone(), 3)],
            vec![(Action::Tau, 1), (a.clone(), 3)],
            vec![],
            vec![(b, 5)],
            vec![(a.clone(), 3)],
        ],
        tick: Some(3),
        root: 0,
    };
    assert_eq!(rooted_branching_untimed(&cyc, 0, 4).answer, Answer::Yes);
    let chain = UntimedLts {
        edges: vec![vec![(a.clone(), 1)], vec![(Action::obs("b"), 2)], vec![], vec![(a.clone(), 4)], vec![(a, 2)]],
        tick: Some(2),
        root: 0,
    };
    assert_eq!(rooted_branching_untimed(&chain, 0, 3).answer, Answer::No);
}

#[test]
fn no_verdicts_carry_evidence() {
    let v = decide(&sem(), Relation::RootedBranchingTs, &seq(Term::tau(), u("a")), &u("a"), 1000).unwrap();
    assert!(!v.evidence.is_empty());
}

#[test]
fn time_free_projection_is_coarser_only_for_timed_choices() {
    // a DRB4 instance: equal with timing, but dropping the timing turns the
    // silent step into one that discards the alternative `b . b`
    let bb = seq(u("b"), u("b"));
    let lhs = seq(Term::tau(), Term::alt(bb.clone(), sig(seq(Term::tau(), Term::delay_n(2, u("a"))))));
    let rhs = seq(Term::tau(), Term::alt(bb, Term::delay_n(3, u("a"))));
    assert_eq!(answer(Relation::RootedBranchingTs, &lhs, &rhs), Answer::Yes);
    assert_eq!(answer(Relation::UntimedRooted, &lhs, &rhs), Answer::No);
}
