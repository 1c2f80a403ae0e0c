use drtcalc_core::{canonicalize, Action, Answer, Relation, Spec, Term};
use drtcalc_dsl::{parse, parse_term};
use drtcalc_harness::gen::{gen_closed_term, standard_table, GenOptions};
use proptest::prelude::*;

#[test]
fn prefix_then_delay() {
    let m = parse("actions a, b;\nproc P = u(a) . sigma(u(b));").unwrap();
    assert_eq!(m.proc("P").unwrap(), &Term::seq(Term::u("a"), Term::delay(Term::u("b"))));
}

#[test]
fn bare_action_is_delayable() {
    let m = parse("actions a;\nproc P = a;").unwrap();
    let want = Term::rec("X", Spec::single("X", Term::alt(Term::u("a"), Term::delay(Term::var("X")))));
    let v = drtcalc_core::model::decide(&m.sem(), Relation::Strong, m.proc("P").unwrap(), &want, 100).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert_eq!(m.proc("P").unwrap(), &Term::delayable(Action::obs("a")));
}

#[test]
fn check_directive() {
    let m = parse("actions a, b;\ncheck da-rb u(a).tau.sigma(u(b)) ~ u(a).sigma(u(b)) expect yes;").unwrap();
    assert_eq!(m.checks.len(), 1);
    let d = &m.checks[0];
    assert_eq!(d.relation, Relation::DormancyAware);
    assert_eq!(d.expect, Some(Answer::Yes));
    let v = m.run_check(d, 1000).unwrap();
    assert!(d.passes(&v));
}

#[test]
fn precedence_and_associativity() {
    let t = standard_table();
    let a = parse_term(&t, "u(a) + u(b) . u(c) || u(d)").unwrap();
    let want = Term::alt(Term::u("a"), Term::par(Term::seq(Term::u("b"), Term::u("c")), Term::u("d")));
    assert_eq!(canonicalize(&a), canonicalize(&want));
    let s = parse_term(&t, "u(a) . u(b) . u(c)").unwrap();
    assert_eq!(s, Term::seq(Term::u("a"), Term::seq(Term::u("b"), Term::u("c"))));
}

#[test]
fn specs_and_references() {
    let src = "actions a, b;\nspec E { X = u(a) . Y; Y = u(b) . X; }\nproc P = <Y | E>;\nproc Q = <X | X = u(b) . u(a) . X>;\ncheck rb-ts P ~ Q;";
    let m = parse(src).unwrap();
    let v = m.run_check(&m.checks[0], 1000).unwrap();
    assert_eq!(v.answer, Answer::Yes);
}

#[test]
fn iteration_and_operators() {
    let t = standard_table();
    for src in [
        "sigma^3(u(a))",
        "sigma*2(u(a))",
        "encap({a, b}, u(a) | u(b))",
        "hide({c}, u(a) |_ u(b))",
        "to(sigma(u(a)))",
        "tf(sigma(u(a)))",
        "shift(sigma(u(a)))",
        "delta . tau",
    ] {
        parse_term(&t, src).unwrap_or_else(|e| panic!("{src}: {e}"));
    }
    assert_eq!(parse_term(&t, "sigma^2(u(a))").unwrap(), Term::delay_n(2, Term::u("a")));
}

#[test]
fn errors_carry_positions() {
    let e = parse("actions a;\nproc P = u(a) ++ u(a);").unwrap_err();
    assert_eq!((e.line, e.col), (2, 16));
    let e = parse("actions a;\nproc P = b;").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(e.msg.contains('b'), "{}", e.msg);
    let e = parse("actions a;\ncheck bogus u(a) ~ u(a);").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(parse("actions a;\nspec E { X = u(a) . X; X = u(a); }").is_err());
    assert!(parse("actions a;\nproc P = <Z | X = u(a) . X>;").is_err());
}

#[test]
fn comments_are_skipped() {
    let m = parse("# header\nactions a; // trailing\nproc P = u(a);").unwrap();
    assert_eq!(m.proc("P").unwrap(), &Term::u("a"));
}

#[test]
fn round_trip_examples() {
    let t = standard_table();
    for src in ["u(a) . (u(b) + sigma(u(c)))", "<X | X = a . X + sigma(u(b))>", "encap({c}, u(a) || u(b)) |_ tau"] {
        let a = parse_term(&t, src).unwrap();
        let b = parse_term(&t, &a.to_string()).unwrap();
        assert_eq!(canonicalize(&a), canonicalize(&b), "{src}");
    }
}

proptest! {
    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), size in 1usize..8) {
        let t = gen_closed_term(seed, size, GenOptions::full());
        let text = t.to_string();
        let back = parse_term(&standard_table(), &text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(canonicalize(&back), canonicalize(&t), "{}", text);
    }
}
