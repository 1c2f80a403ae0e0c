use std::collections::BTreeSet;

use drtcalc_core::lts::explore;
use drtcalc_core::model::prepare;
use drtcalc_core::Answer;
use drtcalc_par::*;

fn explored_states(p: &ParParams) -> usize {
    let m = build_par_model(p).unwrap();
    let t = prepare(m.proc("Hidden").unwrap()).unwrap();
    explore(&m.sem(), &t, 100_000).unwrap().len()
}

#[test]
fn state_count_golden() {
    assert_eq!(explored_states(&ParParams::unit(1, 5)), 56);
}

#[test]
fn parameters_validated() {
    assert!(ParParams::unit(0, 5).validate().is_err());
    assert!(ParParams { t_k: 0, ..ParParams::unit(1, 5) }.validate().is_err());
    assert!(ParParams::unit(1, 5).cycle_ok());
    assert!(!ParParams::unit(1, 4).cycle_ok());
    assert!(matches!(reference_specs(&ParParams::unit(1, 4)), Err(ParError::Premature { .. })));
}

#[test]
fn sender_shape() {
    let m = build_par_model(&ParParams::unit(1, 5)).unwrap();
    let s = &m.specs["S"];
    let rhs = s.get(&drtcalc_core::sym("S_0")).unwrap().to_string();
    assert!(rhs.contains("u(r1(d0)) . sigma(SF_d0_0)"), "{rhs}");
    assert!(rhs.contains("sigma(S_0)"), "{rhs}");
    let k = m.specs["K"].get(&drtcalc_core::sym("K")).unwrap().to_string();
    assert!(k.contains("u(error)") && k.contains("sigma(u(error))"), "{k}");
}

#[test]
fn buffer_uses_delayable_actions() {
    let m = reference_specs(&ParParams::unit(1, 5)).unwrap();
    let b = m.specs["B"].get(&drtcalc_core::sym("B")).unwrap();
    assert_eq!(b.to_string(), "r1(d0) . s2(d0) . B");
}

#[test]
fn functional_correctness() {
    for d in [1, 2] {
        assert_eq!(check_functional(&ParParams::unit(d, 5)).unwrap().answer, Answer::Yes, "|D|={d}");
        assert_eq!(check_functional(&ParParams::unit(d, 4)).unwrap().answer, Answer::No, "|D|={d}");
    }
    let p = ParParams { t_s: 2, ..ParParams::unit(2, 6) };
    assert_eq!(check_functional(&p).unwrap().answer, Answer::Yes);
}

#[test]
fn premature_time_out_has_evidence() {
    let v = check_functional(&ParParams::unit(1, 4)).unwrap();
    assert!(!v.evidence.is_empty());
}

#[test]
fn performance_pattern() {
    let v = check_performance(&ParParams::unit(1, 5)).unwrap();
    assert_eq!(v.system_x2_rbts.answer, Answer::Yes);
    assert_eq!(v.system_x3_da.answer, Answer::Yes);
    assert_eq!(v.x2_x3_rbts.answer, Answer::No);
    assert_eq!(v.x2_x3_da.answer, Answer::Yes);
    assert_eq!(v.x3_iterated_da.answer, Answer::Yes);
    assert!(v.as_expected());
}

#[test]
fn expansion_fidelity() {
    for p in [ParParams::unit(1, 5), ParParams::unit(2, 6), ParParams { t_s: 2, t_k: 2, ..ParParams::unit(1, 7) }] {
        assert_eq!(check_expansion(&p).unwrap().answer, Answer::Yes, "{p:?}");
    }
}

#[test]
fn delivery_timing() {
    let p = ParParams::unit(1, 5);
    assert_eq!(first_delivery_time(&p).unwrap(), 3);
    assert_eq!(first_delivery_time(&ParParams { t_s: 2, ..ParParams::unit(1, 6) }).unwrap(), 4);
    assert_eq!(delivery_delays(&p, 20).unwrap(), BTreeSet::from([3, 8, 13, 18]));
    assert_eq!(post_delivery_gaps(&p, 20).unwrap(), BTreeSet::from([2, 6, 11, 16]));
}

#[test]
fn delay_sets_follow_the_formula() {
    for p in [ParParams { t_s: 2, t_l: 2, ..ParParams::unit(1, 7) }, ParParams { t_r: 2, t_rp: 2, ..ParParams::unit(1, 8) }] {
        let h = 30;
        let base = p.t_s + p.t_k + p.t_r;
        let want: BTreeSet<u32> = (0..).map(|i| base + i * p.t_sp).take_while(|&x| x <= h).collect();
        assert_eq!(delivery_delays(&p, h).unwrap(), want, "{p:?}");
        let short = p.t_rp + p.t_l;
        let mut gaps: BTreeSet<u32> = (0..).map(|j| short + p.t_sp - p.t_r + j * p.t_sp).take_while(|&x| x <= h).collect();
        gaps.insert(short);
        assert_eq!(post_delivery_gaps(&p, h).unwrap(), gaps, "{p:?}");
    }
}

#[test]
fn report_serializes() {
    let r = run_report(&ParParams::unit(1, 5), CheckKind::Performance, 20).unwrap();
    assert!(r.ok);
    assert_eq!(r.first_delivery, Some(3));
    let m = build_par_model(&ParParams::unit(1, 5)).unwrap();
    assert!(matches!(m.proc("System").unwrap().node(), drtcalc_core::Node::Encap(..)));
    assert!(m.proc("Hidden").is_some());
}
