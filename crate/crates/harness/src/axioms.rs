//! Closed instances of every axiom schema and their semantic check.

use drtcalc_core::equiv::{Answer, Relation};
use drtcalc_core::model::decide;
use drtcalc_core::recursion::substitute;
use drtcalc_core::term::act_set;
use drtcalc_core::{Action, ActSet, Node, Sem, Term};
use rand::Rng;
use serde::Serialize;

use crate::gen::{gen_action, gen_any_action, gen_spec, gen_term, rng, standard_table, GenOptions, Rng8, ACTIONS};

pub const DEFAULT_STATE_BOUND: usize = 2_000;

/// Every axiom with a generator, in table order.
pub const AXIOM_IDS: &[&str] = &[
    "A1", "A2", "A3", "A4", "A5", "A6DR", "A7DR", "DRT1", "DRT2", "D1DR", "D2DR", "D3", "D4", "DRD", "TI1DR", "TI2DR",
    "TI3", "TI4", "DRTI", "CM1", "CM2DR", "CM3DR", "DRCM1", "DRCM2", "CM4", "CM5DR", "CM6DR", "CM7DR", "DRCM3",
    "DRCM4", "DRCM5", "CM8", "CM9", "CFDR", "DRTO1", "DRTO2", "DRTO3", "DRTO4", "DRB1", "DRB2", "DRB3", "DRB4",
    "DRTFP1", "DRTFP2", "DRTFP3", "DRTFP4", "DRSH1", "DRSH2", "DRSH3", "DRSH4", "DRB5", "RDP",
];

#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub axiom: &'static str,
    pub lhs: Term,
    pub rhs: Term,
    pub relation: Relation,
}

/// The relation an axiom is validated under.
pub fn designated_relation(id: &str) -> Option<Relation> {
    let id = AXIOM_IDS.iter().find(|x| **x == id)?;
    Some(match *id {
        "DRB1" | "DRB2" | "DRB3" | "DRB4" => Relation::RootedBranchingTs,
        "DRB5" => Relation::DormancyAware,
        _ => Relation::Strong,
    })
}

fn operand(r: &mut Rng8) -> Term {
    let size = r.gen_range(1..=4);
    gen_term(r, size, GenOptions::full())
}

fn act(r: &mut Rng8) -> Term {
    Term::act(gen_any_action(r))
}

/// `a` from Act_τ (no δ).
fn prefix(r: &mut Rng8) -> Term {
    Term::act(gen_action(r, true))
}

fn set_with(r: &mut Rng8, must: Option<&str>, never: Option<&str>) -> ActSet {
    let names: Vec<&str> = ACTIONS
        .iter()
        .copied()
        .filter(|a| Some(*a) == must || (Some(*a) != never && r.gen_bool(0.4)))
        .collect();
    act_set(names)
}

fn obs_name(r: &mut Rng8) -> &'static str {
    ACTIONS[r.gen_range(0..ACTIONS.len())]
}

/// Generate one closed instance of `id`.
pub fn instance(id: &str, r: &mut Rng8) -> Option<AxiomInstance> {
    let relation = designated_relation(id)?;
    let axiom = *AXIOM_IDS.iter().find(|x| **x == id)?;
    let (x, y, z) = (operand(r), operand(r), operand(r));
    let s = Term::seq;
    let alt = Term::alt;
    let sig = Term::delay;
    let to = Term::timeout;
    let (lhs, rhs) = match axiom {
        "A1" => (alt(x.clone(), y.clone()), alt(y, x)),
        "A2" => (Term::new(Node::Alt(vec![alt(x.clone(), y.clone()), z.clone()])), alt(x, alt(y, z))),
        "A3" => (Term::new(Node::Alt(vec![x.clone(), x.clone()])), x),
        "A4" => (s(alt(x.clone(), y.clone()), z.clone()), alt(s(x, z.clone()), s(y, z))),
        "A5" => (s(s(x.clone(), y.clone()), z.clone()), s(x, s(y, z))),
        "A6DR" => (Term::new(Node::Alt(vec![x.clone(), Term::delta()])), x),
        "A7DR" => (s(Term::delta(), x), Term::delta()),
        "DRT1" => (alt(sig(x.clone()), sig(y.clone())), sig(alt(x, y))),
        "DRT2" => (s(sig(x.clone()), y.clone()), sig(s(x, y))),
        "D1DR" | "D2DR" => {
            let (a, h) = if axiom == "D1DR" {
                let a = gen_any_action(r);
                let never = if let Action::Obs(n) = &a { Some(n.to_string()) } else { None };
                let h = set_with(r, None, never.as_deref());
                (a, h)
            } else {
                let n = obs_name(r);
                (Action::obs(n), set_with(r, Some(n), None))
            };
            let rhs = if axiom == "D1DR" { Term::act(a.clone()) } else { Term::delta() };
            (Term::encap(h, Term::act(a)), rhs)
        }
        "D3" | "D4" | "DRD" => {
            let h = set_with(r, None, None);
            let e = |t: Term| Term::encap(h.clone(), t);
            match axiom {
                "D3" => (e(alt(x.clone(), y.clone())), alt(e(x), e(y))),
                "D4" => (e(s(x.clone(), y.clone())), s(e(x), e(y))),
                _ => (e(sig(x.clone())), sig(e(x))),
            }
        }
        "TI1DR" | "TI2DR" => {
            if axiom == "TI1DR" {
                let a = gen_any_action(r);
                let never = if let Action::Obs(n) = &a { Some(n.to_string()) } else { None };
                let i = set_with(r, None, never.as_deref());
                (Term::abstr(i, Term::act(a.clone())), Term::act(a))
            } else {
                let n = obs_name(r);
                (Term::abstr(set_with(r, Some(n), None), Term::u(n)), Term::tau())
            }
        }
        "TI3" | "TI4" | "DRTI" => {
            let i = set_with(r, None, None);
            let t = |u: Term| Term::abstr(i.clone(), u);
            match axiom {
                "TI3" => (t(alt(x.clone(), y.clone())), alt(t(x), t(y))),
                "TI4" => (t(s(x.clone(), y.clone())), s(t(x), t(y))),
                _ => (t(sig(x.clone())), sig(t(x))),
            }
        }
        "CM1" => (
            Term::par(x.clone(), y.clone()),
            alt(alt(Term::lmerge(x.clone(), y.clone()), Term::lmerge(y.clone(), x.clone())), Term::cmerge(x, y)),
        ),
        "CM2DR" => {
            let a = act(r);
            (Term::lmerge(a.clone(), x.clone()), s(a, x))
        }
        "CM3DR" => {
            let a = act(r);
            (Term::lmerge(s(a.clone(), x.clone()), y.clone()), s(a, Term::par(x, y)))
        }
        "DRCM1" => (Term::lmerge(sig(x), to(y)), Term::delta()),
        "DRCM2" => (Term::lmerge(sig(x.clone()), alt(to(y), sig(z.clone()))), sig(Term::lmerge(x, z))),
        "CM4" => (Term::lmerge(alt(x.clone(), y.clone()), z.clone()), alt(Term::lmerge(x, z.clone()), Term::lmerge(y, z))),
        "CM5DR" | "CM6DR" | "CM7DR" | "CFDR" => {
            let (a, b) = comm_pair(r);
            let ab = Term::cmerge(a.clone(), b.clone());
            match axiom {
                "CM5DR" => (Term::cmerge(s(a, x.clone()), b), s(ab, x)),
                "CM6DR" => (Term::cmerge(a, s(b, x.clone())), s(ab, x)),
                "CM7DR" => (Term::cmerge(s(a, x.clone()), s(b, y.clone())), s(ab, Term::par(x, y))),
                _ => {
                    let (an, bn) = (name_of(&a), name_of(&b));
                    let c = standard_table().comm(an, bn).cloned();
                    match c {
                        Some(c) => (ab, Term::u(&c)),
                        None => (ab, Term::delta()),
                    }
                }
            }
        }
        "DRCM3" => (Term::cmerge(to(x), sig(y)), Term::delta()),
        "DRCM4" => (Term::cmerge(sig(x), to(y)), Term::delta()),
        "DRCM5" => (Term::cmerge(sig(x.clone()), sig(y.clone())), sig(Term::cmerge(x, y))),
        "CM8" => (Term::cmerge(alt(x.clone(), y.clone()), z.clone()), alt(Term::cmerge(x, z.clone()), Term::cmerge(y, z))),
        "CM9" => (Term::cmerge(x.clone(), alt(y.clone(), z.clone())), alt(Term::cmerge(x.clone(), y), Term::cmerge(x, z))),
        "DRTO1" => {
            let a = act(r);
            (to(a.clone()), a)
        }
        "DRTO2" => (to(alt(x.clone(), y.clone())), alt(to(x), to(y))),
        "DRTO3" => (to(s(x.clone(), y.clone())), s(to(x), y)),
        "DRTO4" => (to(sig(x)), Term::delta()),
        "DRB1" => {
            let a = act(r);
            (s(a.clone(), Term::tau()), a)
        }
        "DRB2" => {
            let a = act(r);
            let inner = alt(to(x.clone()), y);
            (s(a.clone(), alt(s(Term::tau(), inner.clone()), to(x))), s(a, inner))
        }
        "DRB3" => {
            let a = act(r);
            let inner = alt(to(x), y.clone());
            (s(a.clone(), alt(s(Term::tau(), inner.clone()), y)), s(a, inner))
        }
        "DRB4" => {
            let a = act(r);
            (s(a.clone(), alt(sig(s(Term::tau(), x.clone())), to(y.clone()))), s(a, alt(sig(x), to(y))))
        }
        "DRTFP1" => {
            let a = gen_any_action(r);
            (Term::tf(Term::act(a.clone())), delayable_any(a))
        }
        "DRTFP2" => (Term::tf(alt(x.clone(), y.clone())), alt(Term::tf(x), Term::tf(y))),
        "DRTFP3" => (Term::tf(s(x.clone(), y.clone())), s(Term::tf(x), Term::tf(y))),
        "DRTFP4" => (Term::tf(sig(x.clone())), Term::tf(x)),
        "DRSH1" => (Term::shift(act(r)), Term::delta()),
        "DRSH2" => (Term::shift(alt(x.clone(), y.clone())), alt(Term::shift(x), Term::shift(y))),
        "DRSH3" => (Term::shift(s(x.clone(), y.clone())), s(Term::shift(x), y)),
        "DRSH4" => (Term::shift(sig(x.clone())), x),
        "DRB5" => {
            let a = prefix(r);
            let n = r.gen_range(0..=2);
            let lhs = s(a.clone(), alt(Term::delay_n(n, s(Term::tau(), sig(x.clone()))), y.clone()));
            let rhs = s(a, alt(Term::delay_n(n, sig(x)), y));
            (lhs, rhs)
        }
        "RDP" => {
            let spec = gen_spec(r, true);
            let v = if spec.get("Y").is_some() && r.gen_bool(0.5) { "Y" } else { "X" };
            let binding = spec.vars().map(|k| (k.clone(), spec.constant(k))).collect();
            (spec.constant(v), substitute(spec.get(v).unwrap(), &binding))
        }
        _ => return None,
    };
    Some(AxiomInstance { axiom, lhs, rhs, relation })
}

fn name_of(t: &Term) -> &str {
    match t.node() {
        Node::Const(a) => a.name(),
        _ => "",
    }
}

/// Mostly communicating pairs, some that do not communicate.
fn comm_pair(r: &mut Rng8) -> (Term, Term) {
    if r.gen_ratio(2, 3) {
        if r.gen_bool(0.5) {
            (Term::u("a"), Term::u("b"))
        } else {
            (Term::u("b"), Term::u("a"))
        }
    } else {
        (Term::act(gen_any_action(r)), Term::act(gen_any_action(r)))
    }
}

/// `<X | X = a + sigma(X)>` for any member of Act, τ or δ.
fn delayable_any(a: Action) -> Term {
    let body = Term::alt(Term::act(a), Term::delay(Term::var("X")));
    Term::rec("X", drtcalc_core::Spec::single("X", body))
}

#[derive(Clone, Debug, Serialize)]
pub struct FailedInstance {
    pub index: usize,
    pub lhs: String,
    pub rhs: String,
    pub answer: Option<Answer>,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub relation: String,
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<FailedInstance>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.passed == self.samples
    }
}

/// Check `samples` instances of `id` under its designated relation, or
/// under `relation` when given.
pub fn check_axiom_under(id: &str, relation: Option<Relation>, samples: usize, seed: u64) -> Option<AxiomReport> {
    let designated = designated_relation(id)?;
    let relation = relation.unwrap_or(designated);
    let sem = Sem::new(standard_table());
    let mut report =
        AxiomReport { axiom: id.to_string(), relation: relation.name().to_string(), samples, passed: 0, failures: vec![] };
    for i in 0..samples {
        let mut r = rng(seed.wrapping_mul(0x9E37_79B9).wrapping_add(i as u64 * 7919 + hash_id(id)));
        let inst = instance(id, &mut r)?;
        match decide(&sem, relation, &inst.lhs, &inst.rhs, DEFAULT_STATE_BOUND) {
            Ok(v) if v.answer == Answer::Yes => report.passed += 1,
            Ok(v) => report.failures.push(FailedInstance {
                index: i,
                lhs: inst.lhs.to_string(),
                rhs: inst.rhs.to_string(),
                answer: Some(v.answer),
                detail: v.evidence,
            }),
            Err(e) => report.failures.push(FailedInstance {
                index: i,
                lhs: inst.lhs.to_string(),
                rhs: inst.rhs.to_string(),
                answer: None,
                detail: vec![e.to_string()],
            }),
        }
    }
    Some(report)
}

pub fn check_axiom_soundness(id: &str, samples: usize, seed: u64) -> Option<AxiomReport> {
    check_axiom_under(id, None, samples, seed)
}

fn hash_id(id: &str) -> u64 {
    id.bytes().fold(17u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64))
}
