//! Sampled meta-properties: standard concurrency, handshaking, expansion,
//! stamped correspondence, rooted coincidence, inclusion, RDP/RSP and the
//! normal forms.

use drtcalc_core::equiv::{self, Answer, Relation};
use drtcalc_core::lts::{explore, explore_pair};
use drtcalc_core::model::{decide, prepare};
use drtcalc_core::recursion::substitute;
use drtcalc_core::rewrite::{expand_merge, is_basic, is_linear, is_ts_basic, linearize, to_basic_term, to_ts_basic};
use drtcalc_core::{Node, Sem, Term};
use rand::Rng;
use serde::Serialize;

use crate::axioms::{instance, AXIOM_IDS, DEFAULT_STATE_BOUND};
use crate::gen::{gen_spec, gen_term, rng, standard_table, GenOptions, Rng8};
use crate::oracle::check_idling;

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl PropertyReport {
    fn new(name: &str) -> PropertyReport {
        PropertyReport { property: name.to_string(), samples: 0, passed: 0, failures: vec![] }
    }
    fn record(&mut self, ok: Result<bool, String>, what: impl FnOnce() -> String) {
        self.samples += 1;
        match ok {
            Ok(true) => self.passed += 1,
            Ok(false) => self.failures.push(what()),
            Err(e) => self.failures.push(format!("{}: {e}", what())),
        }
    }
    pub fn ok(&self) -> bool {
        self.passed == self.samples
    }
}

fn sem() -> Sem {
    Sem::new(standard_table())
}

fn small(r: &mut Rng8, opts: GenOptions) -> Term {
    let n = r.gen_range(1..=4);
    gen_term(r, n, opts)
}

fn holds(sem: &Sem, rel: Relation, a: &Term, b: &Term) -> Result<bool, String> {
    decide(sem, rel, a, b, DEFAULT_STATE_BOUND).map(|v| v.is_yes()).map_err(|e| e.to_string())
}

pub fn standard_concurrency(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("standard concurrency");
    for i in 0..samples {
        let mut r = rng(seed ^ (0x5C00 + i as u64));
        let o = GenOptions::full();
        let (x, y, z) = (small(&mut r, o), small(&mut r, o), small(&mut r, o));
        let (par, lm, cm) = (Term::par, Term::lmerge, Term::cmerge);
        let (l, rr) = match i % 6 {
            0 => (par(x.clone(), y.clone()), par(y, x)),
            1 => (par(par(x.clone(), y.clone()), z.clone()), par(x, par(y, z))),
            2 => (lm(lm(x.clone(), y.clone()), z.clone()), lm(x, par(y, z))),
            3 => (cm(x.clone(), y.clone()), cm(y, x)),
            4 => (cm(cm(x.clone(), y.clone()), z.clone()), cm(x, cm(y, z))),
            _ => (cm(x.clone(), lm(y.clone(), z.clone())), lm(cm(x, y), z)),
        };
        rep.record(holds(&s, Relation::RootedBranchingTs, &l, &rr), || format!("{l}  vs  {rr}"));
    }
    rep
}

pub fn handshaking(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("handshaking axiom");
    for i in 0..samples {
        let mut r = rng(seed ^ (0x4A00 + i as u64));
        let o = GenOptions::full();
        let (x, y, z) = (small(&mut r, o), small(&mut r, o), small(&mut r, o));
        let l = Term::timeout(Term::cmerge(Term::cmerge(x, y), z));
        rep.record(holds(&s, Relation::RootedBranchingTs, &l, &Term::delta()), || l.to_string());
    }
    rep
}

pub fn expansion(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("expansion");
    for i in 0..samples {
        let mut r = rng(seed ^ (0xE000 + i as u64));
        let o = GenOptions::full();
        let n = 2 + i % 2;
        let xs: Vec<Term> = (0..n).map(|_| small(&mut r, o)).collect();
        let t = xs[1..].iter().cloned().rev().reduce(|acc, x| Term::par(x, acc)).unwrap();
        let t = Term::par(xs[0].clone(), t);
        let ok = expand_merge(s.table(), &t)
            .map_err(|e| e.to_string())
            .and_then(|e| holds(&s, Relation::RootedBranchingTs, &t, &e));
        rep.record(ok, || t.to_string());
    }
    rep
}

pub fn idling(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("stamped correspondence");
    for i in 0..samples {
        let mut r = rng(seed ^ (0x9100 + i as u64));
        let n = r.gen_range(1..=7);
        let t = gen_term(&mut r, n, GenOptions::full());
        let ok = prepare(&t)
            .map_err(|e| e.to_string())
            .and_then(|t| check_idling(&s, &t, 6).map_err(|e| e.to_string()))
            .map(|c| c.ok());
        rep.record(ok, || t.to_string());
    }
    rep
}

/// Put `τ . _`, `_ . τ`, or a delay around a random subterm.
fn perturb(r: &mut Rng8, t: &Term) -> Term {
    let kids = t.children();
    if kids.is_empty() || r.gen_ratio(1, 3) {
        return match r.gen_range(0..4) {
            0 => Term::seq(Term::tau(), t.clone()),
            1 => Term::seq(t.clone(), Term::tau()),
            2 => Term::alt(t.clone(), Term::seq(Term::tau(), t.clone())),
            _ => Term::delay(Term::seq(Term::tau(), t.clone())),
        };
    }
    let k = r.gen_range(0..kids.len());
    let mut new: Vec<Term> = kids.into_iter().cloned().collect();
    new[k] = perturb(r, &new[k]);
    t.with_children(new)
}

/// Pairs that are often related: axiom instances, perturbations, and
/// independent small terms.
pub fn gen_pair(r: &mut Rng8, opts: GenOptions) -> (Term, Term) {
    match r.gen_range(0..3) {
        0 => {
            let id = AXIOM_IDS[r.gen_range(0..AXIOM_IDS.len())];
            let inst = instance(id, r).unwrap();
            (inst.lhs, inst.rhs)
        }
        1 => {
            let t = small(r, opts);
            let p = Term::seq(Term::u("a"), perturb(r, &t));
            (Term::seq(Term::u("a"), t), p)
        }
        _ => (small(r, opts), small(r, opts)),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CoincidenceCounts {
    pub pairs: usize,
    pub tp_yes: usize,
    pub tp_no: usize,
    pub tp_unknown: usize,
    pub ts_yes: usize,
    pub violations: Vec<String>,
}

/// Rooted two-phase against rooted stamped verdicts.
pub fn coincidence(samples: usize, seed: u64) -> CoincidenceCounts {
    let s = sem();
    let mut c = CoincidenceCounts::default();
    for i in 0..samples {
        let mut r = rng(seed ^ (0x7400 + i as u64));
        let (a, b) = gen_pair(&mut r, GenOptions::full());
        let res = (|| {
            let (l, x, y) = explore_pair(&s, &prepare(&a)?, &prepare(&b)?, DEFAULT_STATE_BOUND)?;
            Ok::<_, drtcalc_core::Error>((equiv::check(&l, Relation::RootedBranching, x, y), equiv::check(&l, Relation::RootedBranchingTs, x, y)))
        })();
        let Ok((tp, ts)) = res else { continue };
        c.pairs += 1;
        match tp.answer {
            Answer::Yes => c.tp_yes += 1,
            Answer::No => c.tp_no += 1,
            Answer::Unknown => c.tp_unknown += 1,
        }
        if ts.is_yes() {
            c.ts_yes += 1;
        }
        let contradiction = match tp.answer {
            Answer::Yes => ts.answer != Answer::Yes,
            Answer::No => ts.answer != Answer::No,
            Answer::Unknown => false,
        };
        if contradiction {
            c.violations.push(format!("{a}  vs  {b}: tp {} ts {}", tp.answer, ts.answer));
        }
    }
    c
}

pub fn inclusion(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("inclusion rb-ts in da-rb");
    for i in 0..samples {
        let mut r = rng(seed ^ (0x1C00 + i as u64));
        let (a, b) = gen_pair(&mut r, GenOptions::full());
        let res = (|| {
            let (l, x, y) = explore_pair(&s, &prepare(&a)?, &prepare(&b)?, DEFAULT_STATE_BOUND)?;
            Ok::<_, drtcalc_core::Error>(
                !equiv::check(&l, Relation::RootedBranchingTs, x, y).is_yes()
                    || equiv::check(&l, Relation::DormancyAware, x, y).is_yes(),
            )
        })();
        rep.record(res.map_err(|e| e.to_string()), || format!("{a}  vs  {b}"));
    }
    rep
}

/// RDP: a constant against its one-step unfolding. RSP spot check: the
/// linearization of each component solves the specification and so equals
/// the constant.
pub fn recursion_principles(samples: usize, seed: u64) -> (PropertyReport, PropertyReport) {
    let s = sem();
    let mut rdp = PropertyReport::new("RDP");
    let mut rsp = PropertyReport::new("RSP spot check");
    for i in 0..samples {
        let mut r = rng(seed ^ (0x2D00 + i as u64));
        let spec = gen_spec(&mut r, true);
        let binding: std::collections::BTreeMap<_, _> = spec.vars().map(|k| (k.clone(), spec.constant(k))).collect();
        for x in spec.vars() {
            let c = spec.constant(x);
            let unfolded = substitute(spec.get(x).unwrap(), &binding);
            rdp.record(holds(&s, Relation::Strong, &c, &unfolded), || c.to_string());
        }
        // candidate solution: linearized constants, one per variable
        let mut sol = std::collections::BTreeMap::new();
        let mut ok = Ok(true);
        for x in spec.vars() {
            match linearize(&s, &spec.constant(x), DEFAULT_STATE_BOUND) {
                Ok((lin, root)) => {
                    sol.insert(x.clone(), lin.constant(&root));
                }
                Err(e) => ok = Err(e.to_string()),
            }
        }
        if ok.is_ok() {
            for x in spec.vars() {
                let lhs = &sol[x];
                let rhs = substitute(spec.get(x).unwrap(), &sol);
                let solves = holds_unguarded(&s, lhs, &rhs);
                let equal = holds_unguarded(&s, lhs, &spec.constant(x));
                ok = match (solves, equal) {
                    (Ok(a), Ok(b)) => Ok(a && b && ok.unwrap()),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
                if ok.is_err() {
                    break;
                }
            }
        }
        rsp.record(ok, || format!("{spec:?}"));
    }
    (rdp, rsp)
}

/// Linear specifications contain `tau . X`, which the syntactic check
/// does not count as guarded; explore them directly.
fn holds_unguarded(s: &Sem, a: &Term, b: &Term) -> Result<bool, String> {
    let (l, x, y) = explore_pair(s, a, b, DEFAULT_STATE_BOUND).map_err(|e| e.to_string())?;
    Ok(equiv::check(&l, Relation::RootedBranchingTs, x, y).is_yes())
}

pub fn basic_forms(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("basic and ts-basic forms");
    for i in 0..samples {
        let mut r = rng(seed ^ (0xBA00 + i as u64));
        let n = r.gen_range(1..=7);
        let t = gen_term(&mut r, n, GenOptions::recursion_free());
        let ok = (|| {
            let b = to_basic_term(s.table(), &t).map_err(|e| e.to_string())?;
            let ts = to_ts_basic(&b).map_err(|e| e.to_string())?;
            Ok(is_basic(&b)
                && is_ts_basic(&ts)
                && holds(&s, Relation::Strong, &t, &b)?
                && holds(&s, Relation::Strong, &b, &ts)?)
        })();
        rep.record(ok, || t.to_string());
    }
    rep
}

pub fn linear_forms(samples: usize, seed: u64) -> PropertyReport {
    let s = sem();
    let mut rep = PropertyReport::new("linearization");
    let opts = GenOptions { abstraction: false, ..GenOptions::full() };
    for i in 0..samples {
        let mut r = rng(seed ^ (0x1100 + i as u64));
        let n = r.gen_range(1..=7);
        let t = gen_term(&mut r, n, opts);
        let ok = (|| {
            let t = prepare(&t).map_err(|e| e.to_string())?;
            let (spec, root) = linearize(&s, &t, DEFAULT_STATE_BOUND).map_err(|e| e.to_string())?;
            if !is_linear(&spec) {
                return Ok(false);
            }
            let c = spec.constant(&root);
            let (l, x, y) = explore_pair(&s, &t, &c, DEFAULT_STATE_BOUND).map_err(|e| e.to_string())?;
            Ok(equiv::check(&l, Relation::Strong, x, y).is_yes())
        })();
        rep.record(ok, || t.to_string());
    }
    rep
}

#[derive(Clone, Debug, Serialize)]
pub struct MetaReport {
    pub properties: Vec<PropertyReport>,
    pub coincidence: CoincidenceCounts,
}

impl MetaReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(|p| p.ok()) && self.coincidence.violations.is_empty()
    }
}

pub fn check_meta_properties(samples: usize, seed: u64) -> MetaReport {
    let (rdp, rsp) = recursion_principles(samples, seed);
    MetaReport {
        properties: vec![
            standard_concurrency(samples, seed),
            handshaking(samples, seed),
            expansion(samples, seed),
            idling(samples, seed),
            inclusion(samples, seed),
            rdp,
            rsp,
            basic_forms(samples, seed),
            linear_forms(samples, seed),
        ],
        coincidence: coincidence(samples, seed),
    }
}

/// Whether `t` contains a recursion constant or iteration.
pub fn is_recursive(t: &Term) -> bool {
    t.any_node(false, &mut |n| matches!(n.node(), Node::Rec(..) | Node::TimeIter(..)))
}

/// Explore a single term, for callers that only need the graph size.
pub fn state_count(t: &Term) -> Result<usize, String> {
    let t = prepare(t).map_err(|e| e.to_string())?;
    explore(&sem(), &t, DEFAULT_STATE_BOUND).map(|l| l.len()).map_err(|e| e.to_string())
}
