use std::collections::{BTreeSet, HashSet, VecDeque};

use drtcalc_core::equiv::{self, Relation, Verdict};
use drtcalc_core::lts::{default_max_states, explore, explore_pair};
use drtcalc_core::model::prepare;
use drtcalc_core::{Action, Lts, Model, Term};
use serde::Serialize;

use crate::model::{build_par_model, reference_specs, ParParams};
use crate::ParError;

fn proc(m: &Model, name: &str) -> Term {
    m.proc(name).cloned().expect("process defined by the builder")
}

fn compare(m: &Model, relation: Relation, a: &Term, b: &Term) -> Result<(Verdict, usize), ParError> {
    let (l, x, y) = explore_pair(&m.sem(), &prepare(a)?, &prepare(b)?, default_max_states())?;
    Ok((equiv::check(&l, relation, x, y), l.len()))
}

/// Time-free behaviour of the hidden protocol against the one-place buffer.
/// Expected `yes` iff the time-out exceeds the protocol cycle.
pub fn check_functional(p: &ParParams) -> Result<Verdict, ParError> {
    let sys = build_par_model(p)?;
    // the buffer does not depend on the timing, so build it from a sound
    // parameter set when the time-out is premature
    let ok = ParParams { t_sp: p.t_sp.max(p.cycle() + 1), ..*p };
    let refs = reference_specs(&ok)?;
    Ok(compare(&sys, Relation::UntimedRooted, &proc(&sys, "Hidden"), &proc(&refs, "B"))?.0)
}

/// Expansion fidelity: the hidden protocol against the hidden expanded
/// specification under rooted time-stamped branching bisimilarity.
pub fn check_expansion(p: &ParParams) -> Result<Verdict, ParError> {
    let sys = build_par_model(p)?;
    let refs = reference_specs(p)?;
    Ok(compare(&sys, Relation::RootedBranchingTs, &proc(&sys, "Hidden"), &proc(&refs, "X"))?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct PerformanceVerdicts {
    /// Hidden system against the abstracted specification, rb-ts.
    pub system_x2_rbts: Verdict,
    /// Hidden system against the simplified specification, da-rb.
    pub system_x3_da: Verdict,
    pub x2_x3_rbts: Verdict,
    pub x2_x3_da: Verdict,
    /// The time-iteration form against the simplified specification, da-rb.
    pub x3_iterated_da: Verdict,
}

impl PerformanceVerdicts {
    /// The expected pattern: everything equivalent except the two
    /// specifications under rb-ts.
    pub fn as_expected(&self) -> bool {
        self.system_x2_rbts.is_yes()
            && self.system_x3_da.is_yes()
            && self.x2_x3_rbts.answer == drtcalc_core::Answer::No
            && self.x2_x3_da.is_yes()
            && self.x3_iterated_da.is_yes()
    }
}

pub fn check_performance(p: &ParParams) -> Result<PerformanceVerdicts, ParError> {
    let sys = build_par_model(p)?;
    let refs = reference_specs(p)?;
    let hidden = proc(&sys, "Hidden");
    let (x2, x3) = (proc(&refs, "X2"), proc(&refs, "X3"));
    Ok(PerformanceVerdicts {
        system_x2_rbts: compare(&sys, Relation::RootedBranchingTs, &hidden, &x2)?.0,
        system_x3_da: compare(&sys, Relation::DormancyAware, &hidden, &x3)?.0,
        x2_x3_rbts: compare(&refs, Relation::RootedBranchingTs, &x2, &x3)?.0,
        x2_x3_da: compare(&refs, Relation::DormancyAware, &x2, &x3)?.0,
        x3_iterated_da: compare(&refs, Relation::DormancyAware, &x3, &proc(&refs, "X3s"))?.0,
    })
}

fn hidden_lts(p: &ParParams) -> Result<Lts, ParError> {
    p.validate()?;
    let sys = build_par_model(p)?;
    Ok(explore(&sys.sem(), &prepare(&proc(&sys, "Hidden"))?, default_max_states())?)
}

fn has_prefix(a: &Action, prefix: &str) -> bool {
    matches!(a, Action::Obs(n) if n.starts_with(prefix))
}

/// Numbers of time slices after which a state with an `until` edge is
/// first reached from `start`, up to `horizon`.
fn first_arrivals(l: &Lts, start: usize, until: &str, horizon: u32) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(start, 0u32)]);
    while let Some((s, t)) = queue.pop_front() {
        if !seen.insert((s, t)) {
            continue;
        }
        if l.edges(s).iter().any(|(a, _)| has_prefix(a, until)) {
            out.insert(t);
            continue;
        }
        for (_, n) in l.edges(s) {
            queue.push_back((*n, t));
        }
        if t < horizon {
            if let Some(n) = l.sigma(s) {
                queue.push_back((n, t + 1));
            }
        }
    }
    out
}

/// For every `from` edge in the graph, the delays until the next `until`
/// edge is offered.
fn delays(l: &Lts, from: &str, until: &str, horizon: u32) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for s in 0..l.len() {
        for (a, n) in l.edges(s) {
            if has_prefix(a, from) {
                out.extend(first_arrivals(l, *n, until, horizon));
            }
        }
    }
    out
}

/// Achievable delays between consuming a datum and delivering it.
pub fn delivery_delays(p: &ParParams, horizon: u32) -> Result<BTreeSet<u32>, ParError> {
    p.require_cycle()?;
    Ok(delays(&hidden_lts(p)?, "r1(", "s2(", horizon))
}

/// Achievable delays between a delivery and readiness for the next datum.
pub fn post_delivery_gaps(p: &ParParams, horizon: u32) -> Result<BTreeSet<u32>, ParError> {
    p.require_cycle()?;
    Ok(delays(&hidden_lts(p)?, "s2(", "r1(", horizon))
}

pub fn first_delivery_time(p: &ParParams) -> Result<u32, ParError> {
    let horizon = p.t_s + p.t_k + p.t_r + p.t_sp;
    delivery_delays(p, horizon)?
        .into_iter()
        .next()
        .ok_or_else(|| ParError::InvalidParams("no delivery within one time-out".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Functional,
    Performance,
    SpecMatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParReport {
    pub params: ParParams,
    pub cycle_ok: bool,
    pub states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub performance: Option<PerformanceVerdicts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_delivery: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delivery_delays: Option<BTreeSet<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_delivery_gaps: Option<BTreeSet<u32>>,
    /// Whether the check passed: buffer equivalence, the expected
    /// performance pattern, or expansion fidelity.
    pub ok: bool,
}

/// Run one check and collect it, with state counts and, for a sound
/// time-out, the delay sets up to `horizon`.
pub fn run_report(p: &ParParams, kind: CheckKind, horizon: u32) -> Result<ParReport, ParError> {
    let l = hidden_lts(p)?;
    let mut r = ParReport {
        params: *p,
        cycle_ok: p.cycle_ok(),
        states: l.len(),
        functional: None,
        performance: None,
        expansion: None,
        first_delivery: None,
        delivery_delays: None,
        post_delivery_gaps: None,
        ok: true,
    };
    match kind {
        CheckKind::Functional => {
            let v = check_functional(p)?;
            r.ok = v.is_yes();
            r.functional = Some(v);
        }
        CheckKind::Performance => {
            let v = check_performance(p)?;
            r.ok = v.as_expected();
            r.performance = Some(v);
            r.first_delivery = Some(first_delivery_time(p)?);
            r.delivery_delays = Some(delays(&l, "r1(", "s2(", horizon));
            r.post_delivery_gaps = Some(delays(&l, "s2(", "r1(", horizon));
        }
        CheckKind::SpecMatch => {
            let v = check_expansion(p)?;
            r.ok = v.is_yes();
            r.expansion = Some(v);
        }
    }
    Ok(r)
}
