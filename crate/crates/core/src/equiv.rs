//! Equivalence checking on finite graphs by greatest-fixpoint elimination
//! of state pairs.
//!
//! Successful termination gets an explicit marker: the terminated state has
//! a `TICK` step to a synthetic dead state. This keeps `u(a)` apart from
//! `u(a) . delta`. The dead state also stands for the shift of a state that
//! cannot idle.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::lts::{Lts, StateId, UntimedLts};
use crate::term::Action;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Strong,
    Branching,
    RootedBranching,
    RootedBranchingTs,
    DormancyAware,
    UntimedRooted,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Strong,
        Relation::Branching,
        Relation::RootedBranching,
        Relation::RootedBranchingTs,
        Relation::DormancyAware,
        Relation::UntimedRooted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Strong => "strong",
            Relation::Branching => "b",
            Relation::RootedBranching => "rb",
            Relation::RootedBranchingTs => "rb-ts",
            Relation::DormancyAware => "da-rb",
            Relation::UntimedRooted => "untimed-rb",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub relation: String,
    pub answer: Answer,
    pub witness_pairs: usize,
    #[serde(skip)]
    pub witness: Vec<(StateId, StateId)>,
    pub evidence: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

const TAU: u32 = 0;
const TICK: u32 = 1;
const SIGMA: u32 = u32::MAX;

/// Working view of a graph: integer labels, explicit termination marker
/// and the dead state (always the last index).
pub struct Graph {
    edges: Vec<Vec<(u32, usize)>>,
    sigma: Vec<Option<usize>>,
    active: Vec<bool>,
    labels: Vec<String>,
    dead: usize,
    lassos: Vec<(Vec<usize>, usize)>,
}

fn label_table() -> (Vec<String>, std::collections::HashMap<String, u32>) {
    let labels = vec!["tau".to_string(), "TICK".to_string()];
    let mut m = std::collections::HashMap::new();
    m.insert("tau".to_string(), TAU);
    (labels, m)
}

impl Graph {
    fn build(edges_in: &[Vec<(Action, StateId)>], sigma_in: Vec<Option<usize>>, tick: Option<StateId>) -> Graph {
        let n = edges_in.len();
        let dead = n;
        let (mut labels, mut ids) = label_table();
        let mut edges = Vec::with_capacity(n + 1);
        for es in edges_in {
            let mut v = Vec::with_capacity(es.len());
            for (a, t) in es {
                let id = match a {
                    Action::Tau => TAU,
                    _ => *ids.entry(a.name().to_string()).or_insert_with(|| {
                        labels.push(a.name().to_string());
                        (labels.len() - 1) as u32
                    }),
                };
                v.push((id, *t));
            }
            edges.push(v);
        }
        edges.push(Vec::new());
        if let Some(t) = tick {
            edges[t].push((TICK, dead));
        }
        let mut sigma = sigma_in;
        sigma.push(None);
        let mut active = vec![false; n + 1];
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if active[s] {
                    continue;
                }
                let a = edges[s].iter().any(|&(l, t)| match l {
                    TAU => Some(t) == tick || active[t],
                    TICK => false,
                    _ => true,
                });
                if a {
                    active[s] = true;
                    changed = true;
                }
            }
        }
        let lassos = (0..=n).map(|s| lasso(&sigma, s)).collect();
        Graph { edges, sigma, active, labels, dead, lassos }
    }

    pub fn from_lts(l: &Lts) -> Graph {
        let edges: Vec<Vec<(Action, StateId)>> = (0..l.len()).map(|s| l.edges(s).to_vec()).collect();
        let sigma = (0..l.len()).map(|s| l.sigma(s)).collect();
        Graph::build(&edges, sigma, l.tick())
    }

    pub fn from_untimed(u: &UntimedLts) -> Graph {
        Graph::build(&u.edges, vec![None; u.len()], u.tick)
    }

    pub fn dead(&self) -> usize {
        self.dead
    }

    fn label(&self, l: u32) -> &str {
        if l == SIGMA {
            "SIGMA"
        } else {
            &self.labels[l as usize]
        }
    }

    /// The `k`-th idling derivative of `s`, or the dead state.
    fn shift(&self, s: usize, k: usize) -> usize {
        let (path, cyc) = &self.lassos[s];
        if k < path.len() {
            path[k]
        } else if *cyc > 0 {
            let start = path.len() - cyc;
            path[start + (k - start) % cyc]
        } else {
            self.dead
        }
    }

    fn reach(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.edges.len()];
        let mut stack = vec![s];
        let mut out = Vec::new();
        while let Some(c) = stack.pop() {
            if std::mem::replace(&mut seen[c], true) {
                continue;
            }
            out.push(c);
            stack.extend(self.edges[c].iter().map(|&(_, t)| t));
            if let Some(t) = self.sigma[c] {
                stack.push(t);
            }
        }
        out.push(self.dead);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edges including idling as a pseudo-label.
    fn moves(&self, s: usize) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.edges[s].iter().copied().chain(self.sigma[s].map(|t| (SIGMA, t)))
    }
}

fn lasso(sigma: &[Option<usize>], s: usize) -> (Vec<usize>, usize) {
    let mut path = Vec::new();
    let mut cur = Some(s);
    while let Some(c) = cur {
        if let Some(i) = path.iter().position(|&x| x == c) {
            let cyc = path.len() - i;
            return (path, cyc);
        }
        path.push(c);
        cur = sigma[c];
    }
    (path, 0)
}

/// Relation over `dom1 x dom2`, stored densely.
struct Rel {
    loc1: Vec<usize>,
    loc2: Vec<usize>,
    n2: usize,
    bits: Vec<bool>,
}

impl Rel {
    fn full(n: usize, d1: &[usize], d2: &[usize]) -> Rel {
        let mut loc1 = vec![usize::MAX; n];
        let mut loc2 = vec![usize::MAX; n];
        for (i, &s) in d1.iter().enumerate() {
            loc1[s] = i;
        }
        for (j, &s) in d2.iter().enumerate() {
            loc2[s] = j;
        }
        Rel { loc1, loc2, n2: d2.len(), bits: vec![true; d1.len() * d2.len()] }
    }

    #[inline]
    fn get(&self, p: usize, q: usize) -> bool {
        let (i, j) = (self.loc1[p], self.loc2[q]);
        i != usize::MAX && j != usize::MAX && self.bits[i * self.n2 + j]
    }

    fn clear(&mut self, p: usize, q: usize) {
        let (i, j) = (self.loc1[p], self.loc2[q]);
        self.bits[i * self.n2 + j] = false;
    }
}

/// Why a pair fails; rendered only for the final report.
#[derive(Clone, Debug)]
struct Failure {
    what: &'static str,
    from: usize,
    label: u32,
    to: usize,
    stamp: usize,
    swapped: bool,
}

impl Failure {
    fn new(what: &'static str, from: usize, label: u32, to: usize, stamp: usize) -> Failure {
        Failure { what, from, label, to, stamp, swapped: false }
    }
    fn render(&self, g: &Graph, name: &dyn Fn(usize) -> String) -> String {
        let side = if self.swapped { "right" } else { "left" };
        if self.label == SIGMA && self.what == "idling" {
            return format!("{side} state {} idles {} slice(s) but the other side cannot follow", name(self.from), self.stamp);
        }
        format!(
            "{side}: {} -{}[{}]-> {} {}",
            name(self.from),
            g.label(self.label),
            self.stamp,
            name(self.to),
            self.what
        )
    }
}

type Check<'a> = dyn Fn(&Graph, usize, usize, &dyn Fn(usize, usize) -> bool) -> Option<Failure> + 'a;

fn both_directions(g: &Graph, p: usize, q: usize, rel: &Rel, dir: &Check) -> Option<Failure> {
    if let Some(f) = dir(g, p, q, &|x, y| rel.get(x, y)) {
        return Some(f);
    }
    dir(g, q, p, &|x, y| rel.get(y, x)).map(|mut f| {
        f.swapped = true;
        f
    })
}

fn greatest(g: &Graph, s1: usize, s2: usize, dir: &Check) -> (Rel, Vec<usize>, Vec<usize>) {
    let d1 = g.reach(s1);
    let d2 = g.reach(s2);
    let mut rel = Rel::full(g.edges.len(), &d1, &d2);
    loop {
        let mut changed = false;
        for &p in &d1 {
            for &q in &d2 {
                if rel.get(p, q) && both_directions(g, p, q, &rel, dir).is_some() {
                    rel.clear(p, q);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (rel, d1, d2)
}

fn strong_dir(g: &Graph, p: usize, q: usize, rel: &dyn Fn(usize, usize) -> bool) -> Option<Failure> {
    for (a, p1) in g.moves(p) {
        if !g.moves(q).any(|(b, q1)| a == b && rel(p1, q1)) {
            return Some(Failure::new("has no matching step", p, a, p1, 0));
        }
    }
    None
}

/// Silent moves from `q` through states related to `p`.
fn tau_closure(g: &Graph, p: usize, q: usize, rel: &dyn Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut out = vec![q];
    let mut i = 0;
    while i < out.len() {
        let u = out[i];
        i += 1;
        for &(l, w) in &g.edges[u] {
            if l == TAU && !out.contains(&w) && rel(p, w) {
                out.push(w);
            }
        }
    }
    out
}

fn branching_dir(g: &Graph, p: usize, q: usize, rel: &dyn Fn(usize, usize) -> bool) -> Option<Failure> {
    let mut closure: Option<Vec<usize>> = None;
    for (a, p1) in g.moves(p) {
        if a == TAU && rel(p1, q) {
            continue;
        }
        let c = closure.get_or_insert_with(|| tau_closure(g, p, q, rel));
        if !c.iter().any(|&u| g.moves(u).any(|(b, v)| b == a && rel(p1, v))) {
            return Some(Failure::new("cannot be matched after silent steps", p, a, p1, 0));
        }
    }
    None
}

/// Exact matching of every move, the root condition.
fn root_dir(g: &Graph, p: usize, q: usize, rel: &dyn Fn(usize, usize) -> bool) -> Option<Failure> {
    strong_dir(g, p, q, rel).map(|mut f| {
        f.what = "is not matched exactly (root condition)";
        f
    })
}

/// Stamped transfer condition, with stamps quantified over the idling
/// lasso of `p` together with the set of states the other side can occupy
/// after the same number of slices. With `da` set, silent steps into
/// dormant states carry no relation obligation.
fn stamped_dir(g: &Graph, p: usize, q: usize, rel: &dyn Fn(usize, usize) -> bool, da: bool) -> Option<Failure> {
    let allowed = |pk: usize, w: usize| (da && !g.active[w]) || rel(pk, w);
    let closure = |pk: usize, start: Vec<usize>| {
        let mut out = start;
        let mut i = 0;
        while i < out.len() {
            let u = out[i];
            i += 1;
            for &(l, w) in &g.edges[u] {
                if l == TAU && !out.contains(&w) && allowed(pk, w) {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    };
    let mut seen: HashSet<(usize, usize, Vec<usize>)> = HashSet::new();
    let mut k = 0;
    let mut pk = p;
    let mut reach = closure(p, vec![q]);
    loop {
        let qk = g.shift(q, k);
        for &(a, p1) in &g.edges[pk] {
            if a == TAU && ((da && !g.active[p1]) || rel(p1, qk)) {
                continue;
            }
            if !reach.iter().any(|&u| g.edges[u].iter().any(|&(b, v)| b == a && rel(p1, v))) {
                return Some(Failure::new("cannot be matched by a stamped path", pk, a, p1, k));
            }
        }
        let next = g.sigma[pk]?;
        let mut start: Vec<usize> = reach.iter().filter_map(|&u| g.sigma[u]).collect();
        start.sort_unstable();
        start.dedup();
        let nreach = closure(next, start);
        if nreach.is_empty() {
            return Some(Failure::new("idling", p, SIGMA, next, k + 1));
        }
        k += 1;
        if !seen.insert((next, g.shift(q, k), nreach.clone())) {
            return None;
        }
        pk = next;
        reach = nreach;
    }
}

/// Stamped steps matched exactly over the synchronized lassos.
fn ts_root(g: &Graph, p: usize, q: usize, rel: &Rel) -> Option<Failure> {
    let mut seen = HashSet::new();
    let mut k = 0;
    loop {
        let (pk, qk) = (g.shift(p, k), g.shift(q, k));
        if pk == g.dead && qk == g.dead {
            return None;
        }
        if !seen.insert((pk, qk)) {
            return None;
        }
        for &(a, p1) in &g.edges[pk] {
            if !g.edges[qk].iter().any(|&(b, q1)| a == b && rel.get(p1, q1)) {
                return Some(Failure::new("is not matched exactly (root condition)", pk, a, p1, k));
            }
        }
        for &(a, q1) in &g.edges[qk] {
            if !g.edges[pk].iter().any(|&(b, p1)| a == b && rel.get(p1, q1)) {
                let mut f = Failure::new("is not matched exactly (root condition)", qk, a, q1, k);
                f.swapped = true;
                return Some(f);
            }
        }
        k += 1;
    }
}

fn verdict(
    relation: Relation,
    answer: Answer,
    rel: &Rel,
    d1: &[usize],
    d2: &[usize],
    evidence: Vec<String>,
    note: Option<String>,
) -> Verdict {
    let mut witness = Vec::new();
    if answer == Answer::Yes {
        for &p in d1 {
            for &q in d2 {
                if rel.get(p, q) {
                    witness.push((p, q));
                }
            }
        }
    }
    Verdict { relation: relation.name().to_string(), answer, witness_pairs: witness.len(), witness, evidence, note }
}

fn namer(g: &Graph) -> impl Fn(usize) -> String + '_ {
    move |s| if s == g.dead { "DEAD".to_string() } else { format!("s{s}") }
}

fn eliminated(g: &Graph, s1: usize, s2: usize, rel: &Rel, dir: &Check) -> Vec<String> {
    let mut ev = vec![format!("pair (s{s1}, s{s2}) is not in the greatest relation")];
    if let Some(f) = both_directions(g, s1, s2, rel, dir) {
        ev.push(f.render(g, &namer(g)));
    }
    ev
}

/// Decide `relation` between two states of `g`.
pub fn check_graph(g: &Graph, relation: Relation, s1: usize, s2: usize) -> Verdict {
    let strong: &Check = &strong_dir;
    let branching: &Check = &branching_dir;
    let ts: &Check = &|g, p, q, r| stamped_dir(g, p, q, r, false);
    let da: &Check = &|g, p, q, r| stamped_dir(g, p, q, r, true);
    match relation {
        Relation::Strong | Relation::Branching => {
            let dir = if relation == Relation::Strong { strong } else { branching };
            let (rel, d1, d2) = greatest(g, s1, s2, dir);
            if rel.get(s1, s2) {
                verdict(relation, Answer::Yes, &rel, &d1, &d2, vec![], None)
            } else {
                let ev = eliminated(g, s1, s2, &rel, dir);
                verdict(relation, Answer::No, &rel, &d1, &d2, ev, None)
            }
        }
        Relation::UntimedRooted => {
            let (rel, d1, d2) = greatest(g, s1, s2, branching);
            if !rel.get(s1, s2) {
                let ev = eliminated(g, s1, s2, &rel, branching);
                return verdict(relation, Answer::No, &rel, &d1, &d2, ev, None);
            }
            match both_directions(g, s1, s2, &rel, &root_dir) {
                None => verdict(relation, Answer::Yes, &rel, &d1, &d2, vec![], None),
                Some(f) => {
                    let ev = vec![f.render(g, &namer(g))];
                    verdict(relation, Answer::No, &rel, &d1, &d2, ev, None)
                }
            }
        }
        Relation::RootedBranching => {
            let (rel, d1, d2) = greatest(g, s1, s2, branching);
            if !rel.get(s1, s2) {
                let ev = eliminated(g, s1, s2, &rel, branching);
                return verdict(relation, Answer::No, &rel, &d1, &d2, ev, None);
            }
            let (p1, _) = &g.lassos[s1];
            let (p2, _) = &g.lassos[s2];
            for &x in p1 {
                for &y in p2 {
                    if rel.get(x, y) {
                        if let Some(f) = both_directions(g, x, y, &rel, &root_dir) {
                            let ev = vec![f.render(g, &namer(g))];
                            let note = "related in the greatest branching bisimulation, but an idling \
                                        derivative pair fails the root condition; a smaller witness may exist"
                                .to_string();
                            return verdict(relation, Answer::Unknown, &rel, &d1, &d2, ev, Some(note));
                        }
                    }
                }
            }
            verdict(relation, Answer::Yes, &rel, &d1, &d2, vec![], None)
        }
        Relation::RootedBranchingTs | Relation::DormancyAware => {
            let dir = if relation == Relation::DormancyAware { da } else { ts };
            let (rel, d1, d2) = greatest(g, s1, s2, dir);
            if !rel.get(s1, s2) {
                let ev = eliminated(g, s1, s2, &rel, dir);
                return verdict(relation, Answer::No, &rel, &d1, &d2, ev, None);
            }
            match ts_root(g, s1, s2, &rel) {
                None => verdict(relation, Answer::Yes, &rel, &d1, &d2, vec![], None),
                Some(f) => {
                    let ev = vec![f.render(g, &namer(g))];
                    verdict(relation, Answer::No, &rel, &d1, &d2, ev, None)
                }
            }
        }
    }
}

/// Decide `relation` between two states of a two-phase graph. The untimed
/// relation is decided on the time-free projection.
pub fn check(l: &Lts, relation: Relation, s1: StateId, s2: StateId) -> Verdict {
    let g = if relation == Relation::UntimedRooted {
        Graph::from_untimed(&crate::lts::time_free_project(l))
    } else {
        Graph::from_lts(l)
    };
    check_graph(&g, relation, s1, s2)
}

pub fn strong_bisim(l: &Lts, s1: StateId, s2: StateId) -> Verdict {
    check(l, Relation::Strong, s1, s2)
}
pub fn branching_bisim_tp(l: &Lts, s1: StateId, s2: StateId) -> Verdict {
    check(l, Relation::Branching, s1, s2)
}
pub fn rooted_branching_tp(l: &Lts, s1: StateId, s2: StateId) -> Verdict {
    check(l, Relation::RootedBranching, s1, s2)
}
pub fn rooted_branching_ts(l: &Lts, s1: StateId, s2: StateId) -> Verdict {
    check(l, Relation::RootedBranchingTs, s1, s2)
}
pub fn dormancy_aware_rb(l: &Lts, s1: StateId, s2: StateId) -> Verdict {
    check(l, Relation::DormancyAware, s1, s2)
}
pub fn rooted_branching_untimed(u: &UntimedLts, s1: StateId, s2: StateId) -> Verdict {
    check_graph(&Graph::from_untimed(u), Relation::UntimedRooted, s1, s2)
}
