//! Explicit state graphs for the two-phase semantics.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::canon::canonicalize;
use crate::sos::Sem;
use crate::term::{Action, Term};
use crate::Error;

pub type StateId = usize;

pub const DEFAULT_MAX_STATES: usize = 100_000;

/// Default state bound, overridable through `DRTCALC_MAX_STATES`.
pub fn default_max_states() -> usize {
    std::env::var("DRTCALC_MAX_STATES").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_STATES)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum State {
    Term(Term),
    /// Successful termination.
    Tick,
}

/// Two-phase transition system: labelled action edges plus the partial,
/// deterministic idling map.
#[derive(Clone, Debug)]
pub struct Lts {
    states: Vec<State>,
    index: HashMap<Term, StateId>,
    tick: Option<StateId>,
    edges: Vec<Vec<(Action, StateId)>>,
    sigma: Vec<Option<StateId>>,
    pub root: StateId,
}

impl Lts {
    pub fn len(&self) -> usize {
        self.states.len()
    }
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
    pub fn state(&self, s: StateId) -> &State {
        &self.states[s]
    }
    pub fn term(&self, s: StateId) -> Option<&Term> {
        match &self.states[s] {
            State::Term(t) => Some(t),
            State::Tick => None,
        }
    }
    pub fn is_tick(&self, s: StateId) -> bool {
        self.tick == Some(s)
    }
    pub fn tick(&self) -> Option<StateId> {
        self.tick
    }
    pub fn edges(&self, s: StateId) -> &[(Action, StateId)] {
        &self.edges[s]
    }
    pub fn sigma(&self, s: StateId) -> Option<StateId> {
        self.sigma[s]
    }
    pub fn lookup(&self, t: &Term) -> Option<StateId> {
        self.index.get(&canonicalize(t)).copied()
    }
    pub fn action_edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
    pub fn sigma_edge_count(&self) -> usize {
        self.sigma.iter().filter(|s| s.is_some()).count()
    }

    /// The maximal idling chain from `s` and the period of the cycle it
    /// ends in (0 if the chain stops).
    pub fn sigma_lasso(&self, s: StateId) -> (Vec<StateId>, usize) {
        let mut pos = HashMap::new();
        let mut path = Vec::new();
        let mut cur = Some(s);
        while let Some(c) = cur {
            if let Some(&i) = pos.get(&c) {
                return (path.clone(), path.len() - i);
            }
            pos.insert(c, path.len());
            path.push(c);
            cur = self.sigma[c];
        }
        (path, 0)
    }

    /// States reachable from `s` by action and idling edges.
    pub fn reachable(&self, s: StateId) -> Vec<StateId> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        let mut stack = vec![s];
        while let Some(c) = stack.pop() {
            if std::mem::replace(&mut seen[c], true) {
                continue;
            }
            out.push(c);
            for &(_, t) in &self.edges[c] {
                stack.push(t);
            }
            if let Some(t) = self.sigma[c] {
                stack.push(t);
            }
        }
        out.sort_unstable();
        out
    }

    /// Least fixpoint of activeness over all states.
    pub fn activeness(&self) -> Vec<bool> {
        let mut act = vec![false; self.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..self.len() {
                if act[s] {
                    continue;
                }
                let a = self.edges[s].iter().any(|(l, t)| match l {
                    Action::Obs(_) => true,
                    _ => self.is_tick(*t) || act[*t],
                });
                if a {
                    act[s] = true;
                    changed = true;
                }
            }
        }
        act
    }

    /// Text dump of the part reachable from `root`, renumbered in order.
    pub fn dump(&self) -> String {
        let reach = self.reachable(self.root);
        let mut order: Vec<StateId> = vec![self.root];
        order.extend(reach.iter().copied().filter(|&s| s != self.root));
        let mut id = vec![usize::MAX; self.len()];
        for (i, &s) in order.iter().enumerate() {
            id[s] = i;
        }
        let mut lines = Vec::new();
        let mut act = Vec::new();
        let mut sig = Vec::new();
        for &s in &order {
            let text = match &self.states[s] {
                State::Term(t) => t.to_string(),
                State::Tick => "TICK".to_string(),
            };
            lines.push(format!("s{}: {}", id[s], text));
            let mut es: Vec<(usize, String)> =
                self.edges[s].iter().map(|(l, t)| (id[*t], l.name().to_string())).collect();
            es.sort();
            for (t, l) in es {
                act.push(format!("s{} -{}-> s{}", id[s], l, t));
            }
            if let Some(t) = self.sigma[s] {
                sig.push(format!("s{} -SIGMA-> s{}", id[s], id[t]));
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "lts {} {} {} root=0", order.len(), act.len(), sig.len());
        for l in lines.iter().chain(act.iter()).chain(sig.iter()) {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

/// Incremental breadth-first exploration; several roots may share a graph.
pub struct Explorer<'a> {
    sem: &'a Sem,
    lts: Lts,
    max_states: usize,
}

impl<'a> Explorer<'a> {
    pub fn new(sem: &'a Sem, max_states: usize) -> Explorer<'a> {
        Explorer {
            sem,
            lts: Lts { states: Vec::new(), index: HashMap::new(), tick: None, edges: Vec::new(), sigma: Vec::new(), root: 0 },
            max_states,
        }
    }

    fn intern(&mut self, t: Option<Term>, queue: &mut VecDeque<StateId>) -> Result<StateId, Error> {
        let l = &mut self.lts;
        let id = match t {
            None => {
                if let Some(id) = l.tick {
                    return Ok(id);
                }
                let id = l.states.len();
                l.states.push(State::Tick);
                l.tick = Some(id);
                id
            }
            Some(t) => {
                if let Some(&id) = l.index.get(&t) {
                    return Ok(id);
                }
                let id = l.states.len();
                l.index.insert(t.clone(), id);
                l.states.push(State::Term(t));
                queue.push_back(id);
                id
            }
        };
        l.edges.push(Vec::new());
        l.sigma.push(None);
        if l.states.len() > self.max_states {
            return Err(Error::StateBound(self.max_states));
        }
        Ok(id)
    }

    /// Add `t` and everything reachable from it; returns its state.
    pub fn add(&mut self, t: &Term) -> Result<StateId, Error> {
        let mut queue = VecDeque::new();
        let root = self.intern(Some(canonicalize(t)), &mut queue)?;
        while let Some(s) = queue.pop_front() {
            let term = match &self.lts.states[s] {
                State::Term(t) => t.clone(),
                State::Tick => continue,
            };
            let steps = self.sem.steps(&term)?;
            let mut es = Vec::with_capacity(steps.len());
            for st in steps.iter() {
                let tgt = self.intern(st.target.clone(), &mut queue)?;
                es.push((st.label.clone(), tgt));
            }
            es.sort();
            es.dedup();
            self.lts.edges[s] = es;
            if let Some(n) = self.sem.sigma(&term)? {
                let tgt = self.intern(Some(n), &mut queue)?;
                self.lts.sigma[s] = Some(tgt);
            }
        }
        Ok(root)
    }

    pub fn finish(mut self, root: StateId) -> Lts {
        self.lts.root = root;
        self.lts
    }
}

pub fn explore(sem: &Sem, t: &Term, max_states: usize) -> Result<Lts, Error> {
    let mut ex = Explorer::new(sem, max_states);
    let r = ex.add(t)?;
    Ok(ex.finish(r))
}

/// Explore two terms into one graph.
pub fn explore_pair(sem: &Sem, t1: &Term, t2: &Term, max_states: usize) -> Result<(Lts, StateId, StateId), Error> {
    let mut ex = Explorer::new(sem, max_states);
    let a = ex.add(t1)?;
    let b = ex.add(t2)?;
    Ok((ex.finish(a), a, b))
}

/// Transition system without time: action edges only.
#[derive(Clone, Debug)]
pub struct UntimedLts {
    pub edges: Vec<Vec<(Action, StateId)>>,
    pub tick: Option<StateId>,
    pub root: StateId,
}

impl UntimedLts {
    pub fn len(&self) -> usize {
        self.edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Time-free projection: every state gets the action edges of all its
/// idling derivatives; idling edges are dropped. State numbering is kept.
pub fn time_free_project(l: &Lts) -> UntimedLts {
    let mut edges = Vec::with_capacity(l.len());
    for s in 0..l.len() {
        let (path, _) = l.sigma_lasso(s);
        let mut es: Vec<(Action, StateId)> = path.iter().flat_map(|&d| l.edges(d).iter().cloned()).collect();
        es.sort();
        es.dedup();
        edges.push(es);
    }
    UntimedLts { edges, tick: l.tick, root: l.root }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::ActionTable;

    fn sem() -> Sem {
        Sem::new(ActionTable::new())
    }

    #[test]
    fn sequential_chain() {
        let s = sem();
        let l = explore(&s, &Term::seq(Term::u("a"), Term::u("b")), 100).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l.action_edge_count(), 2);
        assert_eq!(l.sigma_edge_count(), 0);
    }

    #[test]
    fn delayable_action_graph() {
        let s = sem();
        let l = explore(&s, &Term::delayable(Action::obs("a")), 100).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.sigma(l.root), Some(l.root));
        assert_eq!(l.sigma_lasso(l.root), (vec![l.root], 1));
    }

    #[test]
    fn lasso_of_delays() {
        let s = sem();
        let l = explore(&s, &Term::delay_n(2, Term::u("a")), 100).unwrap();
        let (p, c) = l.sigma_lasso(l.root);
        assert_eq!((p.len(), c), (3, 0));
        let tick = l.tick().unwrap();
        assert_eq!(l.sigma_lasso(tick), (vec![tick], 0));
    }

    #[test]
    fn bound_trips() {
        let s = sem();
        // X = a.(X || b) grows without bound.
        let x = Term::var("X");
        let spec = crate::term::Spec::single("X", Term::seq(Term::u("a"), Term::par(x, Term::u("b"))));
        let err = explore(&s, &spec.constant("X"), 100).unwrap_err();
        assert_eq!(err, Error::StateBound(100));
    }

    #[test]
    fn dump_shape() {
        let s = sem();
        let l = explore(&s, &Term::alt(Term::u("a"), Term::delay(Term::u("b"))), 100).unwrap();
        let d = l.dump();
        let mut lines = d.lines();
        assert_eq!(lines.next(), Some("lts 3 2 1 root=0"));
        assert!(d.contains("s0 -SIGMA-> s"));
        assert!(d.contains(": TICK"));
    }

    #[test]
    fn projection_saturates_idling() {
        let s = sem();
        let l = explore(&s, &Term::alt(Term::u("a"), Term::delay(Term::u("b"))), 100).unwrap();
        let u = time_free_project(&l);
        let labels: Vec<String> = u.edges[u.root].iter().map(|(a, _)| a.name().to_string()).collect();
        assert_eq!(labels, vec!["a", "b"]);
    }
}
