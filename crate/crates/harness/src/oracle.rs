//! Test oracles that re-derive semantic facts along a different route than
//! the engine.

use std::collections::BTreeSet;

use drtcalc_core::lts::explore;
use drtcalc_core::sos::StampedStep;
use drtcalc_core::{Action, Error, Node, Sem, Term};

/// All idling successors derivable from the idling rules read as a
/// relation. Choice is treated as nested binary choice.
pub fn sigma_relational(sem: &Sem, t: &Term) -> Result<Vec<Term>, Error> {
    let one = |x: &Term| sigma_relational(sem, x);
    Ok(match t.node() {
        Node::Const(_) | Node::Timeout(_) => vec![],
        Node::Delay(x) => vec![x.clone()],
        Node::Alt(xs) => {
            let mut acc = one(&xs[0])?;
            for x in &xs[1..] {
                let sy = one(x)?;
                acc = match (acc.is_empty(), sy.is_empty()) {
                    (false, false) => {
                        let mut out = Vec::new();
                        for a in &acc {
                            for b in &sy {
                                out.push(Term::alt(a.clone(), b.clone()));
                            }
                        }
                        out
                    }
                    (false, true) => acc,
                    (true, _) => sy,
                };
            }
            acc
        }
        Node::Seq(x, y) => one(x)?.into_iter().map(|x1| Term::seq(x1, y.clone())).collect(),
        Node::Par(x, y) | Node::LeftMerge(x, y) | Node::CommMerge(x, y) => {
            let mut out = Vec::new();
            for x1 in one(x)? {
                for y1 in one(y)? {
                    out.push(t.with_children(vec![x1.clone(), y1]));
                }
            }
            out
        }
        Node::Encap(..) | Node::Abstr(..) => {
            let x = t.children()[0].clone();
            one(&x)?.into_iter().map(|x1| t.with_children(vec![x1])).collect()
        }
        Node::Shift(x) => {
            let mut out = Vec::new();
            for x1 in one(x)? {
                out.extend(one(&x1)?);
            }
            out
        }
        Node::TimeFree(_) => vec![t.clone()],
        Node::Rec(x, spec) => one(&sem.unfold(x, spec)?)?,
        Node::Var(_) | Node::TimeIter(..) => return Err(Error::Precondition("closed, expanded term expected".into())),
    })
}

/// Stamped transitions obtained by walking the relational idling oracle.
pub fn stamped_by_walk(sem: &Sem, t: &Term, bound: usize) -> Result<BTreeSet<StampedStep>, Error> {
    let mut out = BTreeSet::new();
    let mut cur = vec![t.clone()];
    for n in 0..=bound {
        let mut next = Vec::new();
        for c in &cur {
            for s in sem.steps(c)?.iter() {
                out.insert(StampedStep { label: s.label.clone(), stamp: n, target: s.target.clone() });
            }
            next.extend(sigma_relational(sem, c)?);
        }
        if next.is_empty() {
            break;
        }
        cur = next;
    }
    Ok(out)
}

/// Stamped transitions read off the explored graph through idling lassos.
pub fn stamped_from_graph(sem: &Sem, t: &Term, bound: usize) -> Result<BTreeSet<(Action, usize, Option<Term>)>, Error> {
    let l = explore(sem, t, 10_000)?;
    let (path, cyc) = l.sigma_lasso(l.root);
    let mut out = BTreeSet::new();
    for n in 0..=bound {
        let s = if n < path.len() {
            path[n]
        } else if cyc > 0 {
            let start = path.len() - cyc;
            path[start + (n - start) % cyc]
        } else {
            break;
        };
        for (a, tgt) in l.edges(s) {
            out.insert((a.clone(), n, l.term(*tgt).cloned()));
        }
    }
    Ok(out)
}

/// Outcome of the three-way stamped comparison for one term.
#[derive(Debug)]
pub struct IdlingCheck {
    pub deterministic: bool,
    pub walk_agrees: bool,
    pub graph_agrees: bool,
    pub stamps_idle: bool,
}

impl IdlingCheck {
    pub fn ok(&self) -> bool {
        self.deterministic && self.walk_agrees && self.graph_agrees && self.stamps_idle
    }
}

pub fn check_idling(sem: &Sem, t: &Term, bound: usize) -> Result<IdlingCheck, Error> {
    let t = drtcalc_core::canonicalize(t);
    let engine = sem.stamped_steps(&t, bound)?.steps;
    let walk = stamped_by_walk(sem, &t, bound)?;
    let mut deterministic = true;
    let mut cur = Some(t.clone());
    for _ in 0..=bound {
        let Some(c) = cur else { break };
        let rel = sigma_relational(sem, &c)?;
        let f = sem.sigma(&c)?;
        let rel: BTreeSet<Term> = rel.iter().map(drtcalc_core::canonicalize).collect();
        if rel.len() > 1 || rel.iter().next() != f.as_ref() {
            deterministic = false;
        }
        cur = f;
    }
    let canon = |s: &BTreeSet<StampedStep>| -> BTreeSet<(Action, usize, Option<Term>)> {
        s.iter().map(|x| (x.label.clone(), x.stamp, x.target.as_ref().map(drtcalc_core::canonicalize))).collect()
    };
    let graph = stamped_from_graph(sem, &t, bound)?;
    let mut stamps_idle = true;
    for s in &engine {
        if !sem.idling(&t, s.stamp)? {
            stamps_idle = false;
        }
    }
    Ok(IdlingCheck { deterministic, walk_agrees: canon(&engine) == canon(&walk), graph_agrees: canon(&engine) == graph, stamps_idle })
}
