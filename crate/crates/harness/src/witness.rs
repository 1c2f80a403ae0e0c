//! Independent re-check of a witness relation returned with a `yes`
//! verdict. Walks the graph directly and bounds stamps explicitly instead
//! of detecting repeated configurations.

use std::collections::{BTreeSet, HashSet};

use drtcalc_core::equiv::Relation;
use drtcalc_core::{Action, Lts};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Label<'a> {
    Act(&'a Action),
    Tick,
    Sigma,
}

struct View<'a> {
    l: &'a Lts,
    dead: usize,
    active: Vec<bool>,
}

impl<'a> View<'a> {
    fn new(l: &'a Lts) -> View<'a> {
        let mut active = l.activeness();
        active.push(false);
        View { l, dead: l.len(), active }
    }

    fn is_tau(lab: Label) -> bool {
        matches!(lab, Label::Act(Action::Tau))
    }

    /// Moves without idling.
    fn acts(&self, s: usize) -> Vec<(Label<'a>, usize)> {
        if s == self.dead {
            return vec![];
        }
        let mut v: Vec<(Label, usize)> = self.l.edges(s).iter().map(|(a, t)| (Label::Act(a), *t)).collect();
        if self.l.is_tick(s) {
            v.push((Label::Tick, self.dead));
        }
        v
    }

    fn moves(&self, s: usize) -> Vec<(Label<'a>, usize)> {
        let mut v = self.acts(s);
        if let Some(t) = self.sigma(s) {
            v.push((Label::Sigma, t));
        }
        v
    }

    fn sigma(&self, s: usize) -> Option<usize> {
        if s == self.dead {
            None
        } else {
            self.l.sigma(s)
        }
    }

    fn shift(&self, s: usize, k: usize) -> usize {
        let mut cur = s;
        for _ in 0..k {
            match self.sigma(cur) {
                Some(n) => cur = n,
                None => return self.dead,
            }
        }
        cur
    }
}

type Rel = HashSet<(usize, usize)>;

fn branching_ok(v: &View, r: &Rel, p: usize, q: usize, flip: bool) -> bool {
    let rel = |x: usize, y: usize| if flip { r.contains(&(y, x)) } else { r.contains(&(x, y)) };
    for (a, p1) in v.moves(p) {
        if View::is_tau(a) && rel(p1, q) {
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![q];
        let mut found = false;
        while let Some(u) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            if v.moves(u).iter().any(|&(b, w)| b == a && rel(p1, w)) {
                found = true;
                break;
            }
            for (b, w) in v.acts(u) {
                if View::is_tau(b) && rel(p, w) {
                    stack.push(w);
                }
            }
        }
        if !found {
            return false;
        }
    }
    true
}

fn exact_ok(v: &View, r: &Rel, p: usize, q: usize, with_sigma: bool) -> bool {
    let mv = |s| if with_sigma { v.moves(s) } else { v.acts(s) };
    mv(p).iter().all(|&(a, p1)| mv(q).iter().any(|&(b, q1)| a == b && r.contains(&(p1, q1))))
        && mv(q).iter().all(|&(b, q1)| mv(p).iter().any(|&(a, p1)| a == b && r.contains(&(p1, q1))))
}

/// Stamped transfer condition with stamps explicitly bounded.
fn stamped_ok(v: &View, r: &Rel, p: usize, q: usize, da: bool, bound: usize, flip: bool) -> bool {
    let rel = |x: usize, y: usize| if flip { r.contains(&(y, x)) } else { r.contains(&(x, y)) };
    let free = |w: usize| da && !v.active[w];
    let close = |start: BTreeSet<usize>, pk: usize| {
        let mut out = start.clone();
        let mut stack: Vec<usize> = start.into_iter().collect();
        while let Some(u) = stack.pop() {
            for (b, w) in v.acts(u) {
                if View::is_tau(b) && (free(w) || rel(pk, w)) && out.insert(w) {
                    stack.push(w);
                }
            }
        }
        out
    };
    // states the other side can be in after k slices
    let mut reach = close(BTreeSet::from([q]), p);
    let mut pk = p;
    for k in 0..=bound {
        let qk = v.shift(q, k);
        for (a, p1) in v.acts(pk) {
            if View::is_tau(a) && (free(p1) || rel(p1, qk)) {
                continue;
            }
            if !reach.iter().any(|&u| v.acts(u).iter().any(|&(b, w)| b == a && rel(p1, w))) {
                return false;
            }
        }
        let Some(next) = v.sigma(pk) else { return true };
        let start: BTreeSet<usize> = reach.iter().filter_map(|&u| v.sigma(u)).collect();
        reach = close(start, next);
        if reach.is_empty() {
            return false;
        }
        pk = next;
    }
    true
}

/// Re-check that `witness` contains `(s1, s2)` and satisfies the transfer
/// and root conditions of `relation` on `l`. The dead state is `l.len()`.
pub fn validate_witness(l: &Lts, relation: Relation, witness: &[(usize, usize)], s1: usize, s2: usize) -> Result<(), String> {
    let v = View::new(l);
    let r: Rel = witness.iter().copied().collect();
    if !r.contains(&(s1, s2)) {
        return Err("root pair missing from witness".into());
    }
    let bound = 4 * (l.len() + 1);
    for &(p, q) in &r {
        let ok = match relation {
            Relation::Strong => exact_ok(&v, &r, p, q, true),
            Relation::Branching | Relation::RootedBranching => {
                branching_ok(&v, &r, p, q, false) && branching_ok(&v, &r, q, p, true)
            }
            Relation::RootedBranchingTs | Relation::DormancyAware => {
                let da = relation == Relation::DormancyAware;
                stamped_ok(&v, &r, p, q, da, bound, false) && stamped_ok(&v, &r, q, p, da, bound, true)
            }
            Relation::UntimedRooted => return Err("untimed witnesses live on the projected graph".into()),
        };
        if !ok {
            return Err(format!("transfer condition fails at (s{p}, s{q})"));
        }
    }
    match relation {
        Relation::RootedBranching => {
            let chain = |s: usize| {
                let mut out = vec![s];
                while let Some(n) = v.sigma(*out.last().unwrap()) {
                    if out.contains(&n) {
                        break;
                    }
                    out.push(n);
                }
                out
            };
            for x in chain(s1) {
                for y in chain(s2) {
                    if r.contains(&(x, y)) && !exact_ok(&v, &r, x, y, true) {
                        return Err(format!("root condition fails at (s{x}, s{y})"));
                    }
                }
            }
        }
        Relation::RootedBranchingTs | Relation::DormancyAware => {
            for k in 0..=bound {
                let (x, y) = (v.shift(s1, k), v.shift(s2, k));
                if x == v.dead && y == v.dead {
                    break;
                }
                if !exact_ok(&v, &r, x, y, false) {
                    return Err(format!("ts-root condition fails at stamp {k}"));
                }
            }
        }
        _ => {}
    }
    Ok(())
}
