//! Two-phase operational semantics: action steps in the current time slice
//! and the deterministic idling step to the next one.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::actions::ActionTable;
use crate::recursion::unfold;
use crate::term::{Action, Node, Spec, Sym, Term};
use crate::Error;

/// A current-slice transition. `target == None` is successful termination.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub label: Action,
    pub target: Option<Term>,
}

/// A transition in the `stamp`-th next time slice.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StampedStep {
    pub label: Action,
    pub stamp: usize,
    pub target: Option<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stamped {
    pub steps: BTreeSet<StampedStep>,
    /// The idling chain was still alive at the bound.
    pub open: bool,
}

const MAX_UNFOLD_DEPTH: usize = 2_000;
const MAX_LASSO: usize = 100_000;

/// Semantic context: the action table plus memo tables. Not shared across
/// threads; create one per analysis.
pub struct Sem {
    table: ActionTable,
    steps_memo: RefCell<HashMap<Term, Rc<Vec<Step>>>>,
    sigma_memo: RefCell<HashMap<Term, Option<Term>>>,
    unfold_memo: RefCell<HashMap<(Sym, Spec), Term>>,
    depth: Cell<usize>,
}

fn tgt_map(t: Option<Term>, f: impl FnOnce(Term) -> Term) -> Option<Term> {
    t.map(f)
}

impl Sem {
    pub fn new(table: ActionTable) -> Sem {
        Sem {
            table,
            steps_memo: RefCell::new(HashMap::new()),
            sigma_memo: RefCell::new(HashMap::new()),
            unfold_memo: RefCell::new(HashMap::new()),
            depth: Cell::new(0),
        }
    }

    pub fn table(&self) -> &ActionTable {
        &self.table
    }

    pub fn unfold(&self, x: &Sym, spec: &Spec) -> Result<Term, Error> {
        let key = (x.clone(), spec.clone());
        if let Some(t) = self.unfold_memo.borrow().get(&key) {
            return Ok(t.clone());
        }
        let t = unfold(x, spec)?;
        self.unfold_memo.borrow_mut().insert(key, t.clone());
        Ok(t)
    }

    fn enter(&self) -> Result<(), Error> {
        let d = self.depth.get() + 1;
        if d > MAX_UNFOLD_DEPTH {
            self.depth.set(0);
            return Err(Error::Unguarded { var: "<unproductive recursion>".into(), depth: MAX_UNFOLD_DEPTH });
        }
        self.depth.set(d);
        Ok(())
    }

    fn leave(&self) {
        self.depth.set(self.depth.get().saturating_sub(1));
    }

    /// All current-slice transitions, sorted.
    pub fn steps(&self, t: &Term) -> Result<Rc<Vec<Step>>, Error> {
        if let Some(s) = self.steps_memo.borrow().get(t) {
            return Ok(s.clone());
        }
        self.enter()?;
        let r = self.compute_steps(t);
        self.leave();
        let mut v = r?;
        v.sort();
        v.dedup();
        let v = Rc::new(v);
        self.steps_memo.borrow_mut().insert(t.clone(), v.clone());
        Ok(v)
    }

    fn comm_steps(&self, x: &Term, y: &Term, out: &mut Vec<Step>) -> Result<(), Error> {
        let sx = self.steps(x)?;
        let sy = self.steps(y)?;
        for a in sx.iter() {
            let Action::Obs(an) = &a.label else { continue };
            for b in sy.iter() {
                let Action::Obs(bn) = &b.label else { continue };
                if let Some(c) = self.table.comm(an, bn) {
                    let target = match (&a.target, &b.target) {
                        (Some(x1), Some(y1)) => Some(Term::par(x1.clone(), y1.clone())),
                        (Some(x1), None) => Some(x1.clone()),
                        (None, Some(y1)) => Some(y1.clone()),
                        (None, None) => None,
                    };
                    out.push(Step { label: Action::Obs(c.clone()), target });
                }
            }
        }
        Ok(())
    }

    fn compute_steps(&self, t: &Term) -> Result<Vec<Step>, Error> {
        let mut out = Vec::new();
        match t.node() {
            Node::Const(Action::Delta) => {}
            Node::Const(a) => out.push(Step { label: a.clone(), target: None }),
            Node::Alt(xs) => {
                for x in xs {
                    out.extend(self.steps(x)?.iter().cloned());
                }
            }
            Node::Seq(x, y) => {
                for s in self.steps(x)?.iter() {
                    let target = match &s.target {
                        Some(x1) => Term::seq(x1.clone(), y.clone()),
                        None => y.clone(),
                    };
                    out.push(Step { label: s.label.clone(), target: Some(target) });
                }
            }
            Node::Delay(_) => {}
            Node::Par(x, y) => {
                for s in self.steps(x)?.iter() {
                    let target = match &s.target {
                        Some(x1) => Term::par(x1.clone(), y.clone()),
                        None => y.clone(),
                    };
                    out.push(Step { label: s.label.clone(), target: Some(target) });
                }
                for s in self.steps(y)?.iter() {
                    let target = match &s.target {
                        Some(y1) => Term::par(x.clone(), y1.clone()),
                        None => x.clone(),
                    };
                    out.push(Step { label: s.label.clone(), target: Some(target) });
                }
                self.comm_steps(x, y, &mut out)?;
            }
            Node::LeftMerge(x, y) => {
                for s in self.steps(x)?.iter() {
                    let target = match &s.target {
                        Some(x1) => Term::par(x1.clone(), y.clone()),
                        None => y.clone(),
                    };
                    out.push(Step { label: s.label.clone(), target: Some(target) });
                }
            }
            Node::CommMerge(x, y) => self.comm_steps(x, y, &mut out)?,
            Node::Encap(h, x) => {
                for s in self.steps(x)?.iter() {
                    if let Action::Obs(a) = &s.label {
                        if h.contains(a) {
                            continue;
                        }
                    }
                    let target = tgt_map(s.target.clone(), |x1| Term::encap(h.clone(), x1));
                    out.push(Step { label: s.label.clone(), target });
                }
            }
            Node::Abstr(i, x) => {
                for s in self.steps(x)?.iter() {
                    let label = match &s.label {
                        Action::Obs(a) if i.contains(a) => Action::Tau,
                        l => l.clone(),
                    };
                    let target = tgt_map(s.target.clone(), |x1| Term::abstr(i.clone(), x1));
                    out.push(Step { label, target });
                }
            }
            Node::Timeout(x) => out.extend(self.steps(x)?.iter().cloned()),
            Node::Shift(x) => {
                if let Some(x1) = self.sigma(x)? {
                    out.extend(self.steps(&x1)?.iter().cloned());
                }
            }
            Node::TimeFree(x) => {
                for d in self.sigma_chain(x)? {
                    for s in self.steps(&d)?.iter() {
                        out.push(Step { label: s.label.clone(), target: tgt_map(s.target.clone(), Term::tf) });
                    }
                }
            }
            Node::TimeIter(..) => {
                return Err(Error::Precondition("time iteration must be expanded before exploration".into()))
            }
            Node::Var(x) => return Err(Error::IllFormed(format!("free variable {x}"))),
            Node::Rec(x, spec) => {
                let body = self.unfold(x, spec)?;
                out.extend(self.steps(&body)?.iter().cloned());
            }
        }
        Ok(out)
    }

    /// The unique idling successor, if the term can idle till the next slice.
    pub fn sigma(&self, t: &Term) -> Result<Option<Term>, Error> {
        if let Some(s) = self.sigma_memo.borrow().get(t) {
            return Ok(s.clone());
        }
        self.enter()?;
        let r = self.compute_sigma(t);
        self.leave();
        let r = r?;
        self.sigma_memo.borrow_mut().insert(t.clone(), r.clone());
        Ok(r)
    }

    fn both(&self, x: &Term, y: &Term, f: impl FnOnce(Term, Term) -> Term) -> Result<Option<Term>, Error> {
        match self.sigma(x)? {
            None => Ok(None),
            Some(x1) => Ok(self.sigma(y)?.map(|y1| f(x1, y1))),
        }
    }

    fn compute_sigma(&self, t: &Term) -> Result<Option<Term>, Error> {
        Ok(match t.node() {
            Node::Const(_) => None,
            Node::Alt(xs) => {
                let mut succ = Vec::new();
                for x in xs {
                    if let Some(x1) = self.sigma(x)? {
                        succ.push(x1);
                    }
                }
                if succ.is_empty() {
                    None
                } else {
                    Some(Term::sum(succ))
                }
            }
            Node::Seq(x, y) => self.sigma(x)?.map(|x1| Term::seq(x1, y.clone())),
            Node::Delay(x) => Some(x.clone()),
            Node::Par(x, y) => self.both(x, y, Term::par)?,
            Node::LeftMerge(x, y) => self.both(x, y, Term::lmerge)?,
            Node::CommMerge(x, y) => self.both(x, y, Term::cmerge)?,
            Node::Encap(h, x) => self.sigma(x)?.map(|x1| Term::encap(h.clone(), x1)),
            Node::Abstr(i, x) => self.sigma(x)?.map(|x1| Term::abstr(i.clone(), x1)),
            Node::Timeout(_) => None,
            Node::Shift(x) => match self.sigma(x)? {
                Some(x1) => self.sigma(&x1)?,
                None => None,
            },
            Node::TimeFree(_) => Some(t.clone()),
            Node::TimeIter(..) => {
                return Err(Error::Precondition("time iteration must be expanded before exploration".into()))
            }
            Node::Var(x) => return Err(Error::IllFormed(format!("free variable {x}"))),
            Node::Rec(x, spec) => {
                let body = self.unfold(x, spec)?;
                self.sigma(&body)?
            }
        })
    }

    /// The distinct idling derivatives of `t`, starting with `t` itself,
    /// up to the first repetition.
    pub fn sigma_chain(&self, t: &Term) -> Result<Vec<Term>, Error> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut cur = Some(t.clone());
        while let Some(c) = cur {
            if !seen.insert(c.clone()) {
                break;
            }
            if out.len() >= MAX_LASSO {
                return Err(Error::StateBound(MAX_LASSO));
            }
            cur = self.sigma(&c)?;
            out.push(c);
        }
        Ok(out)
    }

    /// The `n`-fold idling derivative, if it exists.
    pub fn sigma_n(&self, t: &Term, n: usize) -> Result<Option<Term>, Error> {
        let mut cur = t.clone();
        for _ in 0..n {
            match self.sigma(&cur)? {
                Some(c) => cur = c,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    pub fn idling(&self, t: &Term, n: usize) -> Result<bool, Error> {
        Ok(self.sigma_n(t, n)?.is_some())
    }

    /// Time-stamped transitions up to `bound`, read off idling derivatives.
    pub fn stamped_steps(&self, t: &Term, bound: usize) -> Result<Stamped, Error> {
        let mut steps = BTreeSet::new();
        let mut cur = Some(t.clone());
        let mut n = 0;
        while let Some(c) = cur.take() {
            for s in self.steps(&c)?.iter() {
                steps.insert(StampedStep { label: s.label.clone(), stamp: n, target: s.target.clone() });
            }
            if n == bound {
                let open = self.sigma(&c)?.is_some();
                return Ok(Stamped { steps, open });
            }
            cur = self.sigma(&c)?;
            n += 1;
        }
        Ok(Stamped { steps, open: false })
    }

    /// Activeness of a single term: an observable step now, a step to
    /// termination now, or a silent step now to an active term.
    pub fn active(&self, t: &Term) -> Result<bool, Error> {
        let mut seen = HashSet::new();
        let mut stack = vec![t.clone()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            for s in self.steps(&c)?.iter() {
                match (&s.label, &s.target) {
                    (Action::Obs(_), _) | (_, None) => return Ok(true),
                    (_, Some(x)) => stack.push(x.clone()),
                }
            }
        }
        Ok(false)
    }
}

/// Orient the one-slice shift axioms left to right, unfolding recursion
/// constants where needed. The result never contains a shift node at the
/// top of a summand.
pub fn shift_term(sem: &Sem, t: &Term) -> Result<Term, Error> {
    Ok(match t.node() {
        Node::Const(_) => Term::delta(),
        Node::Alt(xs) => {
            let mut v = Vec::new();
            for x in xs {
                v.push(shift_term(sem, x)?);
            }
            Term::sum(v)
        }
        Node::Seq(x, y) => {
            let s = shift_term(sem, x)?;
            if s.is_delta() {
                Term::delta()
            } else {
                Term::seq(s, y.clone())
            }
        }
        Node::Delay(x) => x.clone(),
        Node::Rec(x, spec) => shift_term(sem, &sem.unfold(x, spec)?)?,
        _ => sem.sigma(t)?.unwrap_or_else(Term::delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sem() -> Sem {
        let mut t = ActionTable::new();
        t.add_comm("a", "b", "c").unwrap();
        Sem::new(t)
    }

    #[test]
    fn constants_and_delay() {
        let s = sem();
        let a = Term::u("a");
        assert_eq!(*s.steps(&a).unwrap(), vec![Step { label: Action::obs("a"), target: None }]);
        assert!(s.steps(&Term::delay(a.clone())).unwrap().is_empty());
        assert_eq!(s.sigma(&Term::delay(a.clone())).unwrap(), Some(a.clone()));
        assert_eq!(s.sigma(&a).unwrap(), None);
    }

    #[test]
    fn alt_sigma_rules() {
        let s = sem();
        let (a, b) = (Term::u("a"), Term::u("b"));
        assert_eq!(s.sigma(&Term::alt(a.clone(), Term::delay(b.clone()))).unwrap(), Some(b.clone()));
        let both = Term::alt(Term::delay(a.clone()), Term::delay(b.clone()));
        assert_eq!(s.sigma(&both).unwrap(), Some(Term::alt(a, b)));
    }

    #[test]
    fn parallel_with_communication() {
        let s = sem();
        let (a, b) = (Term::u("a"), Term::u("b"));
        let steps = s.steps(&Term::par(a.clone(), b.clone())).unwrap();
        let want = vec![
            Step { label: Action::obs("a"), target: Some(b.clone()) },
            Step { label: Action::obs("b"), target: Some(a.clone()) },
            Step { label: Action::obs("c"), target: None },
        ];
        let mut want = want;
        want.sort();
        assert_eq!(*steps, want);
    }

    #[test]
    fn abstraction_renames() {
        let s = sem();
        let t = Term::abstr(crate::term::act_set(["a"]), Term::u("a"));
        assert_eq!(*s.steps(&t).unwrap(), vec![Step { label: Action::Tau, target: None }]);
    }

    #[test]
    fn stamped_and_idling() {
        let s = sem();
        let t = Term::delay_n(2, Term::u("a"));
        let st = s.stamped_steps(&t, 3).unwrap();
        assert_eq!(st.steps.len(), 1);
        assert_eq!(st.steps.iter().next().unwrap().stamp, 2);
        assert!(s.idling(&Term::u("a"), 0).unwrap());
        assert!(!s.idling(&Term::u("a"), 1).unwrap());
        assert!(s.idling(&Term::delay_n(3, Term::u("a")), 3).unwrap());
        let d = Term::delayable(Action::obs("a"));
        let st = s.stamped_steps(&d, 2).unwrap();
        assert_eq!(st.steps.iter().map(|x| x.stamp).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(st.open);
        assert!(s.stamped_steps(&Term::delta(), 5).unwrap().steps.is_empty());
    }

    #[test]
    fn shift_examples() {
        let s = sem();
        assert_eq!(shift_term(&s, &Term::u("a")).unwrap(), Term::delta());
        assert_eq!(shift_term(&s, &Term::delay(Term::u("a"))).unwrap(), Term::u("a"));
        assert_eq!(shift_term(&s, &Term::seq(Term::u("a"), Term::u("b"))).unwrap(), Term::delta());
    }

    #[test]
    fn activeness_examples() {
        let s = sem();
        assert!(s.active(&Term::u("a")).unwrap());
        assert!(!s.active(&Term::delay(Term::u("a"))).unwrap());
        assert!(!s.active(&Term::seq(Term::tau(), Term::delay(Term::u("a")))).unwrap());
        assert!(s.active(&Term::tau()).unwrap());
    }
}
