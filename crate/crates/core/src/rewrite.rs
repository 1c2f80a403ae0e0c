//! Axiom-directed normal forms: basic terms, time-stamped basic terms,
//! merge expansion and linearization.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::actions::ActionTable;
use crate::lts::explore;
use crate::sos::Sem;
use crate::term::{Action, ActSet, Node, Spec, Sym, Term};
use crate::Error;

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Basic term in summand form: prefixed and terminating actions plus at
/// most one delayed summand. The empty form is `delta`.
#[derive(Clone, Debug, Default)]
struct Basic {
    acts: Vec<(Action, Option<Rc<Basic>>)>,
    delay: Option<Rc<Basic>>,
}

struct Normalizer<'a> {
    table: &'a ActionTable,
    budget: usize,
    used: usize,
}

impl Normalizer<'_> {
    fn tick(&mut self) -> Result<(), Error> {
        self.used += 1;
        if self.used > self.budget {
            Err(Error::StepBudget(self.budget))
        } else {
            Ok(())
        }
    }

    fn norm(&mut self, t: &Term) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let b = match t.node() {
            Node::Const(Action::Delta) => Basic::default(),
            Node::Const(a) => Basic { acts: vec![(a.clone(), None)], delay: None },
            Node::Alt(xs) => {
                let mut acc = Rc::new(Basic::default());
                for x in xs {
                    let y = self.norm(x)?;
                    acc = self.alt(&acc, &y)?;
                }
                return Ok(acc);
            }
            Node::Seq(x, y) => {
                let (x, y) = (self.norm(x)?, self.norm(y)?);
                return self.seq(&x, &y);
            }
            Node::Delay(x) => Basic { acts: vec![], delay: Some(self.norm(x)?) },
            Node::Par(x, y) => {
                let (x, y) = (self.norm(x)?, self.norm(y)?);
                return self.par(&x, &y);
            }
            Node::LeftMerge(x, y) => {
                let (x, y) = (self.norm(x)?, self.norm(y)?);
                return self.lmerge(&x, &y);
            }
            Node::CommMerge(x, y) => {
                let (x, y) = (self.norm(x)?, self.norm(y)?);
                return self.cmerge(&x, &y);
            }
            Node::Encap(h, x) => {
                let x = self.norm(x)?;
                return self.encap(h, &x);
            }
            Node::Abstr(i, x) => {
                let x = self.norm(x)?;
                return self.abstr(i, &x);
            }
            Node::Timeout(x) => Basic { acts: self.norm(x)?.acts.clone(), delay: None },
            Node::Shift(x) => return Ok(self.norm(x)?.delay.clone().unwrap_or_default()),
            Node::Var(x) => return Err(Error::IllFormed(format!("free variable {x}"))),
            Node::Rec(..) => return Err(Error::NotEliminable("recursion constant present".into())),
            Node::TimeFree(_) => return Err(Error::NotEliminable("time-free projection present".into())),
            Node::TimeIter(..) => return Err(Error::NotEliminable("time iteration present".into())),
        };
        Ok(Rc::new(b))
    }

    fn alt(&mut self, x: &Rc<Basic>, y: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let mut acts = x.acts.clone();
        acts.extend(y.acts.iter().cloned());
        let delay = match (&x.delay, &y.delay) {
            (Some(a), Some(b)) => Some(self.alt(a, b)?),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Ok(Rc::new(Basic { acts, delay }))
    }

    fn seq(&mut self, x: &Rc<Basic>, y: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let mut acts = Vec::with_capacity(x.acts.len());
        for (a, k) in &x.acts {
            let k = match k {
                None => y.clone(),
                Some(k) => self.seq(k, y)?,
            };
            acts.push((a.clone(), Some(k)));
        }
        let delay = match &x.delay {
            Some(d) => Some(self.seq(d, y)?),
            None => None,
        };
        Ok(Rc::new(Basic { acts, delay }))
    }

    fn par(&mut self, x: &Rc<Basic>, y: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        let l = self.lmerge(x, y)?;
        let r = self.lmerge(y, x)?;
        let c = self.cmerge(x, y)?;
        let lr = self.alt(&l, &r)?;
        self.alt(&lr, &c)
    }

    fn lmerge(&mut self, x: &Rc<Basic>, y: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let mut acts = Vec::with_capacity(x.acts.len());
        for (a, k) in &x.acts {
            let k = match k {
                None => y.clone(),
                Some(k) => self.par(k, y)?,
            };
            acts.push((a.clone(), Some(k)));
        }
        let delay = match (&x.delay, &y.delay) {
            (Some(a), Some(b)) => Some(self.lmerge(a, b)?),
            _ => None,
        };
        Ok(Rc::new(Basic { acts, delay }))
    }

    fn cmerge(&mut self, x: &Rc<Basic>, y: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let mut acts = Vec::new();
        for (a, k) in &x.acts {
            for (b, l) in &y.acts {
                let (Action::Obs(a), Action::Obs(b)) = (a, b) else { continue };
                let Some(c) = self.table.comm(a, b) else { continue };
                let k = match (k, l) {
                    (None, None) => None,
                    (Some(k), None) | (None, Some(k)) => Some(k.clone()),
                    (Some(k), Some(l)) => Some(self.par(k, l)?),
                };
                acts.push((Action::Obs(c.clone()), k));
            }
        }
        let delay = match (&x.delay, &y.delay) {
            (Some(a), Some(b)) => Some(self.cmerge(a, b)?),
            _ => None,
        };
        Ok(Rc::new(Basic { acts, delay }))
    }

    fn encap(&mut self, h: &ActSet, x: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let mut acts = Vec::new();
        for (a, k) in &x.acts {
            if matches!(a, Action::Obs(n) if h.contains(n)) {
                continue;
            }
            let k = match k {
                Some(k) => Some(self.encap(h, k)?),
                None => None,
            };
            acts.push((a.clone(), k));
        }
        let delay = match &x.delay {
            Some(d) => Some(self.encap(h, d)?),
            None => None,
        };
        Ok(Rc::new(Basic { acts, delay }))
    }

    fn abstr(&mut self, i: &ActSet, x: &Rc<Basic>) -> Result<Rc<Basic>, Error> {
        self.tick()?;
        let mut acts = Vec::new();
        for (a, k) in &x.acts {
            let a = match a {
                Action::Obs(n) if i.contains(n) => Action::Tau,
                _ => a.clone(),
            };
            let k = match k {
                Some(k) => Some(self.abstr(i, k)?),
                None => None,
            };
            acts.push((a, k));
        }
        let delay = match &x.delay {
            Some(d) => Some(self.abstr(i, d)?),
            None => None,
        };
        Ok(Rc::new(Basic { acts, delay }))
    }
}

fn basic_to_term(b: &Basic) -> Term {
    let mut items = Vec::new();
    for (a, k) in &b.acts {
        items.push(match k {
            None => Term::act(a.clone()),
            Some(k) => Term::seq(Term::act(a.clone()), basic_to_term(k)),
        });
    }
    if let Some(d) = &b.delay {
        items.push(Term::delay(basic_to_term(d)));
    }
    Term::sum(items)
}

/// Eliminate every operator except choice, action prefix and delay.
pub fn to_basic_term(table: &ActionTable, t: &Term) -> Result<Term, Error> {
    to_basic_term_with_budget(table, t, DEFAULT_STEP_BUDGET)
}

pub fn to_basic_term_with_budget(table: &ActionTable, t: &Term, budget: usize) -> Result<Term, Error> {
    let mut n = Normalizer { table, budget, used: 0 };
    let b = n.norm(t)?;
    Ok(basic_to_term(&b))
}

fn is_prefix_action(a: &Action) -> bool {
    !matches!(a, Action::Delta)
}

pub fn is_basic(t: &Term) -> bool {
    t.summands().iter().all(|s| match s.node() {
        Node::Const(_) => true,
        Node::Seq(x, y) => matches!(x.node(), Node::Const(a) if is_prefix_action(a)) && is_basic(y),
        Node::Delay(x) => is_basic(x),
        _ => false,
    })
}

/// Delays pushed onto the actions: sums of `sigma^n(u(a)) . t` and
/// `sigma^n(u(a))`.
pub fn to_ts_basic(t: &Term) -> Result<Term, Error> {
    if !is_basic(t) {
        return Err(Error::Precondition("to_ts_basic expects a basic term".into()));
    }
    Ok(ts_of(t, 0))
}

fn ts_of(t: &Term, n: u32) -> Term {
    let mut items = Vec::new();
    for s in t.summands() {
        match s.node() {
            Node::Const(_) => items.push(Term::delay_n(n, s.clone())),
            Node::Seq(a, k) => items.push(Term::seq(Term::delay_n(n, a.clone()), ts_of(k, 0))),
            Node::Delay(x) => items.push(ts_of(x, n + 1)),
            _ => unreachable!("checked by is_basic"),
        }
    }
    Term::sum(items)
}

fn strip_delays(t: &Term) -> &Term {
    let mut cur = t;
    while let Node::Delay(x) = cur.node() {
        cur = x;
    }
    cur
}

pub fn is_ts_basic(t: &Term) -> bool {
    t.summands().iter().all(|s| match s.node() {
        Node::Seq(x, y) => matches!(strip_delays(x).node(), Node::Const(a) if is_prefix_action(a)) && is_ts_basic(y),
        _ => matches!(strip_delays(s).node(), Node::Const(_)),
    })
}

fn par_operands(t: &Term, out: &mut Vec<Term>) {
    match t.node() {
        Node::Par(x, y) => {
            par_operands(x, out);
            par_operands(y, out);
        }
        _ => out.push(t.clone()),
    }
}

fn par_all(xs: &[&Term]) -> Term {
    let mut it = xs.iter().rev();
    let mut acc = (*it.next().unwrap()).clone();
    for x in it {
        acc = Term::par((*x).clone(), acc);
    }
    acc
}

/// One application of the expansion law to a parallel composition.
pub fn expand_merge(table: &ActionTable, t: &Term) -> Result<Term, Error> {
    let mut xs = Vec::new();
    par_operands(t, &mut xs);
    if xs.len() < 2 {
        return Ok(t.clone());
    }
    if !table.is_handshaking() {
        return Err(Error::NotHandshaking);
    }
    let n = xs.len();
    let mut items = Vec::new();
    for i in 0..n {
        let rest: Vec<&Term> = (0..n).filter(|&j| j != i).map(|j| &xs[j]).collect();
        items.push(Term::lmerge(xs[i].clone(), par_all(&rest)));
    }
    for i in 0..n {
        for j in i + 1..n {
            let c = Term::cmerge(xs[i].clone(), xs[j].clone());
            let rest: Vec<&Term> = (0..n).filter(|&k| k != i && k != j).map(|k| &xs[k]).collect();
            items.push(if rest.is_empty() { c } else { Term::lmerge(c, par_all(&rest)) });
        }
    }
    Ok(Term::sum(items))
}

/// Linear recursive specification with one variable per reachable state.
/// Returns the specification and the root variable.
pub fn linearize(sem: &Sem, t: &Term, max_states: usize) -> Result<(Spec, Sym), Error> {
    if t.any_node(true, &mut |n| matches!(n.node(), Node::Abstr(..))) {
        return Err(Error::Precondition("linearization requires a term without abstraction".into()));
    }
    let l = explore(sem, t, max_states)?;
    let mut names = vec![None; l.len()];
    let mut k = 0;
    for (s, slot) in names.iter_mut().enumerate() {
        if !l.is_tick(s) {
            *slot = Some(crate::term::sym(&format!("X{k}")));
            k += 1;
        }
    }
    let var = |s: usize| Term::new(Node::Var(names[s].clone().unwrap()));
    let mut eqs = BTreeMap::new();
    for (s, x) in names.iter().enumerate().take(l.len()) {
        let Some(x) = x else { continue };
        let mut items = Vec::new();
        for (a, tgt) in l.edges(s) {
            items.push(if l.is_tick(*tgt) { Term::act(a.clone()) } else { Term::seq(Term::act(a.clone()), var(*tgt)) });
        }
        if let Some(n) = l.sigma(s) {
            items.push(Term::delay(var(n)));
        }
        eqs.insert(x.clone(), Term::sum(items));
    }
    let root = names[l.root].clone().unwrap();
    Ok((Spec::new(eqs), root))
}

pub fn is_linear(spec: &Spec) -> bool {
    spec.equations().values().all(|rhs| {
        rhs.summands().iter().all(|s| match s.node() {
            Node::Const(_) => true,
            Node::Seq(a, x) => {
                matches!(a.node(), Node::Const(a) if is_prefix_action(a)) && matches!(x.node(), Node::Var(_))
            }
            Node::Delay(x) => matches!(x.node(), Node::Var(_)),
            _ => false,
        })
    })
}
