//! Substitution, unfolding, guardedness, time iteration and flattening of
//! nested recursion.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::term::{sym, Node, Spec, Sym, Term};
use crate::Error;

pub const DEFAULT_GUARD_DEPTH: usize = 8;

/// Replace free occurrences of variables. Recursion constants are closed,
/// so they are never entered.
pub fn substitute(t: &Term, binding: &BTreeMap<Sym, Term>) -> Term {
    if binding.is_empty() {
        return t.clone();
    }
    subst_rec(t, binding)
}

fn subst_rec(t: &Term, b: &BTreeMap<Sym, Term>) -> Term {
    match t.node() {
        Node::Var(x) => b.get(x).cloned().unwrap_or_else(|| t.clone()),
        Node::Const(_) | Node::Rec(..) => t.clone(),
        _ => {
            let kids: Vec<Term> = t.children().into_iter().map(|c| subst_rec(c, b)).collect();
            t.with_children(kids)
        }
    }
}

/// `<X | E>` rewritten to the right-hand side for `X` with every variable
/// of `E` replaced by its constant.
pub fn unfold(var: &Sym, spec: &Spec) -> Result<Term, Error> {
    let rhs = spec
        .get(var)
        .ok_or_else(|| Error::IllFormed(format!("no equation for {var}")))?;
    let binding: BTreeMap<Sym, Term> = spec.vars().map(|v| (v.clone(), spec.constant(v))).collect();
    Ok(substitute(rhs, &binding))
}

/// Collect variable occurrences that are not guarded. `sigma_guards` is
/// cleared below shift and time-free projection, which can strip delays.
fn unguarded_vars(t: &Term, guarded: bool, sigma_guards: bool, out: &mut BTreeSet<Sym>) {
    match t.node() {
        Node::Var(x) => {
            if !guarded {
                out.insert(x.clone());
            }
        }
        Node::Rec(..) | Node::Const(_) => {}
        Node::Seq(x, y) => {
            unguarded_vars(x, guarded, sigma_guards, out);
            let prefix = guards(x, sigma_guards);
            unguarded_vars(y, guarded || prefix, sigma_guards, out);
        }
        Node::Delay(x) => unguarded_vars(x, guarded || sigma_guards, sigma_guards, out),
        Node::Shift(x) | Node::TimeFree(x) => unguarded_vars(x, false, false, out),
        _ => {
            for c in t.children() {
                unguarded_vars(c, guarded, sigma_guards, out);
            }
        }
    }
}

/// Whether `x` cannot terminate before an observable step or a time slice,
/// so that it guards whatever follows it in `x . y`.
fn guards(x: &Term, sigma_guards: bool) -> bool {
    match x.node() {
        Node::Const(a) => !matches!(a, crate::term::Action::Tau),
        Node::Delay(_) => sigma_guards,
        Node::Seq(a, b) | Node::Par(a, b) | Node::LeftMerge(a, b) | Node::CommMerge(a, b) => {
            guards(a, sigma_guards) || guards(b, sigma_guards)
        }
        Node::Alt(xs) => xs.iter().all(|c| guards(c, sigma_guards)),
        Node::Encap(_, a) | Node::Timeout(a) => guards(a, sigma_guards),
        Node::TimeFree(a) => guards(a, false),
        Node::Rec(v, spec) => spec.get(v).is_some_and(|b| guards(b, sigma_guards)),
        _ => false,
    }
}

fn has_abstraction(t: &Term) -> bool {
    t.any_node(false, &mut |n| matches!(n.node(), Node::Abstr(..)))
}

/// Replace unguarded variable occurrences by their right-hand sides.
fn unfold_unguarded(t: &Term, guarded: bool, sigma_guards: bool, spec: &Spec) -> Term {
    match t.node() {
        Node::Var(x) if !guarded => spec.get(x).cloned().unwrap_or_else(|| t.clone()),
        Node::Var(_) | Node::Rec(..) | Node::Const(_) => t.clone(),
        Node::Seq(x, y) => {
            let prefix = guards(x, sigma_guards);
            Term::seq(
                unfold_unguarded(x, guarded, sigma_guards, spec),
                unfold_unguarded(y, guarded || prefix, sigma_guards, spec),
            )
        }
        Node::Delay(x) => Term::delay(unfold_unguarded(x, guarded || sigma_guards, sigma_guards, spec)),
        Node::Shift(_) | Node::TimeFree(_) => {
            let kid = unfold_unguarded(t.children()[0], false, false, spec);
            t.with_children(vec![kid])
        }
        _ => {
            let kids = t.children().into_iter().map(|c| unfold_unguarded(c, guarded, sigma_guards, spec)).collect();
            t.with_children(kids)
        }
    }
}

/// Outcome of a guardedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guardedness {
    Guarded,
    /// Not syntactically guarded after `depth` rounds of unfolding; this
    /// does not prove the specification unguarded.
    NotGuardedAtDepth { var: Sym, depth: usize },
}

pub fn guardedness(spec: &Spec, depth: usize) -> Guardedness {
    for (x, rhs) in spec.equations() {
        let mut cur = rhs.clone();
        let mut ok = false;
        for _ in 0..=depth {
            let mut bad = BTreeSet::new();
            unguarded_vars(&cur, false, true, &mut bad);
            let any_vars = !cur.free_vars().is_empty();
            if bad.is_empty() && !(any_vars && has_abstraction(&cur)) {
                ok = true;
                break;
            }
            if bad.is_empty() {
                break;
            }
            cur = unfold_unguarded(&cur, false, true, spec);
        }
        if !ok {
            return Guardedness::NotGuardedAtDepth { var: x.clone(), depth };
        }
    }
    Guardedness::Guarded
}

pub fn check_guarded(spec: &Spec, depth: usize) -> bool {
    guardedness(spec, depth) == Guardedness::Guarded
}

/// Check every specification occurring in `t`, including nested ones.
pub fn check_all_guarded(t: &Term, depth: usize) -> Result<(), Error> {
    let mut err = None;
    t.any_node(true, &mut |n| {
        if let Node::Rec(_, spec) = n.node() {
            if let Guardedness::NotGuardedAtDepth { var, depth } = guardedness(spec, depth) {
                err = Some(Error::Unguarded { var: var.to_string(), depth });
                return true;
            }
        }
        false
    });
    err.map_or(Ok(()), Err)
}

fn fresh(base: &str, used: &BTreeSet<Sym>) -> Sym {
    if !used.contains(base) {
        return sym(base);
    }
    (1..).map(|i| format!("{base}_{i}")).find(|c| !used.contains(c.as_str())).map(|s| sym(&s)).unwrap()
}

fn titer_iteration_spec(n: u32, s: Term) -> Result<Term, Error> {
    if n == 0 {
        return Err(Error::DegenerateIteration);
    }
    let v = "I";
    let body = Term::alt(s, Term::delay_n(n, Term::var(v)));
    Ok(Term::rec(v, Spec::single(v, body)))
}

/// Replace every time iteration `sigma*n(s)` by `<X | X = s + sigma^n(X)>`.
/// Iterations with free variables (inside right-hand sides) become new
/// equations of the enclosing specification.
pub fn expand_time_iteration(t: &Term) -> Result<Term, Error> {
    match t.node() {
        Node::Const(_) | Node::Var(_) => Ok(t.clone()),
        Node::Rec(x, spec) => Ok(spec_constant(x, &expand_spec(spec)?)),
        Node::TimeIter(n, s) => {
            let s = expand_time_iteration(s)?;
            if !s.is_closed() {
                return Err(Error::IllFormed("time iteration over an open term outside a specification".into()));
            }
            titer_iteration_spec(*n, s)
        }
        _ => {
            let kids = t.children().into_iter().map(expand_time_iteration).collect::<Result<Vec<_>, _>>()?;
            Ok(t.with_children(kids))
        }
    }
}

fn spec_constant(x: &Sym, spec: &Spec) -> Term {
    Term::new(Node::Rec(x.clone(), spec.clone()))
}

fn contains_titer(t: &Term) -> bool {
    t.any_node(true, &mut |n| matches!(n.node(), Node::TimeIter(..)))
}

/// Expand time iterations inside the right-hand sides of a specification.
pub fn expand_spec(spec: &Spec) -> Result<Spec, Error> {
    if !spec.equations().values().any(contains_titer) {
        return Ok(spec.clone());
    }
    let mut used: BTreeSet<Sym> = spec.vars().cloned().collect();
    let mut extra: BTreeMap<Sym, Term> = BTreeMap::new();
    let mut eqs = BTreeMap::new();
    for (x, rhs) in spec.equations() {
        let body = expand_open(rhs, &mut used, &mut extra)?;
        eqs.insert(x.clone(), body);
    }
    eqs.extend(extra);
    Ok(Spec::labelled(eqs, spec.label().map(str::to_string)))
}

fn expand_open(t: &Term, used: &mut BTreeSet<Sym>, extra: &mut BTreeMap<Sym, Term>) -> Result<Term, Error> {
    match t.node() {
        Node::Const(_) | Node::Var(_) => Ok(t.clone()),
        Node::Rec(x, spec) => Ok(spec_constant(x, &expand_spec(spec)?)),
        Node::TimeIter(n, s) => {
            let s = expand_open(s, used, extra)?;
            if s.is_closed() {
                return titer_iteration_spec(*n, s);
            }
            if *n == 0 {
                return Err(Error::DegenerateIteration);
            }
            let v = fresh("I", used);
            used.insert(v.clone());
            extra.insert(v.clone(), Term::alt(s, Term::delay_n(*n, Term::new(Node::Var(v.clone())))));
            Ok(Term::new(Node::Var(v)))
        }
        _ => {
            let kids = t.children().into_iter().map(|c| expand_open(c, used, extra)).collect::<Result<Vec<_>, _>>()?;
            Ok(t.with_children(kids))
        }
    }
}

/// Flatten nested recursion: inner constants are renamed apart and their
/// equations merged into the outer specification.
pub fn flatten_recursion(c: &Term) -> Result<Term, Error> {
    let (x, spec) = match c.node() {
        Node::Rec(x, spec) => (x.clone(), spec.clone()),
        _ => return Err(Error::IllFormed("flatten_recursion expects a recursion constant".into())),
    };
    if !spec.equations().values().any(|t| t.contains_rec()) {
        return Ok(c.clone());
    }
    let mut st = Flattener {
        used: spec.vars().cloned().collect(),
        renamings: HashMap::new(),
        eqs: spec.equations().clone(),
        pending: Vec::new(),
    };
    let outer: Vec<Sym> = spec.vars().cloned().collect();
    for v in outer {
        let rhs = st.eqs[&v].clone();
        let flat = st.replace(&rhs)?;
        st.eqs.insert(v, flat);
    }
    while let Some(v) = st.pending.pop() {
        let rhs = st.eqs[&v].clone();
        let flat = st.replace(&rhs)?;
        st.eqs.insert(v, flat);
    }
    let spec = Spec::labelled(st.eqs, spec.label().map(str::to_string));
    Ok(spec_constant(&x, &spec))
}

struct Flattener {
    used: BTreeSet<Sym>,
    renamings: HashMap<Spec, BTreeMap<Sym, Sym>>,
    eqs: BTreeMap<Sym, Term>,
    pending: Vec<Sym>,
}

impl Flattener {
    fn replace(&mut self, t: &Term) -> Result<Term, Error> {
        match t.node() {
            Node::Rec(y, inner) => {
                let ren = self.rename(inner)?;
                Ok(Term::new(Node::Var(ren[y].clone())))
            }
            Node::Const(_) | Node::Var(_) => Ok(t.clone()),
            _ => {
                let kids = t.children().into_iter().map(|c| self.replace(c)).collect::<Result<Vec<_>, _>>()?;
                Ok(t.with_children(kids))
            }
        }
    }

    fn rename(&mut self, inner: &Spec) -> Result<BTreeMap<Sym, Sym>, Error> {
        if let Some(r) = self.renamings.get(inner) {
            return Ok(r.clone());
        }
        if let Guardedness::NotGuardedAtDepth { var, depth } = guardedness(inner, DEFAULT_GUARD_DEPTH) {
            return Err(Error::Unguarded { var: var.to_string(), depth });
        }
        let mut ren = BTreeMap::new();
        for v in inner.vars() {
            let nv = fresh(v, &self.used);
            self.used.insert(nv.clone());
            ren.insert(v.clone(), nv);
        }
        self.renamings.insert(inner.clone(), ren.clone());
        let binding: BTreeMap<Sym, Term> =
            ren.iter().map(|(o, n)| (o.clone(), Term::new(Node::Var(n.clone())))).collect();
        for (v, rhs) in inner.equations() {
            let nv = ren[v].clone();
            self.eqs.insert(nv.clone(), substitute(rhs, &binding));
            self.pending.push(nv);
        }
        Ok(ren)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Action;

    fn x() -> Term {
        Term::var("X")
    }

    #[test]
    fn guardedness_examples() {
        assert!(check_guarded(&Spec::single("X", Term::seq(Term::u("a"), x())), 8));
        assert!(!check_guarded(&Spec::single("X", Term::alt(Term::u("a"), x())), 8));
        assert!(check_guarded(&Spec::single("X", Term::delay(x())), 8));
        assert!(!check_guarded(&Spec::single("X", Term::seq(Term::tau(), x())), 8));
        assert!(check_guarded(&Spec::single("X", Term::seq(Term::delay(Term::u("b")), x())), 8));
        assert!(!check_guarded(&Spec::single("X", Term::seq(Term::alt(Term::tau(), Term::u("b")), x())), 8));
        let hidden = Term::abstr(crate::term::act_set(["a"]), Term::seq(Term::u("a"), x()));
        assert!(!check_guarded(&Spec::single("X", hidden), 8));
    }

    #[test]
    fn guarded_after_unfolding() {
        let spec = Spec::from_pairs(vec![("X", Term::alt(Term::var("Y"), Term::u("c"))), ("Y", Term::seq(Term::u("b"), x()))]);
        assert!(check_guarded(&spec, 1));
        assert!(!check_guarded(&spec, 0));
    }

    #[test]
    fn substitution_respects_binding() {
        let mut b = BTreeMap::new();
        b.insert(sym("X"), Term::u("a"));
        assert_eq!(substitute(&x(), &b), Term::u("a"));
        let c = Term::rec("X", Spec::single("X", Term::seq(Term::u("b"), x())));
        assert_eq!(substitute(&c, &b), c);
    }

    #[test]
    fn time_iteration_expands() {
        let t = Term::time_iter(2, Term::u("a"));
        let e = expand_time_iteration(&t).unwrap();
        let want = Term::rec("I", Spec::single("I", Term::alt(Term::u("a"), Term::delay_n(2, Term::var("I")))));
        assert_eq!(e, want);
        assert!(matches!(expand_time_iteration(&Term::time_iter(0, Term::u("a"))), Err(Error::DegenerateIteration)));
    }

    #[test]
    fn open_time_iteration_becomes_equation() {
        let spec = Spec::single("X", Term::time_iter(3, Term::seq(Term::u("a"), x())));
        let e = expand_spec(&spec).unwrap();
        assert_eq!(e.equations().len(), 2);
        assert!(check_guarded(&e, 8));
    }

    #[test]
    fn flatten_nested_constant() {
        let inner = Term::rec("Y", Spec::single("Y", Term::seq(Term::u("b"), Term::var("Y"))));
        let c = Term::rec("X", Spec::single("X", Term::seq(Term::u("a"), inner)));
        let f = flatten_recursion(&c).unwrap();
        let want = Term::rec(
            "X",
            Spec::from_pairs(vec![("X", Term::seq(Term::u("a"), Term::var("Y"))), ("Y", Term::seq(Term::u("b"), Term::var("Y")))]),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn flatten_renames_apart_and_shares_delayables() {
        let d = Term::delayable(Action::obs("a"));
        let body = Term::seq(Term::u("c"), Term::alt(Term::seq(d.clone(), x()), Term::seq(d, Term::var("D_a"))));
        let spec = Spec::from_pairs(vec![("X", body), ("D_a", Term::seq(Term::u("e"), x()))]);
        let f = flatten_recursion(&spec.constant("X")).unwrap();
        match f.node() {
            Node::Rec(_, s) => {
                assert_eq!(s.equations().len(), 3);
                assert!(s.equations().values().all(|t| !t.contains_rec()));
                assert!(check_guarded(s, 8));
            }
            _ => unreachable!(),
        }
    }
}
