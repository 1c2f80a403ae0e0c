//! Abstract syntax of process terms.
//!
//! Terms are hash-consed lazily: every node caches its structural hash, and
//! equality short-circuits on pointer identity. Children are shared through
//! `Arc`, so cloning a term is cheap.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// An undelayable atomic constant: an observable action, `tau` or `delta`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Action {
    Delta,
    Tau,
    Obs(Sym),
}

impl Action {
    pub fn obs(name: &str) -> Action {
        Action::Obs(sym(name))
    }

    pub fn name(&self) -> &str {
        match self {
            Action::Delta => "delta",
            Action::Tau => "tau",
            Action::Obs(s) => s,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type ActSet = Arc<BTreeSet<Sym>>;

pub fn act_set<'a>(names: impl IntoIterator<Item = &'a str>) -> ActSet {
    Arc::new(names.into_iter().map(sym).collect())
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Action),
    /// n-ary alternative composition, at least two summands.
    Alt(Vec<Term>),
    Seq(Term, Term),
    Delay(Term),
    Par(Term, Term),
    LeftMerge(Term, Term),
    CommMerge(Term, Term),
    Encap(ActSet, Term),
    Abstr(ActSet, Term),
    Timeout(Term),
    Shift(Term),
    TimeFree(Term),
    TimeIter(u32, Term),
    Var(Sym),
    Rec(Sym, Spec),
}

struct TermData {
    node: Node,
    hash: u64,
}

#[derive(Clone)]
pub struct Term(Arc<TermData>);

impl Term {
    pub fn new(node: Node) -> Term {
        let mut h = DefaultHasher::new();
        node.hash(&mut h);
        Term(Arc::new(TermData { node, hash: h.finish() }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn act(a: Action) -> Term {
        Term::new(Node::Const(a))
    }
    /// Undelayable observable action.
    pub fn u(name: &str) -> Term {
        Term::act(Action::obs(name))
    }
    pub fn tau() -> Term {
        Term::act(Action::Tau)
    }
    pub fn delta() -> Term {
        Term::act(Action::Delta)
    }
    pub fn var(name: &str) -> Term {
        Term::new(Node::Var(sym(name)))
    }
    pub fn seq(x: Term, y: Term) -> Term {
        Term::new(Node::Seq(x, y))
    }
    /// Right-nested sequential composition of a non-empty list.
    pub fn seq_all(items: Vec<Term>) -> Term {
        let mut it = items.into_iter().rev();
        let mut acc = it.next().expect("seq_all of empty list");
        for t in it {
            acc = Term::seq(t, acc);
        }
        acc
    }
    pub fn delay(x: Term) -> Term {
        Term::new(Node::Delay(x))
    }
    pub fn delay_n(n: u32, x: Term) -> Term {
        (0..n).fold(x, |acc, _| Term::delay(acc))
    }
    pub fn par(x: Term, y: Term) -> Term {
        Term::new(Node::Par(x, y))
    }
    pub fn lmerge(x: Term, y: Term) -> Term {
        Term::new(Node::LeftMerge(x, y))
    }
    pub fn cmerge(x: Term, y: Term) -> Term {
        Term::new(Node::CommMerge(x, y))
    }
    pub fn encap(h: ActSet, x: Term) -> Term {
        Term::new(Node::Encap(h, x))
    }
    pub fn abstr(i: ActSet, x: Term) -> Term {
        Term::new(Node::Abstr(i, x))
    }
    pub fn timeout(x: Term) -> Term {
        Term::new(Node::Timeout(x))
    }
    pub fn shift(x: Term) -> Term {
        Term::new(Node::Shift(x))
    }
    pub fn tf(x: Term) -> Term {
        Term::new(Node::TimeFree(x))
    }
    pub fn time_iter(n: u32, x: Term) -> Term {
        Term::new(Node::TimeIter(n, x))
    }
    pub fn rec(var: &str, spec: Spec) -> Term {
        Term::new(Node::Rec(sym(var), spec))
    }

    /// Binary alternative composition, kept in canonical form.
    pub fn alt(x: Term, y: Term) -> Term {
        Term::sum(vec![x, y])
    }

    /// Alternative composition of a list of terms, flattened, sorted and
    /// deduplicated; `delta` summands are dropped when another summand
    /// remains. The empty sum is `delta`.
    pub fn sum(items: Vec<Term>) -> Term {
        let mut flat = Vec::with_capacity(items.len());
        for t in items {
            match t.node() {
                Node::Alt(xs) => flat.extend(xs.iter().cloned()),
                _ => flat.push(t),
            }
        }
        flat.sort();
        flat.dedup();
        if flat.len() > 1 {
            flat.retain(|t| !t.is_delta());
        }
        match flat.len() {
            0 => Term::delta(),
            1 => flat.pop().unwrap(),
            _ => Term::new(Node::Alt(flat)),
        }
    }

    /// The delayable form of an action: `<X | X = u(a) + sigma(X)>`.
    pub fn delayable(a: Action) -> Term {
        let v = delayable_var(&a);
        let body = Term::alt(Term::act(a), Term::delay(Term::var(&v)));
        Term::rec(&v, Spec::single(&v, body))
    }

    pub fn is_delta(&self) -> bool {
        matches!(self.node(), Node::Const(Action::Delta))
    }

    /// Summands of a (possibly trivial) sum.
    pub fn summands(&self) -> Vec<Term> {
        match self.node() {
            Node::Alt(xs) => xs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Direct children, in order.
    pub fn children(&self) -> Vec<&Term> {
        match self.node() {
            Node::Const(_) | Node::Var(_) | Node::Rec(..) => vec![],
            Node::Alt(xs) => xs.iter().collect(),
            Node::Seq(x, y) | Node::Par(x, y) | Node::LeftMerge(x, y) | Node::CommMerge(x, y) => {
                vec![x, y]
            }
            Node::Delay(x)
            | Node::Encap(_, x)
            | Node::Abstr(_, x)
            | Node::Timeout(x)
            | Node::Shift(x)
            | Node::TimeFree(x)
            | Node::TimeIter(_, x) => vec![x],
        }
    }

    /// Rebuild this node with new children (same arity as `children`).
    pub fn with_children(&self, mut kids: Vec<Term>) -> Term {
        let n = match self.node() {
            Node::Const(_) | Node::Var(_) | Node::Rec(..) => return self.clone(),
            Node::Alt(_) => return Term::sum(kids),
            Node::Seq(..) => {
                let y = kids.pop().unwrap();
                Node::Seq(kids.pop().unwrap(), y)
            }
            Node::Par(..) => {
                let y = kids.pop().unwrap();
                Node::Par(kids.pop().unwrap(), y)
            }
            Node::LeftMerge(..) => {
                let y = kids.pop().unwrap();
                Node::LeftMerge(kids.pop().unwrap(), y)
            }
            Node::CommMerge(..) => {
                let y = kids.pop().unwrap();
                Node::CommMerge(kids.pop().unwrap(), y)
            }
            Node::Delay(_) => Node::Delay(kids.pop().unwrap()),
            Node::Encap(h, _) => Node::Encap(h.clone(), kids.pop().unwrap()),
            Node::Abstr(i, _) => Node::Abstr(i.clone(), kids.pop().unwrap()),
            Node::Timeout(_) => Node::Timeout(kids.pop().unwrap()),
            Node::Shift(_) => Node::Shift(kids.pop().unwrap()),
            Node::TimeFree(_) => Node::TimeFree(kids.pop().unwrap()),
            Node::TimeIter(n, _) => Node::TimeIter(*n, kids.pop().unwrap()),
        };
        Term::new(n)
    }

    /// Bottom-up map over the term, leaving recursion constants untouched.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Term) -> Term) -> Term {
        let kids: Vec<Term> = self.children().into_iter().map(|c| c.map_bottom_up(f)).collect();
        let rebuilt = if kids.is_empty() { self.clone() } else { self.with_children(kids) };
        f(rebuilt)
    }

    /// True if `pred` holds for this node or any descendant. Recursion
    /// constants are entered when `into_specs` is set.
    pub fn any_node(&self, into_specs: bool, pred: &mut impl FnMut(&Term) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        if into_specs {
            if let Node::Rec(_, spec) = self.node() {
                if spec.equations().values().any(|b| b.any_node(true, pred)) {
                    return true;
                }
            }
        }
        self.children().into_iter().any(|c| c.any_node(into_specs, pred))
    }

    /// Number of nodes, not counting recursion-constant bodies.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        if let Node::Var(x) = self.node() {
            out.insert(x.clone());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn is_closed(&self) -> bool {
        !self.any_node(false, &mut |t| matches!(t.node(), Node::Var(_)))
    }

    pub fn contains_rec(&self) -> bool {
        self.any_node(false, &mut |t| matches!(t.node(), Node::Rec(..)))
    }
}

/// Variable name used for the delayable form of `a`.
pub fn delayable_var(a: &Action) -> String {
    format!("D_{}", mangle(a.name()))
}

fn mangle(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.ptr_eq(other) || (self.0.hash == other.0.hash && self.0.node == other.0.node)
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct SpecData {
    eqs: BTreeMap<Sym, Term>,
    label: Option<String>,
    hash: u64,
}

/// A recursive specification: a map from variables to right-hand sides.
/// Right-hand sides are canonicalized on construction.
#[derive(Clone)]
pub struct Spec(Arc<SpecData>);

impl Spec {
    pub fn new(eqs: BTreeMap<Sym, Term>) -> Spec {
        Spec::labelled(eqs, None)
    }

    pub fn labelled(eqs: BTreeMap<Sym, Term>, label: Option<String>) -> Spec {
        let eqs: BTreeMap<Sym, Term> =
            eqs.into_iter().map(|(k, v)| (k, crate::canon::canonicalize(&v))).collect();
        let mut h = DefaultHasher::new();
        eqs.hash(&mut h);
        Spec(Arc::new(SpecData { eqs, label, hash: h.finish() }))
    }

    pub fn from_pairs(pairs: Vec<(&str, Term)>) -> Spec {
        Spec::new(pairs.into_iter().map(|(k, v)| (sym(k), v)).collect())
    }

    pub fn single(var: &str, body: Term) -> Spec {
        Spec::from_pairs(vec![(var, body)])
    }

    pub fn equations(&self) -> &BTreeMap<Sym, Term> {
        &self.0.eqs
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.eqs.get(var)
    }

    pub fn label(&self) -> Option<&str> {
        self.0.label.as_deref()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Sym> {
        self.0.eqs.keys()
    }

    /// Constant `<X | self>`.
    pub fn constant(&self, var: &str) -> Term {
        Term::new(Node::Rec(sym(var), self.clone()))
    }

    /// Well-formedness: every free variable of a right-hand side is a
    /// left-hand variable. Nested constants are checked recursively.
    pub fn check_well_formed(&self) -> Result<(), crate::Error> {
        for (x, rhs) in self.equations() {
            for v in rhs.free_vars() {
                if !self.0.eqs.contains_key(&v) {
                    return Err(crate::Error::IllFormed(format!(
                        "variable {v} in the equation for {x} has no equation"
                    )));
                }
            }
            let mut bad = None;
            rhs.any_node(false, &mut |t| {
                if let Node::Rec(_, inner) = t.node() {
                    if let Err(e) = inner.check_well_formed() {
                        bad = Some(e);
                        return true;
                    }
                }
                false
            });
            if let Some(e) = bad {
                return Err(e);
            }
        }
        Ok(())
    }
}

impl PartialEq for Spec {
    fn eq(&self, other: &Spec) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.eqs == other.0.eqs)
    }
}
impl Eq for Spec {}
impl Hash for Spec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}
impl PartialOrd for Spec {
    fn partial_cmp(&self, other: &Spec) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Spec {
    fn cmp(&self, other: &Spec) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.eqs.cmp(&other.0.eqs)
    }
}
impl fmt::Debug for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::print::write_spec_body(f, self)
    }
}
