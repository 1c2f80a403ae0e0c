//! Concrete-syntax printer. The output is accepted by the model-file parser.

use std::fmt::{self, Write};

use crate::term::{delayable_var, Action, ActSet, Node, Spec, Term};

const P_SUM: u8 = 1;
const P_MERGE: u8 = 2;
const P_SEQ: u8 = 3;
const P_ATOM: u8 = 4;

fn prec(t: &Term) -> u8 {
    match t.node() {
        Node::Alt(_) => P_SUM,
        Node::Par(..) | Node::LeftMerge(..) | Node::CommMerge(..) => P_MERGE,
        Node::Seq(..) => P_SEQ,
        _ => P_ATOM,
    }
}

fn write_at(f: &mut impl Write, t: &Term, min: u8) -> fmt::Result {
    if prec(t) < min {
        f.write_char('(')?;
        write_term(f, t)?;
        f.write_char(')')
    } else {
        write_term(f, t)
    }
}

fn write_set(f: &mut impl Write, s: &ActSet) -> fmt::Result {
    f.write_char('{')?;
    for (i, a) in s.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(a)?;
    }
    f.write_char('}')
}

/// If `<var | spec>` is the delayable form of an observable action, return it.
pub fn as_delayable(var: &str, spec: &Spec) -> Option<Action> {
    if spec.equations().len() != 1 {
        return None;
    }
    let body = spec.get(var)?;
    let xs = match body.node() {
        Node::Alt(xs) if xs.len() == 2 => xs,
        _ => return None,
    };
    let (c, d) = (&xs[0], &xs[1]);
    let a = match c.node() {
        Node::Const(a @ Action::Obs(_)) => a.clone(),
        _ => return None,
    };
    match d.node() {
        Node::Delay(v) if matches!(v.node(), Node::Var(x) if &**x == var) => {}
        _ => return None,
    }
    (delayable_var(&a) == var).then_some(a)
}

pub fn write_term(f: &mut impl Write, t: &Term) -> fmt::Result {
    match t.node() {
        Node::Const(Action::Obs(a)) => write!(f, "u({a})"),
        Node::Const(a) => f.write_str(a.name()),
        Node::Alt(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" + ")?;
                }
                write_at(f, x, P_MERGE)?;
            }
            Ok(())
        }
        Node::Seq(x, y) => {
            write_at(f, x, P_ATOM)?;
            f.write_str(" . ")?;
            write_at(f, y, P_SEQ)
        }
        Node::Par(x, y) | Node::LeftMerge(x, y) | Node::CommMerge(x, y) => {
            let op = match t.node() {
                Node::Par(..) => " || ",
                Node::LeftMerge(..) => " |_ ",
                _ => " | ",
            };
            write_at(f, x, P_MERGE)?;
            f.write_str(op)?;
            write_at(f, y, P_SEQ)
        }
        Node::Delay(_) => {
            let mut n = 0;
            let mut cur = t;
            while let Node::Delay(inner) = cur.node() {
                n += 1;
                cur = inner;
            }
            if n == 1 {
                f.write_str("sigma(")?;
            } else {
                write!(f, "sigma^{n}(")?;
            }
            write_term(f, cur)?;
            f.write_char(')')
        }
        Node::Encap(h, x) | Node::Abstr(h, x) => {
            f.write_str(if matches!(t.node(), Node::Encap(..)) { "encap(" } else { "hide(" })?;
            write_set(f, h)?;
            f.write_str(", ")?;
            write_term(f, x)?;
            f.write_char(')')
        }
        Node::Timeout(x) => {
            f.write_str("to(")?;
            write_term(f, x)?;
            f.write_char(')')
        }
        Node::Shift(x) => {
            f.write_str("shift(")?;
            write_term(f, x)?;
            f.write_char(')')
        }
        Node::TimeFree(x) => {
            f.write_str("tf(")?;
            write_term(f, x)?;
            f.write_char(')')
        }
        Node::TimeIter(n, x) => {
            write!(f, "sigma*{n}(")?;
            write_term(f, x)?;
            f.write_char(')')
        }
        Node::Var(x) => f.write_str(x),
        Node::Rec(x, spec) => {
            if let Some(a) = as_delayable(x, spec) {
                return f.write_str(a.name());
            }
            write!(f, "<{x} | ")?;
            write_spec_body(f, spec)?;
            f.write_char('>')
        }
    }
}

/// `X = t; Y = t'` in variable order.
pub fn write_spec_body(f: &mut impl Write, spec: &Spec) -> fmt::Result {
    for (i, (x, rhs)) in spec.equations().iter().enumerate() {
        if i > 0 {
            f.write_str("; ")?;
        }
        write!(f, "{x} = ")?;
        write_term(f, rhs)?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_basic_shapes() {
        let t = Term::seq(Term::u("a"), Term::delay(Term::u("b")));
        assert_eq!(t.to_string(), "u(a) . sigma(u(b))");
        let s = Term::alt(Term::seq(Term::u("a"), Term::u("b")), Term::delay_n(3, Term::tau()));
        assert_eq!(s.to_string(), "u(a) . u(b) + sigma^3(tau)");
        let p = Term::seq(Term::par(Term::u("a"), Term::u("b")), Term::delta());
        assert_eq!(p.to_string(), "(u(a) || u(b)) . delta");
    }

    #[test]
    fn delayable_prints_bare() {
        assert_eq!(Term::delayable(Action::obs("a")).to_string(), "a");
    }
}
