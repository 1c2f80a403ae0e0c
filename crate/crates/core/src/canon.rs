//! Canonical structural form of terms.

use crate::term::Term;

/// Flatten, sort and deduplicate every alternative composition and drop
/// `delta` summands that have a sibling. Idempotent.
pub fn canonicalize(t: &Term) -> Term {
    t.map_bottom_up(&mut |n| n)
}

pub fn is_canonical(t: &Term) -> bool {
    canonicalize(t) == *t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotence_and_a3() {
        let a = Term::u("a");
        let t = Term::new(crate::term::Node::Alt(vec![a.clone(), a.clone()]));
        assert_eq!(canonicalize(&t), a);
    }

    #[test]
    fn delta_dropped_only_with_sibling() {
        let a = Term::u("a");
        let t = Term::new(crate::term::Node::Alt(vec![a.clone(), Term::delta()]));
        assert_eq!(canonicalize(&t), a);
        assert_eq!(canonicalize(&Term::delta()), Term::delta());
    }

    #[test]
    fn nested_sums_flatten() {
        let (a, b, c) = (Term::u("a"), Term::u("b"), Term::u("c"));
        let inner = Term::new(crate::term::Node::Alt(vec![a.clone(), b.clone()]));
        let t = Term::new(crate::term::Node::Alt(vec![inner, c.clone()]));
        let got = canonicalize(&t);
        match got.node() {
            crate::term::Node::Alt(xs) => assert_eq!(xs, &vec![a, b, c]),
            _ => panic!("expected a sum"),
        }
    }
}
