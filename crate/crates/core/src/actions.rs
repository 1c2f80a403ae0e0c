//! Action alphabet and communication function.

use std::collections::{BTreeMap, BTreeSet};

use crate::term::{sym, Sym};
use crate::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionTable {
    actions: BTreeSet<Sym>,
    comm: BTreeMap<(Sym, Sym), Sym>,
    handshaking: bool,
}

impl ActionTable {
    pub fn new() -> ActionTable {
        ActionTable::default()
    }

    pub fn add_action(&mut self, name: &str) -> Result<(), Error> {
        if name == "tau" || name == "delta" {
            return Err(Error::IllFormed(format!("{name} is reserved and cannot be declared as an action")));
        }
        self.actions.insert(sym(name));
        Ok(())
    }

    /// Declare `a | b = c`. All three actions are added when missing.
    pub fn add_comm(&mut self, a: &str, b: &str, c: &str) -> Result<(), Error> {
        for n in [a, b, c] {
            self.add_action(n)?;
        }
        let (a, b, c) = (sym(a), sym(b), sym(c));
        for key in [(a.clone(), b.clone()), (b, a)] {
            if let Some(old) = self.comm.get(&key) {
                if *old != c {
                    return Err(Error::IllFormed(format!(
                        "conflicting communication for {} | {}",
                        key.0, key.1
                    )));
                }
            }
            self.comm.insert(key, c.clone());
        }
        if self.handshaking {
            self.check_handshaking()?;
        }
        Ok(())
    }

    /// Mark the table as handshaking; fails if some communication result
    /// can itself communicate.
    pub fn set_handshaking(&mut self) -> Result<(), Error> {
        self.handshaking = true;
        self.check_handshaking()
    }

    pub fn is_handshaking(&self) -> bool {
        self.handshaking
    }

    fn check_handshaking(&self) -> Result<(), Error> {
        for c in self.comm.values() {
            if let Some(((x, y), _)) = self.comm.iter().find(|((x, _), _)| x == c) {
                return Err(Error::IllFormed(format!(
                    "not handshaking: {c} is a communication result and also communicates ({x} | {y})"
                )));
            }
        }
        Ok(())
    }

    pub fn actions(&self) -> &BTreeSet<Sym> {
        &self.actions
    }

    pub fn contains(&self, name: &str) -> bool {
        self.actions.contains(name)
    }

    pub fn comm(&self, a: &str, b: &str) -> Option<&Sym> {
        self.comm.get(&(sym(a), sym(b)))
    }

    pub fn comm_pairs(&self) -> impl Iterator<Item = (&Sym, &Sym, &Sym)> {
        self.comm.iter().filter(|((a, b), _)| a <= b).map(|((a, b), c)| (a, b, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comm_is_symmetric() {
        let mut t = ActionTable::new();
        t.add_comm("a", "b", "c").unwrap();
        assert_eq!(t.comm("b", "a").map(|s| &**s), Some("c"));
        assert!(t.comm("a", "c").is_none());
    }

    #[test]
    fn reserved_names_rejected() {
        let mut t = ActionTable::new();
        assert!(t.add_action("tau").is_err());
    }

    #[test]
    fn handshaking_violation_detected() {
        let mut t = ActionTable::new();
        t.set_handshaking().unwrap();
        t.add_comm("a", "b", "c").unwrap();
        assert!(t.add_comm("c", "d", "e").is_err());
    }
}
