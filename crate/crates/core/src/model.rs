//! A model: action table, named specifications and processes, and check
//! directives.

use std::collections::BTreeMap;

use crate::actions::ActionTable;
use crate::equiv::{self, Answer, Relation, Verdict};
use crate::lts::explore_pair;
use crate::recursion::{check_all_guarded, expand_time_iteration, DEFAULT_GUARD_DEPTH};
use crate::sos::Sem;
use crate::term::{Spec, Term};
use crate::Error;

#[derive(Clone, Debug)]
pub struct CheckDirective {
    pub relation: Relation,
    pub lhs: Term,
    pub rhs: Term,
    pub expect: Option<Answer>,
    /// Source line, 1-based; 0 for directives built in code.
    pub line: usize,
}

impl CheckDirective {
    /// A directive passes when the answer matches `expect`, or is `yes`
    /// when nothing is expected.
    pub fn passes(&self, v: &Verdict) -> bool {
        v.answer == self.expect.unwrap_or(Answer::Yes)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Model {
    pub table: ActionTable,
    pub specs: BTreeMap<String, Spec>,
    procs: Vec<(String, Term)>,
    pub checks: Vec<CheckDirective>,
}

impl Model {
    pub fn new(table: ActionTable) -> Model {
        Model { table, ..Model::default() }
    }

    pub fn add_proc(&mut self, name: &str, t: Term) {
        match self.procs.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = t,
            None => self.procs.push((name.to_string(), t)),
        }
    }

    pub fn proc(&self, name: &str) -> Option<&Term> {
        self.procs.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Processes in declaration order.
    pub fn procs(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.procs.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn add_spec(&mut self, name: &str, spec: Spec) {
        self.specs.insert(name.to_string(), spec);
    }

    pub fn sem(&self) -> Sem {
        Sem::new(self.table.clone())
    }

    /// Check that every process is closed and guarded.
    pub fn validate(&self) -> Result<(), Error> {
        for (name, t) in &self.procs {
            if !t.is_closed() {
                return Err(Error::IllFormed(format!("process {name} has free variables")));
            }
            prepare(t)?;
        }
        for spec in self.specs.values() {
            spec.check_well_formed()?;
        }
        for d in &self.checks {
            prepare(&d.lhs)?;
            prepare(&d.rhs)?;
        }
        Ok(())
    }

    pub fn run_check(&self, d: &CheckDirective, max_states: usize) -> Result<Verdict, Error> {
        decide(&self.sem(), d.relation, &d.lhs, &d.rhs, max_states)
    }
}

/// Desugar time iterations and check guardedness, ready for exploration.
pub fn prepare(t: &Term) -> Result<Term, Error> {
    let t = expand_time_iteration(t)?;
    check_all_guarded(&t, DEFAULT_GUARD_DEPTH)?;
    Ok(t)
}

/// Explore both terms into one graph and decide `relation`.
pub fn decide(sem: &Sem, relation: Relation, t1: &Term, t2: &Term, max_states: usize) -> Result<Verdict, Error> {
    let (l, a, b) = explore_pair(sem, &prepare(t1)?, &prepare(t2)?, max_states)?;
    Ok(equiv::check(&l, relation, a, b))
}
