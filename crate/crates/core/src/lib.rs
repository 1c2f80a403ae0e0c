//! Core of drtcalc: process terms over ACP with discrete relative timing,
//! their two-phase operational semantics, finite state spaces, equivalence
//! checkers and axiom-directed normal forms.

pub mod actions;
pub mod canon;
pub mod equiv;
pub mod lts;
pub mod model;
pub mod print;
pub mod recursion;
pub mod rewrite;
pub mod sos;
pub mod term;

pub use actions::ActionTable;
pub use canon::canonicalize;
pub use equiv::{Answer, Relation, Verdict};
pub use lts::{Lts, StateId};
pub use model::{CheckDirective, Model};
pub use sos::{Sem, Step};
pub use term::{act_set, sym, Action, ActSet, Node, Spec, Sym, Term};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ill-formed: {0}")]
    IllFormed(String),
    #[error("not syntactically guarded at depth {depth} (equation for {var})")]
    Unguarded { var: String, depth: usize },
    #[error("degenerate iteration: sigma*0 is unguarded")]
    DegenerateIteration,
    #[error("state bound exceeded: more than {0} states")]
    StateBound(usize),
    #[error("not eliminable: {0}")]
    NotEliminable(String),
    #[error("rewrite step budget of {0} exhausted")]
    StepBudget(usize),
    #[error("communication table is not handshaking")]
    NotHandshaking,
    #[error("{0}")]
    Precondition(String),
}
