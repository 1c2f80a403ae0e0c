//! Random closed terms, axiom instances and sampled semantic checks.

pub mod axioms;
pub mod gen;
pub mod meta;
pub mod oracle;
pub mod witness;

pub use axioms::{check_axiom_soundness, check_axiom_under, designated_relation, AxiomReport, AXIOM_IDS};
pub use gen::{gen_closed_term, standard_table, GenOptions};
pub use meta::{check_meta_properties, MetaReport};
pub use witness::validate_witness;
