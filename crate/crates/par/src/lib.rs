//! The PAR protocol (positive acknowledgement with retransmission): sender,
//! receiver and two lossy channels, the reference specifications obtained
//! by expansion and abstraction, and the correctness and timing checks
//! built on them.

mod analysis;
mod model;

pub use analysis::{
    check_expansion, check_functional, check_performance, delivery_delays, first_delivery_time, post_delivery_gaps,
    run_report, CheckKind, ParReport, PerformanceVerdicts,
};
pub use model::{build_par_model, hidden_actions, reference_specs, ParParams};

#[derive(Debug, thiserror::Error)]
pub enum ParError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("time-out {t_sp} does not exceed the protocol cycle {cycle}")]
    Premature { t_sp: u32, cycle: u32 },
    #[error(transparent)]
    Core(#[from] drtcalc_core::Error),
}
