use thiserror::Error;

/// Errors raised across the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid {penalty} parameter: {detail} (admissible range {range})")]
    Parameter {
        penalty: &'static str,
        detail: String,
        range: &'static str,
    },

    #[error("penalty violates assumption(s) {violated:?} (worst margin {worst_margin:e} at u = {witness_u})")]
    AssumptionViolated {
        violated: Vec<crate::penalty::AssumptionTag>,
        worst_margin: f64,
        witness_u: f64,
    },

    #[error("problem is infeasible: phase-1 residual {phase1_value:e}")]
    Infeasible { phase1_value: f64 },

    #[error("numerical failure at iteration {iteration}: {detail}")]
    Numerical { iteration: usize, detail: String },

    #[error("instance too large for exhaustive enumeration: {0}")]
    OracleSize(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
