use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {0} is outside (0, 1]")]
    InvalidOrder(f64),

    #[error("gamma function has a pole at {0}")]
    Pole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series not converged after {terms} terms (last term magnitude {last_term:e})")]
    NotConverged { terms: usize, last_term: f64 },

    #[error("root iteration did not converge in {0} sweeps")]
    NoConvergence(usize),

    #[error("L-fractional wronskian at 0 is singular (|det| = {det:e})")]
    SingularWronskian { det: f64 },

    #[error("undetermined-coefficient ansatz does not match the forcing (residual {0:e})")]
    AnsatzMismatch(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
