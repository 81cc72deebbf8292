use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TauError {
    #[error("invalid basis: {0}")]
    InvalidSpec(String),

    #[error("matrix is singular ({context})")]
    Singular { context: &'static str },

    #[error("Jacobian is singular at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (|R| = {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("unknown {0} has no value in the state")]
    UnboundUnknown(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{count} boundary conditions on unknown {unknown} exceed its {rows} Tau rows")]
    TooManyBCs { unknown: usize, count: usize, rows: usize },

    #[error("quadrature did not converge with {nodes} nodes (change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },
}

pub type Result<T, E = TauError> = std::result::Result<T, E>;
