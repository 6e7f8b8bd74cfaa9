use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The adaptive integrator ran out of its evaluation budget.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (estimate {value_estimate:e}, error estimate {error_estimate:e}, tolerance {tol:e})"
    )]
    NonConvergence {
        evaluations: usize,
        value_estimate: f64,
        error_estimate: f64,
        tol: f64,
    },

    #[error("moment diverges: {0}")]
    DivergentMoment(String),

    /// The Lévy measure puts no mass on `{|y| >= epsilon}`.
    #[error("no Lévy mass at or above the truncation level {epsilon}")]
    EmptyTruncation { epsilon: f64 },

    /// The operation needs an antiderivative the kernel does not have.
    #[error("{operation} is not available for the {kernel} kernel")]
    NotAvailable {
        operation: &'static str,
        kernel: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel table: {0}")]
    Table(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
