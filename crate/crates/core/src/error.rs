use thiserror::Error;

/// Errors raised by the numerical kernels and the physics layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{operation} did not converge: {detail}")]
    NonConvergent {
        operation: &'static str,
        detail: String,
    },

    #[error("non-finite integrand value {value} at {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("time step too coarse: frequency * step = {product:.3e} exceeds {limit}")]
    StepTooCoarse { product: f64, limit: f64 },

    #[error("Zeno time is infinite for a decoupled system (alpha = 0)")]
    InfiniteZenoTime,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn non_convergent(operation: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergent {
            operation,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
