use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} requires {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("unknown case id `{0}`")]
    UnknownCase(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("hypotheses of {case} violated: {}", violations.join("; "))]
    Hypothesis {
        case: String,
        violations: Vec<String>,
    },

    #[error("support of `{function}` is not admissible: {reason}")]
    Support { function: String, reason: String },

    #[error("integral diverges: {0}")]
    DivergentTail(String),

    #[error("insufficient smoothness: {0}")]
    Smoothness(String),

    #[error("integrand is not finite at r = {at}")]
    NonFinite { at: f64 },

    #[error(
        "quadrature did not reach tolerance after {subdivisions} subdivisions \
         (best estimate {best}, error estimate {error:e})"
    )]
    NonConvergence {
        best: Complex64,
        error: f64,
        subdivisions: usize,
    },

    #[error("{0}")]
    Degenerate(String),
}

impl Error {
    /// True for errors caused by the configuration rather than by numerics.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Domain { .. }
                | Error::UnknownCase(_)
                | Error::UnknownModel(_)
                | Error::Hypothesis { .. }
                | Error::Support { .. }
        )
    }
}
