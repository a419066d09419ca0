use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock truncation must keep at least 2 states, got {0}")]
    TruncationTooSmall(usize),

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("density matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("at g = {g:?}: {source}")]
    AtCoupling {
        g: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, g: f64) -> Self {
        Error::AtCoupling {
            g,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
