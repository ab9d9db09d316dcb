use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("occupation ({n_x}, {n_y}) exceeds the cutoffs ({n_max_x}, {n_max_y})")]
    OccupationOutOfRange {
        n_x: usize,
        n_y: usize,
        n_max_x: usize,
        n_max_y: usize,
    },

    #[error("phonon sector N = {n} is outside the truncated space (max {max})")]
    SectorOutOfRange { n: usize, max: usize },

    #[error("index {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index {0} is listed more than once")]
    DuplicateIndex(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator `{label}` is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { label: String, deviation: f64 },

    #[error("operator `{0}` does not act as the identity on the qubit")]
    NotQubitTrivial(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("measurement outcome has probability {0:e}; collapse is undefined")]
    ZeroProbabilityOutcome(f64),

    #[error("state is not a product with the electronic ground state (excited weight {0:e})")]
    NotGroundProduct(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("every grid point of the scan has a vanishing ground probability")]
    DegenerateScan,

    #[error("eigendecomposition failed to converge on a block of size {0}")]
    Eigensolver(usize),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
