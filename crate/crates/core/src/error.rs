use thiserror::Error;

use crate::eigensolver::ConvergenceReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed FCIDUMP header: {0}")]
    Header(String),

    #[error("line {line}: orbital index {index} outside [1, {norb}]")]
    IndexOutOfRange { line: usize, index: i64, norb: usize },

    #[error("line {line}: integral {tuple:?} given twice with different values ({first} vs {second})")]
    InconsistentDuplicate {
        line: usize,
        tuple: [usize; 4],
        first: f64,
        second: f64,
    },

    #[error("{norb} orbitals exceeds the supported maximum of {max}")]
    TooManyOrbitals { norb: usize, max: usize },

    #[error("invalid integral set: {0}")]
    InvalidIntegrals(String),

    #[error("invalid orbital partition: {0}")]
    Partition(String),

    #[error("{count} bath mode(s) with non-positive bare frequency (first: {first}); pass drop_unstable_modes to remove them")]
    UnstableModes { count: usize, first: String },

    #[error("coupling matrix is not positive definite: eigenvalue {eigenvalue:.6e} at index {index}")]
    PositiveDefiniteness { index: usize, eigenvalue: f64 },

    #[error("coupling matrix is singular or indefinite; cannot invert")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} of size {size} exceeds the cap of {cap}")]
    SizeCap { what: &'static str, size: usize, cap: usize },

    #[error("eigensolver did not converge: {report}")]
    NonConvergence { report: ConvergenceReport },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnstableModes { .. }
            | Error::PositiveDefiniteness { .. }
            | Error::SingularMatrix
            | Error::NonConvergence { .. } => 3,
            _ => 2,
        }
    }
}
