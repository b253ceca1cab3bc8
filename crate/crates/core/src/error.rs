use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus must be odd and at least 3, got {0}")]
    InvalidModulus(usize),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("lattice step {step} does not divide L={modulus}")]
    InvalidLattice { modulus: usize, step: usize },

    #[error("lattice mismatch between operands")]
    LatticeMismatch,

    #[error("point ({x}, {omega}) is not in the lattice")]
    NotInLattice { x: usize, omega: usize },

    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, found {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("transfer matrix is singular at xi index {witness} (lower bound {alpha:e})")]
    SingularTransfer { alpha: f64, witness: usize },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
