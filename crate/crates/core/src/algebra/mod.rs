//! Complex matrix arithmetic and Hermitian spectral primitives realizing `M_n(C)`.

mod matrix;
mod spectral;

use thiserror::Error;

pub use matrix::{block_assemble, block_extract, ComplexMatrix};
pub use spectral::{
    hermitian_eig, is_psd, numerical_rank, op_norm, psd_pinv, psd_sqrt, HermitianEig, PsdVerdict,
};
pub(crate) use spectral::{jacobi, verdict_from_eig};

/// Default tolerance for every predicate, always scaled by `max(1, ‖operand‖)`.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("NonSquare: matrix has shape {shape:?}")]
    NonSquare { shape: (usize, usize) },
    #[error("NonHermitian: ‖M − M*‖ = {deviation:e}")]
    NonHermitian { deviation: f64 },
    #[error("NotPSD: minimal eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("ShapeMismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("RaggedRows: row {row} has a different length")]
    RaggedRows { row: usize },
    #[error("RaggedBlocks: block ({row}, {col}) has the wrong shape")]
    RaggedBlocks { row: usize, col: usize },
    #[error("NoConvergence: Jacobi did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}
