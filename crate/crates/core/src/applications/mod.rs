//! Front-ends for classical dilation problems. Each pairs the semigroup
//! machinery with an independent textbook construction.

mod contraction;
mod cp;
mod moments;
mod naimark;
mod subnormal;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::dilation::DilationError;
use crate::kernel::KernelError;
use crate::num_complex::Complex64;

pub use contraction::{szn_contraction, ContractionReport};
pub use cp::{cp_check, kraus_from_choi, stinespring, CpMap, CpVerdict, StinespringReport};
pub use moments::{hamburger, multi_hamburger, HamburgerReport, MomentData, MultiHamburgerReport};
pub use naimark::{naimark, NaimarkReport, Povm};
pub use subnormal::{subnormality_kernel, subnormality_window, SubnormalReport, WindowFailure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApplicationError {
    #[error("NotCP: Choi matrix has minimal eigenvalue {min_eigenvalue:e}")]
    NotCp {
        min_eigenvalue: f64,
        witness: Vec<Complex64>,
    },
    #[error("NotPOVM: {0}")]
    NotPovm(String),
    #[error("NotContraction: ‖T‖ = {norm}")]
    NotContraction { norm: f64 },
    #[error("OddData: {0}")]
    OddData(String),
    #[error("Shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Dilation(#[from] DilationError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
