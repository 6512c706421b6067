//! Dilations of positive definite kernels on finite *-semigroups.
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod applications;
pub mod dilation;
pub mod kernel;
pub mod par;
pub mod semigroup;
pub mod synth;

pub use num_complex;

pub use algebra::{ComplexMatrix, DEFAULT_TOL};
pub use dilation::{build_dilation, DilationOptions, DilationTriple, Route};
pub use kernel::{AFunction, AKernel, ModuleElement, ModuleSpace};
pub use par::Execution;
pub use semigroup::FiniteStarSemigroup;
