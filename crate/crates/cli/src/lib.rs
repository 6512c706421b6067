//! Batch front-end for `dilation-core`: problem files in, certificate reports out.

pub mod commands;
pub mod examples;
pub mod problem;
pub mod report;

use dilation_core::applications::ApplicationError;
use dilation_core::dilation::DilationError;
use dilation_core::kernel::KernelError;
use dilation_core::semigroup::SemigroupError;
use thiserror::Error;

pub use commands::{run, Command, Settings};
pub use problem::{Payload, Problem, ProblemOptions};
pub use report::{Report, Status};

/// Version tag written into every report and accepted in problem files.
pub const SCHEMA_VERSION: &str = "dilate/1";

/// JSON Schema for problem files and reports.
pub const SCHEMA: &str = include_str!("../schema/dilate-v1.schema.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("SchemaError at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("ShapeError at {field}: {message}")]
    Shape { field: String, message: String },
    #[error("IoError on {path}: {message}")]
    Io { path: String, message: String },
    #[error("UnsupportedKind: command {command} does not take {kind} problems")]
    UnsupportedKind { command: String, kind: String },
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Dilation(#[from] DilationError),
    #[error(transparent)]
    Application(#[from] ApplicationError),
}

impl CliError {
    /// Leading identifier of the rendered message, e.g. `NotPositiveDefinite`.
    pub fn name(&self) -> String {
        let text = self.to_string();
        let end = text.find([':', ' ']).unwrap_or(text.len());
        text[..end].to_string()
    }
}
