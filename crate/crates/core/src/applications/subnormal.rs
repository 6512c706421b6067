//! Positive definiteness of `ω(a, b) = T*^a T^b` on windows of `N × N`.

use serde::{Deserialize, Serialize};

use super::ApplicationError;
use crate::algebra::{ComplexMatrix, PsdVerdict};
use crate::kernel::{check_positive_definite, AKernel};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowFailure {
    pub window: usize,
    pub certificate: PsdVerdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubnormalReport {
    /// Minimal eigenvalue of each window's block matrix, windows `1..=N`.
    pub min_eigenvalues: Vec<f64>,
    /// Smallest failing window; `None` means every window passes.
    pub failure: Option<WindowFailure>,
}

impl SubnormalReport {
    pub fn passes_all(&self) -> bool {
        self.failure.is_none()
    }
}

/// Kernel `K((p,q),(p′,q′)) = T*^{q+p′} T^{p+q′}` on `{(p,q) : p + q ≤ w}`.
pub fn subnormality_window(t: &ComplexMatrix, w: usize) -> Result<AKernel, ApplicationError> {
    let d = t.rows();
    let mut powers = vec![ComplexMatrix::identity(d)];
    for k in 1..=2 * w {
        powers.push(powers[k - 1].matmul(t));
    }
    let adj: Vec<ComplexMatrix> = powers.iter().map(ComplexMatrix::adjoint).collect();
    let points: Vec<(usize, usize)> = (0..=w).flat_map(|p| (0..=w - p).map(move |q| (p, q))).collect();
    let base = points.iter().map(|(p, q)| format!("({p},{q})")).collect();
    Ok(AKernel::from_fn(base, d, |i, j| {
        let (p, q) = points[i];
        let (p1, q1) = points[j];
        adj[q + p1].matmul(&powers[p + q1])
    })?)
}

pub fn subnormality_kernel(t: &ComplexMatrix, window: usize, tol: f64) -> Result<SubnormalReport, ApplicationError> {
    if !t.is_square() {
        return Err(ApplicationError::Shape(format!("T has shape {:?}", t.shape())));
    }
    let mut min_eigenvalues = Vec::with_capacity(window);
    let mut failure = None;
    for w in 1..=window {
        let verdict = check_positive_definite(&subnormality_window(t, w)?, tol)?;
        min_eigenvalues.push(verdict.min_eigenvalue);
        if !verdict.psd && failure.is_none() {
            failure = Some(WindowFailure {
                window: w,
                certificate: verdict,
            });
        }
    }
    Ok(SubnormalReport {
        min_eigenvalues,
        failure,
    })
}
