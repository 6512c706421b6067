//! Unitary dilation of a contraction.

use serde::{Deserialize, Serialize};

use super::ApplicationError;
use crate::algebra::{hermitian_eig, op_norm, ComplexMatrix, PsdVerdict};
use crate::kernel::{check_positive_definite, AKernel};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContractionReport {
    pub norm: f64,
    /// Block unitary on `C^{d(2N+1)}` with `T` in the corner.
    pub unitary: ComplexMatrix,
    /// `‖U*U − I‖`
    pub unitarity_error: f64,
    /// `max_{0≤k≤N} ‖P U^k P − T^k‖` and the same for `U*` against `T*`.
    pub compression_error: f64,
    pub defect_norm: f64,
    pub adjoint_defect_norm: f64,
    /// Toeplitz kernel `(i, j) ↦ ω(j − i)` on `{−N, …, N}`.
    pub window: PsdVerdict,
}

fn power(t: &ComplexMatrix, k: usize) -> ComplexMatrix {
    (0..k).fold(ComplexMatrix::identity(t.rows()), |acc, _| acc.matmul(t))
}

/// `ω(k) = T^k` for `k ≥ 0`, `(T*)^{-k}` otherwise.
fn toeplitz_symbol(t: &ComplexMatrix, k: i64) -> ComplexMatrix {
    if k >= 0 {
        power(t, k as usize)
    } else {
        power(&t.adjoint(), (-k) as usize)
    }
}

/// Egerváry-type truncation of the Schäffer dilation:
///
/// ```text
/// row 0: [ T    0 … 0  D_{T*} ]
/// row 1: [ D_T  0 … 0  −T*    ]
/// row k: I in column k − 1, k ≥ 2
/// ```
///
/// It is unitary and compresses to `T^k` for `0 ≤ k ≤ 2N`.
pub fn szn_contraction(t: &ComplexMatrix, window: usize, tol: f64) -> Result<ContractionReport, ApplicationError> {
    if !t.is_square() {
        return Err(ApplicationError::Shape(format!("T has shape {:?}", t.shape())));
    }
    let d = t.rows();
    let norm = op_norm(t);
    if norm > 1.0 + tol {
        return Err(ApplicationError::NotContraction { norm });
    }
    let id = ComplexMatrix::identity(d);
    // both defects from one spectral decomposition of T*T, so that
    // T D_T = D_{T*} T holds to rounding even when ‖T‖ = 1
    let eig = hermitian_eig(&t.adjoint_mul(t).hermitian_part())?;
    let defect = eig.apply(|x| (1.0 - x.clamp(0.0, 1.0)).sqrt());
    let inner = eig.apply(|x| 1.0 / (1.0 + (1.0 - x.clamp(0.0, 1.0)).sqrt()));
    let adjoint_defect = &id - &t.matmul(&inner).matmul(&t.adjoint());

    let blocks = 2 * window + 1;
    let size = blocks * d;
    let mut u = ComplexMatrix::zeros(size, size);
    let last = (blocks - 1) * d;
    u.set_submatrix(0, 0, t);
    if blocks > 1 {
        u.set_submatrix(d, 0, &defect);
        u.set_submatrix(0, last, &adjoint_defect);
        u.set_submatrix(d, last, &-&t.adjoint());
        for k in 2..blocks {
            u.set_submatrix(k * d, (k - 1) * d, &id);
        }
    } else {
        // a single block can only hold a unitary T
        u = t.clone();
    }
    let unitarity_error = op_norm(&(&u.adjoint_mul(&u) - &ComplexMatrix::identity(size)));

    let mut compression_error = 0.0f64;
    let mut up = ComplexMatrix::identity(size);
    let mut tk = id.clone();
    for _ in 0..=window {
        let corner = up.submatrix(0, 0, d, d);
        compression_error = compression_error
            .max(op_norm(&(&corner - &tk)))
            .max(op_norm(&(&corner.adjoint() - &tk.adjoint())));
        up = up.matmul(&u);
        tk = tk.matmul(t);
    }

    let n = window as i64;
    let base: Vec<String> = (-n..=n).map(|i| i.to_string()).collect();
    let kernel = AKernel::from_fn(base, d, |i, j| toeplitz_symbol(t, j as i64 - i as i64))?;
    let verdict = check_positive_definite(&kernel, tol)?;

    Ok(ContractionReport {
        norm,
        unitary: u,
        unitarity_error,
        compression_error,
        defect_norm: op_norm(&defect),
        adjoint_defect_norm: op_norm(&adjoint_defect),
        window: verdict,
    })
}
