use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, ComplexMatrix, DEFAULT_TOL};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `M = U diag(values) U*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.col(k)
    }

    /// Indices of eigenvalues strictly above `tol · max(λ_max, 0)`.
    pub fn kept_indices(&self, tol: f64) -> Vec<usize> {
        let cut = tol * self.max_value().max(0.0);
        (0..self.dim())
            .filter(|&k| self.values[k] > cut && self.values[k] > 0.0)
            .collect()
    }

    /// Numerical rank with the cut `tol · λ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        self.kept_indices(tol).len()
    }

    /// `U f(Λ) U*` for a real spectral function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Rejects input whose anti-Hermitian part exceeds `1e-9 · max(1, ‖M‖_F)`.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NonSquare { shape: m.shape() });
    }
    let dev = m.hermitian_deviation();
    if dev > DEFAULT_TOL * m.frobenius_norm().max(1.0) {
        return Err(AlgebraError::NonHermitian { deviation: dev });
    }
    jacobi(&m.hermitian_part())
}

/// Jacobi on an exactly Hermitian input.
pub(crate) fn jacobi(m: &ComplexMatrix) -> Result<HermitianEig, AlgebraError> {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n == 0 || scale == 0.0 {
        return Ok(HermitianEig {
            values: vec![0.0; n],
            vectors: v,
        });
    }
    let target = f64::EPSILON * scale * n as f64;

    let mut converged = false;
    let mut prev_off = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        // stagnation at rounding level also counts as converged
        if off <= target || (off >= prev_off && off <= 1e-12 * scale) {
            converged = true;
            break;
        }
        prev_off = off;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(AlgebraError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.select_cols(&order);
    Ok(HermitianEig { values, vectors })
}

/// One two-sided rotation annihilating `a[p][q]`.
///
/// The unitary is `J = D R` with `D = diag(1, e^{-iφ})` on `(p, q)` folding the
/// phase of `a_pq = |a_pq| e^{iφ}` and `R` a real plane rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if b <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / b;
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J_pp = c, J_pq = s, J_qp = -s·conj(phase), J_qq = c·conj(phase)
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.rows();
    // A ← A J
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
    }
    // A ← J* A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
        a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V J
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

/// Outcome of a PSD test with its certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector for the minimal eigenvalue.
    pub witness: Vec<Complex64>,
    /// Threshold the minimal eigenvalue was compared against.
    pub threshold: f64,
}

/// PSD iff `λ_min ≥ −tol · max(1, ‖M‖)`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<PsdVerdict, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NonSquare { shape: m.shape() });
    }
    let dev = m.hermitian_deviation();
    let fro = m.frobenius_norm();
    if dev > tol.max(DEFAULT_TOL) * fro.max(1.0) {
        return Err(AlgebraError::NonHermitian { deviation: dev });
    }
    if m.rows() == 0 {
        return Ok(PsdVerdict {
            psd: true,
            min_eigenvalue: 0.0,
            witness: Vec::new(),
            threshold: 0.0,
        });
    }
    let eig = jacobi(&m.hermitian_part())?;
    Ok(verdict_from_eig(&eig, tol))
}

pub(crate) fn verdict_from_eig(eig: &HermitianEig, tol: f64) -> PsdVerdict {
    let norm = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = -tol * norm.max(1.0);
    let min = eig.min_value();
    PsdVerdict {
        psd: min >= threshold,
        min_eigenvalue: min,
        witness: eig.eigenvector(0),
        threshold,
    }
}

/// Hermitian PSD square root.
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, AlgebraError> {
    let verdict = is_psd(m, tol)?;
    if !verdict.psd {
        return Err(AlgebraError::NotPsd {
            min_eigenvalue: verdict.min_eigenvalue,
        });
    }
    let eig = jacobi(&m.hermitian_part())?;
    Ok(eig.apply(|x| x.max(0.0).sqrt()))
}

/// Largest singular value.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = if m.rows() >= m.cols() {
        m.adjoint_mul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    // the Gram matrix is Hermitian by construction
    match jacobi(&gram.hermitian_part()) {
        Ok(eig) => eig.max_value().max(0.0).sqrt(),
        Err(_) => m.frobenius_norm(),
    }
}

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix, cutting at `tol · λ_max`.
pub fn psd_pinv(eig: &HermitianEig, tol: f64) -> ComplexMatrix {
    let cut = tol * eig.max_value().max(0.0);
    eig.apply(|x| if x > cut && x > 0.0 { 1.0 / x } else { 0.0 })
}

/// Numerical rank of an arbitrary matrix via its Gram, cutting at `tol · λ_max(M*M)`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let gram = if m.rows() >= m.cols() {
        m.adjoint_mul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    jacobi(&gram.hermitian_part()).map_or(0, |e| e.rank(tol))
}
