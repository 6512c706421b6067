//! `M_n`-valued kernels on finite base sets and their reproducing kernel
//! Hilbert modules.
//!
//! The module `E_K` is modelled by its Gram matrix `G` (block `(s, t)` equal to
//! `K(s, t)`). Coefficient columns `c = (c_s)` stand for `Σ_s K_s c_s`; two
//! columns name the same element iff their difference lies in `ker G`. The
//! quotient is realized concretely through the reducer `R = diag(√λ) U*`
//! (kept eigenpairs of `G`), so `E_K` is the space of `r × n` matrices with
//! inner product `⟨x, y⟩ = x* y` and right action `x · a`.
//!
//! Evaluation convention: `F(s) := ⟨F, K_s⟩`, hence the section `K_t b`
//! evaluates to `b* K(t, s)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    block_assemble, jacobi, op_norm, verdict_from_eig, AlgebraError, ComplexMatrix, HermitianEig,
    PsdVerdict,
};
use crate::semigroup::FiniteStarSemigroup;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("Shape: {0}")]
    Shape(String),
    #[error("NonHermitianKernel: max ‖K(s,t) − K(t,s)*‖ = {deviation:e}")]
    NonHermitianKernel { deviation: f64 },
    #[error("NotPositiveDefinite: minimal Gram eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite {
        min_eigenvalue: f64,
        witness: Vec<Complex64>,
    },
    #[error("BaseMismatch: {0}")]
    BaseMismatch(String),
    #[error("UnknownPoint: {0}")]
    UnknownPoint(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Kernel `K: base × base → M_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AKernel {
    base: Vec<String>,
    n: usize,
    /// Row-major over `(s, t)`.
    blocks: Vec<ComplexMatrix>,
}

impl AKernel {
    pub fn new(base: Vec<String>, n: usize, blocks: Vec<ComplexMatrix>) -> Result<Self, KernelError> {
        let len = base.len();
        if blocks.len() != len * len {
            return Err(KernelError::Shape(format!(
                "{} blocks for {} base points",
                blocks.len(),
                len
            )));
        }
        if let Some(k) = blocks.iter().position(|b| b.shape() != (n, n)) {
            return Err(KernelError::Shape(format!(
                "block ({}, {}) is {:?}, expected {n}x{n}",
                base[k / len],
                base[k % len],
                blocks[k].shape()
            )));
        }
        Ok(Self { base, n, blocks })
    }

    pub fn from_fn(
        base: Vec<String>,
        n: usize,
        f: impl Fn(usize, usize) -> ComplexMatrix,
    ) -> Result<Self, KernelError> {
        let len = base.len();
        let blocks = (0..len * len).map(|k| f(k / len, k % len)).collect();
        Self::new(base, n, blocks)
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> &ComplexMatrix {
        &self.blocks[s * self.len() + t]
    }

    pub fn index_of(&self, point: &str) -> Option<usize> {
        self.base.iter().position(|p| p == point)
    }

    /// Block Gram matrix `[K(s, t)]`.
    pub fn gram(&self) -> ComplexMatrix {
        let len = self.len();
        let grid: Vec<Vec<ComplexMatrix>> = (0..len)
            .map(|s| (0..len).map(|t| self.get(s, t).clone()).collect())
            .collect();
        block_assemble(&grid).unwrap_or_else(|_| ComplexMatrix::zeros(0, 0))
    }

    /// Largest block operator norm.
    pub fn max_block_norm(&self) -> f64 {
        self.blocks.iter().map(op_norm).fold(0.0, f64::max)
    }
}

/// `M_n`-valued function on a base set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AFunction {
    base: Vec<String>,
    n: usize,
    values: Vec<ComplexMatrix>,
}

impl AFunction {
    pub fn new(base: Vec<String>, values: Vec<ComplexMatrix>) -> Result<Self, KernelError> {
        if base.len() != values.len() {
            return Err(KernelError::Shape(format!(
                "{} values for {} base points",
                values.len(),
                base.len()
            )));
        }
        let n = values.first().map_or(0, ComplexMatrix::rows);
        if let Some(k) = values.iter().position(|v| v.shape() != (n, n)) {
            return Err(KernelError::Shape(format!(
                "value at {} is {:?}, expected {n}x{n}",
                base[k],
                values[k].shape()
            )));
        }
        Ok(Self { base, n, values })
    }

    /// Function on the elements of `s`, in index order.
    pub fn on_semigroup(s: &FiniteStarSemigroup, values: Vec<ComplexMatrix>) -> Result<Self, KernelError> {
        Self::new(s.labels().to_vec(), values)
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn value(&self, s: usize) -> &ComplexMatrix {
        &self.values[s]
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            base: self.base.clone(),
            n: self.n,
            values: self.values.iter().map(|v| v.scale(lambda)).collect(),
        }
    }

    /// Stacked column `[F(s)*]_s` of shape `Nn × n`.
    pub(crate) fn stacked_adjoint(&self) -> ComplexMatrix {
        let parts: Vec<ComplexMatrix> = self.values.iter().map(ComplexMatrix::adjoint).collect();
        ComplexMatrix::vstack(&parts)
    }

    /// Row block `[F(s_1) … F(s_N)]` of shape `n × Nn`.
    pub(crate) fn row_block(&self) -> ComplexMatrix {
        ComplexMatrix::hstack(&self.values)
    }
}

/// Element `Σ_s K_s c_s` of `D_K`, stored as the stacked `Nn × n` column `(c_s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleElement {
    coefficients: ComplexMatrix,
    n: usize,
}

impl ModuleElement {
    pub fn from_blocks(blocks: &[ComplexMatrix]) -> Result<Self, KernelError> {
        let n = blocks.first().map_or(0, ComplexMatrix::rows);
        if blocks.iter().any(|b| b.shape() != (n, n)) {
            return Err(KernelError::Shape("coefficient blocks must all be n x n".into()));
        }
        Ok(Self {
            coefficients: ComplexMatrix::vstack(blocks),
            n,
        })
    }

    pub fn from_stacked(coefficients: ComplexMatrix) -> Result<Self, KernelError> {
        let n = coefficients.cols();
        if n == 0 || !coefficients.rows().is_multiple_of(n) {
            return Err(KernelError::Shape(format!(
                "stacked coefficients {:?} are not a block column",
                coefficients.shape()
            )));
        }
        Ok(Self { coefficients, n })
    }

    pub fn zero(points: usize, n: usize) -> Self {
        Self {
            coefficients: ComplexMatrix::zeros(points * n, n),
            n,
        }
    }

    /// `K_t b`.
    pub fn section(points: usize, t: usize, b: &ComplexMatrix) -> Self {
        let n = b.rows();
        let mut c = ComplexMatrix::zeros(points * n, n);
        c.set_submatrix(t * n, 0, b);
        Self { coefficients: c, n }
    }

    pub fn random<R: Rng + ?Sized>(points: usize, n: usize, rng: &mut R) -> Self {
        Self {
            coefficients: ComplexMatrix::random(points * n, n, rng),
            n,
        }
    }

    pub fn points(&self) -> usize {
        self.coefficients.rows() / self.n
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, s: usize) -> ComplexMatrix {
        self.coefficients.submatrix(s * self.n, 0, self.n, self.n)
    }

    pub fn stacked(&self) -> &ComplexMatrix {
        &self.coefficients
    }

    /// Right module action `c · a`.
    pub fn right_mul(&self, a: &ComplexMatrix) -> Self {
        Self {
            coefficients: self.coefficients.matmul(a),
            n: self.n,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coefficients: &self.coefficients + &other.coefficients,
            n: self.n,
        }
    }
}

/// Hermitian-symmetry defect `max_{s,t} ‖K(s,t) − K(t,s)*‖`.
pub fn check_hermitian_symmetry(k: &AKernel) -> f64 {
    let len = k.len();
    let mut worst = 0.0f64;
    for s in 0..len {
        for t in s..len {
            let d = k.get(s, t) - &k.get(t, s).adjoint();
            worst = worst.max(op_norm(&d));
        }
    }
    worst
}

fn ensure_hermitian(k: &AKernel, tol: f64) -> Result<(), KernelError> {
    let deviation = check_hermitian_symmetry(k);
    if deviation > tol * k.max_block_norm().max(1.0) {
        return Err(KernelError::NonHermitianKernel { deviation });
    }
    Ok(())
}

/// Positive definiteness over every finite choice of points and coefficients,
/// decided on the full block Gram matrix.
pub fn check_positive_definite(k: &AKernel, tol: f64) -> Result<PsdVerdict, KernelError> {
    ensure_hermitian(k, tol)?;
    let gram = k.gram();
    if gram.rows() == 0 {
        return Ok(PsdVerdict {
            psd: true,
            min_eigenvalue: 0.0,
            witness: Vec::new(),
            threshold: 0.0,
        });
    }
    let eig = jacobi(&gram.hermitian_part())?;
    Ok(verdict_from_eig(&eig, tol))
}

/// Invariant kernel `K(s, t) = ω(s* t)`.
pub fn kernel_from_omega(s: &FiniteStarSemigroup, omega: &AFunction) -> Result<AKernel, KernelError> {
    if omega.len() != s.len() {
        return Err(KernelError::BaseMismatch(format!(
            "omega has {} values, semigroup has {} elements",
            omega.len(),
            s.len()
        )));
    }
    AKernel::from_fn(s.labels().to_vec(), omega.n(), |a, b| {
        omega.value(s.mul(s.star(a), b)).clone()
    })
}

/// Reproducing kernel Hilbert module of a positive definite kernel, in
/// reduced coordinates.
#[derive(Clone, Debug)]
pub struct ModuleSpace {
    kernel: AKernel,
    gram: ComplexMatrix,
    eig: HermitianEig,
    rank: usize,
    /// `r × Nn`
    reducer: ComplexMatrix,
    /// `Nn × r`
    pinv: ComplexMatrix,
    tol: f64,
}

/// Result of the membership test for an `A`-function.
#[derive(Clone, Debug)]
pub struct Membership {
    /// Least-squares coefficient column (minimal norm).
    pub candidate: ModuleElement,
    /// `‖G c − [F(s)*]‖_F`
    pub residual: f64,
    pub in_module: bool,
    /// `‖⟨c, c⟩‖`, i.e. `‖F‖_K²` when `F` belongs to the module.
    pub norm_sq: f64,
}

impl Membership {
    pub fn representative(&self) -> Option<&ModuleElement> {
        self.in_module.then_some(&self.candidate)
    }
}

/// Smallest `λ` with `[F(s_k)* F(s_l)] ≤ λ [K(s_k, s_l)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domination {
    Finite(f64),
    /// Range obstruction; carries the size of the component outside `range G`.
    Infinite { residual: f64 },
}

impl ModuleSpace {
    /// Build the module; refuses kernels that are not positive definite.
    pub fn build(kernel: &AKernel, tol: f64) -> Result<Self, KernelError> {
        ensure_hermitian(kernel, tol)?;
        let gram = kernel.gram().hermitian_part();
        let eig = jacobi(&gram)?;
        let verdict = verdict_from_eig(&eig, tol);
        if !verdict.psd {
            return Err(KernelError::NotPositiveDefinite {
                min_eigenvalue: verdict.min_eigenvalue,
                witness: verdict.witness,
            });
        }
        let kept = eig.kept_indices(tol);
        let rank = kept.len();
        let dim = gram.rows();
        let mut reducer = ComplexMatrix::zeros(rank, dim);
        let mut pinv = ComplexMatrix::zeros(dim, rank);
        for (row, &k) in kept.iter().enumerate() {
            let root = eig.values[k].sqrt();
            for i in 0..dim {
                let u = eig.vectors[(i, k)];
                reducer[(row, i)] = u.conj() * root;
                pinv[(i, row)] = u / root;
            }
        }
        Ok(Self {
            kernel: kernel.clone(),
            gram,
            eig,
            rank,
            reducer,
            pinv,
            tol,
        })
    }

    pub fn kernel(&self) -> &AKernel {
        &self.kernel
    }

    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    pub fn eigen(&self) -> &HermitianEig {
        &self.eig
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    pub fn points(&self) -> usize {
        self.kernel.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn reducer(&self) -> &ComplexMatrix {
        &self.reducer
    }

    pub fn pseudo_inverse(&self) -> &ComplexMatrix {
        &self.pinv
    }

    /// Orthogonal projector `R⁺R` onto `range G`.
    pub fn range_projector(&self) -> ComplexMatrix {
        self.pinv.matmul(&self.reducer)
    }

    /// Columns of `R` belonging to base point `s` (`r × n`): reduced coordinates of `K_s`.
    pub fn section_coordinates(&self, s: usize) -> ComplexMatrix {
        let n = self.n();
        self.reducer.submatrix(0, s * n, self.rank, n)
    }

    fn check_element(&self, c: &ModuleElement) -> Result<(), KernelError> {
        if c.points() != self.points() || c.n() != self.n() {
            return Err(KernelError::BaseMismatch(format!(
                "element has {} blocks of size {}, module has {} of size {}",
                c.points(),
                c.n(),
                self.points(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Reduced coordinates `R c` (`r × n`).
    pub fn reduce(&self, c: &ModuleElement) -> Result<ComplexMatrix, KernelError> {
        self.check_element(c)?;
        Ok(self.reducer.matmul(c.stacked()))
    }

    /// Canonical coefficient column for reduced coordinates `x`: `R⁺ x`.
    pub fn lift(&self, x: &ComplexMatrix) -> Result<ModuleElement, KernelError> {
        if x.shape() != (self.rank, self.n()) {
            return Err(KernelError::Shape(format!(
                "reduced coordinates {:?}, expected {}x{}",
                x.shape(),
                self.rank,
                self.n()
            )));
        }
        ModuleElement::from_stacked(self.pinv.matmul(x))
    }

    /// `⟨c, d⟩ = c* G d = Σ_{s,t} c_s* K(s,t) d_t`.
    pub fn inner_product(&self, c: &ModuleElement, d: &ModuleElement) -> Result<ComplexMatrix, KernelError> {
        self.check_element(c)?;
        self.check_element(d)?;
        Ok(c.stacked().adjoint_mul(&self.gram.matmul(d.stacked())))
    }

    /// `‖c‖ = ‖⟨c, c⟩‖^{1/2}`.
    pub fn norm(&self, c: &ModuleElement) -> Result<f64, KernelError> {
        Ok(op_norm(&self.inner_product(c, c)?).sqrt())
    }

    /// `F(s) = ⟨F, K_s⟩ = Σ_t c_t* K(t, s)`.
    pub fn evaluate(&self, c: &ModuleElement, s: usize) -> Result<ComplexMatrix, KernelError> {
        self.check_element(c)?;
        if s >= self.points() {
            return Err(KernelError::UnknownPoint(format!("index {s}")));
        }
        let n = self.n();
        let column = self.gram.submatrix(0, s * n, self.gram.rows(), n);
        Ok(c.stacked().adjoint_mul(&column))
    }

    pub fn evaluate_at(&self, c: &ModuleElement, point: &str) -> Result<ComplexMatrix, KernelError> {
        let s = self
            .kernel
            .index_of(point)
            .ok_or_else(|| KernelError::UnknownPoint(point.to_string()))?;
        self.evaluate(c, s)
    }

    /// The `A`-function represented by `c`.
    pub fn function_of(&self, c: &ModuleElement) -> Result<AFunction, KernelError> {
        self.check_element(c)?;
        let values = (0..self.points())
            .map(|s| self.evaluate(c, s))
            .collect::<Result<Vec<_>, _>>()?;
        AFunction::new(self.kernel.base().to_vec(), values)
    }

    fn check_function(&self, f: &AFunction) -> Result<(), KernelError> {
        if f.len() != self.points() || (f.n() != self.n() && !f.is_empty()) {
            return Err(KernelError::BaseMismatch(format!(
                "function has {} values of size {}, module has {} points of size {}",
                f.len(),
                f.n(),
                self.points(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Does `F` belong to `E_K`? Solves `G c = [F(s)*]` in least squares.
    pub fn membership(&self, f: &AFunction, tol: f64) -> Result<Membership, KernelError> {
        self.check_function(f)?;
        let target = f.stacked_adjoint();
        // G⁺ = R⁺ R⁺*
        let coeffs = self.pinv.matmul(&self.pinv.adjoint_mul(&target));
        let residual = (&self.gram.matmul(&coeffs) - &target).frobenius_norm();
        let candidate = ModuleElement::from_stacked(coeffs)?;
        let norm_sq = op_norm(&self.inner_product(&candidate, &candidate)?);
        Ok(Membership {
            in_module: residual <= tol * (1.0 + target.frobenius_norm()),
            candidate,
            residual,
            norm_sq,
        })
    }

    /// Smallest `λ ≥ 0` with `[F(s_k)* F(s_l)]_{k,l} ≤ λ G`, by bisection against
    /// the PSD test on the full base.
    pub fn domination_test(&self, f: &AFunction, tol: f64) -> Result<Domination, KernelError> {
        self.check_function(f)?;
        let column = f.stacked_adjoint();
        let scale = column.frobenius_norm();
        if scale == 0.0 {
            return Ok(Domination::Finite(0.0));
        }
        let outside = (&column - &self.range_projector().matmul(&column)).frobenius_norm();
        if outside > tol * (1.0 + scale) {
            return Ok(Domination::Infinite { residual: outside });
        }
        let dominated = column.matmul(&column.adjoint());
        let feasible = |lambda: f64| -> Result<bool, KernelError> {
            let m = &self.gram.scale(lambda) - &dominated;
            let eig = jacobi(&m.hermitian_part())?;
            Ok(verdict_from_eig(&eig, tol).psd)
        };
        let smallest_kept = self
            .eig
            .kept_indices(self.tol)
            .first()
            .map_or(1.0, |&k| self.eig.values[k]);
        let mut hi = scale * scale / smallest_kept + 1.0;
        let mut grow = 0;
        while !feasible(hi)? {
            hi *= 2.0;
            grow += 1;
            if grow > 60 {
                return Ok(Domination::Infinite { residual: outside });
            }
        }
        let mut lo = 0.0;
        if feasible(lo)? {
            return Ok(Domination::Finite(0.0));
        }
        for _ in 0..200 {
            if hi - lo <= tol * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Domination::Finite(hi))
    }

    /// Max over base pairs and sampled coefficients of
    /// `‖⟨K_s a, K_t b⟩ − a* K(s,t) b‖`, evaluated in reduced coordinates.
    pub fn kolmogorov_check(&self, samples: &[ComplexMatrix]) -> f64 {
        let n = self.n();
        let mut coeffs = vec![ComplexMatrix::identity(n)];
        coeffs.extend(samples.iter().filter(|a| a.shape() == (n, n)).cloned());
        let sections: Vec<ComplexMatrix> = (0..self.points()).map(|s| self.section_coordinates(s)).collect();
        let mut worst = 0.0f64;
        for s in 0..self.points() {
            for t in 0..self.points() {
                let k = self.kernel.get(s, t);
                for a in &coeffs {
                    let xa = sections[s].matmul(a);
                    for b in &coeffs {
                        let lhs = xa.adjoint_mul(&sections[t].matmul(b));
                        let rhs = a.adjoint_mul(&k.matmul(b));
                        worst = worst.max(op_norm(&(&lhs - &rhs)));
                    }
                }
            }
        }
        worst
    }

    /// Kernel `(i, j) ↦ ⟨ξ_i, ξ_j⟩` of a family of module elements.
    pub fn induced_kernel(&self, elements: &[ModuleElement]) -> Result<AKernel, KernelError> {
        let len = elements.len();
        let mut blocks = Vec::with_capacity(len * len);
        for a in elements {
            for b in elements {
                blocks.push(self.inner_product(a, b)?);
            }
        }
        AKernel::new((0..len).map(|i| format!("xi{i}")).collect(), self.n(), blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(x: f64) -> ComplexMatrix {
        ComplexMatrix::scalar(c(x, 0.0))
    }

    fn z2_kernel(x: f64) -> AKernel {
        let g = FiniteStarSemigroup::cyclic_group(2).unwrap();
        let omega = AFunction::on_semigroup(&g, vec![scalar(1.0), scalar(x)]).unwrap();
        kernel_from_omega(&g, &omega).unwrap()
    }

    /// `Σ_{s,t} c_s* K(s,t) d_t` as an explicit double loop.
    fn double_sum(k: &AKernel, c: &ModuleElement, d: &ModuleElement) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(k.n(), k.n());
        for s in 0..k.len() {
            for t in 0..k.len() {
                acc = &acc + &c.block(s).adjoint_mul(&k.get(s, t).matmul(&d.block(t)));
            }
        }
        acc
    }

    #[test]
    fn omega_kernel_examples() {
        let g = FiniteStarSemigroup::cyclic_group(1).unwrap();
        let omega = AFunction::on_semigroup(&g, vec![scalar(1.0)]).unwrap();
        assert_eq!(kernel_from_omega(&g, &omega).unwrap().gram(), scalar(1.0));

        let k = z2_kernel(0.3);
        assert_eq!(k.gram(), ComplexMatrix::from_real(&[&[1.0, 0.3], &[0.3, 1.0]]));

        let s = FiniteStarSemigroup::intersection_semigroup(1).unwrap();
        let omega = AFunction::on_semigroup(&s, vec![scalar(0.0), scalar(1.0)]).unwrap();
        let k = kernel_from_omega(&s, &omega).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(k.get(a, b), omega.value(a & b));
            }
        }
    }

    #[test]
    fn omega_length_mismatch() {
        let g = FiniteStarSemigroup::cyclic_group(3).unwrap();
        let omega = AFunction::new(vec!["a".into()], vec![scalar(1.0)]).unwrap();
        assert!(matches!(kernel_from_omega(&g, &omega), Err(KernelError::BaseMismatch(_))));
    }

    #[test]
    fn pd_examples() {
        let base: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let k = AKernel::from_fn(base, 2, |s, t| {
            if s == t {
                ComplexMatrix::identity(2)
            } else {
                ComplexMatrix::zeros(2, 2)
            }
        })
        .unwrap();
        assert!(check_positive_definite(&k, DEFAULT_TOL).unwrap().psd);

        assert!(check_positive_definite(&z2_kernel(1.0), DEFAULT_TOL).unwrap().psd);
        assert!(check_positive_definite(&z2_kernel(-0.7), DEFAULT_TOL).unwrap().psd);
        let v = check_positive_definite(&z2_kernel(2.0), DEFAULT_TOL).unwrap();
        assert!(!v.psd);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vs: Vec<ComplexMatrix> = (0..4).map(|_| ComplexMatrix::random(3, 2, &mut rng)).collect();
        let base: Vec<String> = (0..4).map(|i| i.to_string()).collect();
        let k = AKernel::from_fn(base, 2, |s, t| vs[s].adjoint_mul(&vs[t])).unwrap();
        assert!(check_positive_definite(&k, DEFAULT_TOL).unwrap().psd);
    }

    #[test]
    fn non_hermitian_kernel_rejected() {
        let base = vec!["s".to_string(), "t".to_string()];
        let i = ComplexMatrix::scalar(c(0.0, 1.0));
        let k = AKernel::new(base, 1, vec![scalar(1.0), i.clone(), i, scalar(1.0)]).unwrap();
        assert_abs_diff_eq!(check_hermitian_symmetry(&k), 2.0, epsilon = 1e-14);
        assert!(matches!(
            check_positive_definite(&k, DEFAULT_TOL),
            Err(KernelError::NonHermitianKernel { .. })
        ));
        assert!(ModuleSpace::build(&k, DEFAULT_TOL).is_err());
    }

    #[test]
    fn symmetry_of_diagonal_kernel() {
        let base = vec!["s".to_string(), "t".to_string()];
        let h = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 2.0)], vec![c(0.0, -2.0), c(3.0, 0.0)]])
            .unwrap();
        let k = AKernel::from_fn(base, 2, |s, t| if s == t { h.clone() } else { ComplexMatrix::zeros(2, 2) })
            .unwrap();
        assert_eq!(check_hermitian_symmetry(&k), 0.0);
        assert!(check_hermitian_symmetry(&z2_kernel(0.5)) < 1e-12);
    }

    #[test]
    fn ragged_kernel_blocks() {
        let base = vec!["s".to_string()];
        assert!(matches!(
            AKernel::new(base, 2, vec![ComplexMatrix::identity(3)]),
            Err(KernelError::Shape(_))
        ));
    }

    #[test]
    fn module_ranks() {
        let one = AKernel::new(vec!["s".into()], 1, vec![scalar(1.0)]).unwrap();
        let m = ModuleSpace::build(&one, DEFAULT_TOL).unwrap();
        assert_eq!(m.rank(), 1);
        assert_abs_diff_eq!(m.reducer()[(0, 0)].norm(), 1.0, epsilon = 1e-15);

        assert_eq!(ModuleSpace::build(&z2_kernel(1.0), DEFAULT_TOL).unwrap().rank(), 1);
        assert_eq!(ModuleSpace::build(&z2_kernel(0.0), DEFAULT_TOL).unwrap().rank(), 2);
        assert!(matches!(
            ModuleSpace::build(&z2_kernel(2.0), DEFAULT_TOL),
            Err(KernelError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn reducer_invariants() {
        let m = ModuleSpace::build(&z2_kernel(1.0), DEFAULT_TOL).unwrap();
        let rr = m.reducer().matmul(m.pseudo_inverse());
        assert!(rr.max_abs_diff(&ComplexMatrix::identity(m.rank())) < 1e-12);
        let p = m.range_projector();
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-12);
        assert!(p.hermitian_deviation() < 1e-12);
    }

    #[test]
    fn inner_product_examples() {
        let one = AKernel::new(vec!["s".into()], 1, vec![scalar(1.0)]).unwrap();
        let m = ModuleSpace::build(&one, DEFAULT_TOL).unwrap();
        let ks = ModuleElement::section(1, 0, &scalar(1.0));
        assert_eq!(m.inner_product(&ks, &ks).unwrap(), scalar(1.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let vs: Vec<ComplexMatrix> = (0..3).map(|_| ComplexMatrix::random(4, 2, &mut rng)).collect();
        let k = AKernel::from_fn((0..3).map(|i| i.to_string()).collect(), 2, |s, t| {
            vs[s].adjoint_mul(&vs[t])
        })
        .unwrap();
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let a = ComplexMatrix::random(2, 2, &mut rng);
        let b = ComplexMatrix::random(2, 2, &mut rng);
        let lhs = m
            .inner_product(&ModuleElement::section(3, 0, &a), &ModuleElement::section(3, 2, &b))
            .unwrap();
        assert!(lhs.max_abs_diff(&a.adjoint_mul(&k.get(0, 2).matmul(&b))) < 1e-12);

        let k = z2_kernel(0.4);
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let c1 = ModuleElement::random(2, 1, &mut rng);
        let d1 = ModuleElement::random(2, 1, &mut rng);
        let ip = m.inner_product(&c1, &d1).unwrap();
        assert!(ip.max_abs_diff(&double_sum(&k, &c1, &d1)) < 1e-10);
        let reduced = m.reduce(&c1).unwrap().adjoint_mul(&m.reduce(&d1).unwrap());
        assert!(ip.max_abs_diff(&reduced) < 1e-10);

        let wrong = ModuleElement::zero(3, 1);
        assert!(matches!(m.inner_product(&wrong, &c1), Err(KernelError::BaseMismatch(_))));
    }

    #[test]
    fn evaluation_examples() {
        let k = z2_kernel(0.25);
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let delta = ModuleElement::section(2, 1, &scalar(1.0));
        for s in 0..2 {
            assert_eq!(m.evaluate(&delta, s).unwrap(), *k.get(1, s));
        }
        let zero = ModuleElement::zero(2, 1);
        assert_eq!(m.evaluate(&zero, 0).unwrap(), scalar(0.0));
        assert!(matches!(m.evaluate(&zero, 5), Err(KernelError::UnknownPoint(_))));
        assert!(matches!(m.evaluate_at(&zero, "h"), Err(KernelError::UnknownPoint(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cc = ModuleElement::random(2, 1, &mut rng);
        for s in 0..2 {
            let brute = (0..2).fold(Complex64::new(0.0, 0.0), |acc, t| {
                acc + cc.block(t)[(0, 0)].conj() * k.get(t, s)[(0, 0)]
            });
            assert!((m.evaluate(&cc, s).unwrap()[(0, 0)] - brute).norm() < 1e-12);
        }
    }

    #[test]
    fn section_evaluates_with_conjugate_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let vs: Vec<ComplexMatrix> = (0..3).map(|_| ComplexMatrix::random(3, 2, &mut rng)).collect();
        let k = AKernel::from_fn((0..3).map(|i| i.to_string()).collect(), 2, |s, t| {
            vs[s].adjoint_mul(&vs[t])
        })
        .unwrap();
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let b = ComplexMatrix::random(2, 2, &mut rng);
        let kt_b = ModuleElement::section(3, 1, &b);
        for s in 0..3 {
            let expected = b.adjoint_mul(k.get(1, s));
            assert!(m.evaluate(&kt_b, s).unwrap().max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn membership_examples() {
        let k = z2_kernel(0.5);
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        // F = K_t section
        let section = ModuleElement::section(2, 1, &scalar(1.0));
        let f = m.function_of(&section).unwrap();
        let mem = m.membership(&f, DEFAULT_TOL).unwrap();
        assert!(mem.in_module);
        let diff = mem.candidate.add(&section.right_mul(&scalar(-1.0)));
        assert!(m.norm(&diff).unwrap() < 1e-10);

        // F ≡ 1 on the identity Gram
        let m0 = ModuleSpace::build(&z2_kernel(0.0), DEFAULT_TOL).unwrap();
        let ones = AFunction::new(k.base().to_vec(), vec![scalar(1.0), scalar(1.0)]).unwrap();
        let mem = m0.membership(&ones, DEFAULT_TOL).unwrap();
        assert!(mem.in_module);
        assert!(mem.residual < 1e-14);
        assert!(mem.candidate.stacked().max_abs_diff(&ComplexMatrix::from_real(&[&[1.0], &[1.0]])) < 1e-14);

        // sections vanish at the second point: nothing nonzero can live there
        let base = vec!["s".to_string(), "t".to_string()];
        let k = AKernel::new(base.clone(), 1, vec![scalar(1.0), scalar(0.0), scalar(0.0), scalar(0.0)]).unwrap();
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let f = AFunction::new(base, vec![scalar(0.0), scalar(1.0)]).unwrap();
        let mem = m.membership(&f, DEFAULT_TOL).unwrap();
        assert!(!mem.in_module);
        assert!(mem.representative().is_none());
        assert_eq!(m.domination_test(&f, DEFAULT_TOL).unwrap(), Domination::Infinite { residual: 1.0 });
    }

    #[test]
    fn domination_examples() {
        let one = AKernel::new(vec!["s".into()], 1, vec![scalar(1.0)]).unwrap();
        let m = ModuleSpace::build(&one, DEFAULT_TOL).unwrap();
        let zero = AFunction::new(vec!["s".into()], vec![scalar(0.0)]).unwrap();
        assert_eq!(m.domination_test(&zero, DEFAULT_TOL).unwrap(), Domination::Finite(0.0));
        let kt = AFunction::new(vec!["s".into()], vec![scalar(1.0)]).unwrap();
        match m.domination_test(&kt, DEFAULT_TOL).unwrap() {
            Domination::Finite(l) => assert_abs_diff_eq!(l, 1.0, epsilon = 1e-8),
            other => panic!("{other:?}"),
        }

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let vs: Vec<ComplexMatrix> = (0..4).map(|_| ComplexMatrix::random(3, 2, &mut rng)).collect();
        let k = AKernel::from_fn((0..4).map(|i| i.to_string()).collect(), 2, |s, t| {
            vs[s].adjoint_mul(&vs[t])
        })
        .unwrap();
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let c = ModuleElement::random(4, 2, &mut rng);
        let f = m.function_of(&c).unwrap();
        let mem = m.membership(&f, DEFAULT_TOL).unwrap();
        assert!(mem.in_module);
        match m.domination_test(&f, DEFAULT_TOL).unwrap() {
            Domination::Finite(l) => assert!((l - mem.norm_sq).abs() <= 1e-6 * mem.norm_sq, "{l} vs {}", mem.norm_sq),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kolmogorov_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples: Vec<ComplexMatrix> = (0..3).map(|_| ComplexMatrix::random(1, 1, &mut rng)).collect();
        let m = ModuleSpace::build(&z2_kernel(0.5), DEFAULT_TOL).unwrap();
        assert!(m.kolmogorov_check(&[]) <= 1e-10);
        assert!(m.kolmogorov_check(&samples) <= 1e-10);
    }

    #[test]
    fn induced_kernel_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vs: Vec<ComplexMatrix> = (0..5).map(|_| ComplexMatrix::random(2, 2, &mut rng)).collect();
        let k = AKernel::from_fn((0..5).map(|i| i.to_string()).collect(), 2, |s, t| {
            vs[s].adjoint_mul(&vs[t])
        })
        .unwrap();
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let sections: Vec<ModuleElement> = (0..5)
            .map(|s| ModuleElement::section(5, s, &ComplexMatrix::identity(2)))
            .collect();
        let induced = m.induced_kernel(&sections).unwrap();
        assert!(check_positive_definite(&induced, DEFAULT_TOL).unwrap().psd);
        let m2 = ModuleSpace::build(&induced, DEFAULT_TOL).unwrap();
        assert_eq!(m2.rank(), m.rank());
    }

    #[test]
    fn quotient_is_well_defined() {
        // rank-deficient Gram: adding a null vector changes nothing
        let k = z2_kernel(1.0);
        let m = ModuleSpace::build(&k, DEFAULT_TOL).unwrap();
        let null = ModuleElement::from_stacked(ComplexMatrix::from_real(&[&[1.0], &[-1.0]])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c1 = ModuleElement::random(2, 1, &mut rng);
        let c2 = c1.add(&null.right_mul(&ComplexMatrix::random(1, 1, &mut rng)));
        assert!(m.reduce(&c1).unwrap().max_abs_diff(&m.reduce(&c2).unwrap()) < 1e-12);
        let d = ModuleElement::random(2, 1, &mut rng);
        assert!(m
            .inner_product(&c1, &d)
            .unwrap()
            .max_abs_diff(&m.inner_product(&c2, &d).unwrap())
            < 1e-12);
    }
}
