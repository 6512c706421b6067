//! Naimark dilation of a POVM over the intersection semigroup of subsets.

use serde::{Deserialize, Serialize};

use super::ApplicationError;
use crate::algebra::{hermitian_eig, is_psd, op_norm, psd_sqrt, ComplexMatrix};
use crate::dilation::{build_dilation, DilationOptions, DilationTriple};
use crate::kernel::AFunction;
use crate::semigroup::FiniteStarSemigroup;

/// Effects `F({x})` on the outcomes `x = 0..m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    /// Checks positivity of every effect and `Σ_x F({x}) = I`.
    pub fn new(effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self, ApplicationError> {
        let d = effects
            .first()
            .map(ComplexMatrix::rows)
            .ok_or_else(|| ApplicationError::NotPovm("no outcomes".into()))?;
        if effects.iter().any(|f| f.shape() != (d, d)) {
            return Err(ApplicationError::Shape("effects differ in shape".into()));
        }
        for (x, f) in effects.iter().enumerate() {
            let v = is_psd(f, tol)?;
            if !v.psd {
                return Err(ApplicationError::NotPovm(format!(
                    "effect {x} has eigenvalue {:e}",
                    v.min_eigenvalue
                )));
            }
        }
        let total = effects.iter().fold(ComplexMatrix::zeros(d, d), |acc, f| &acc + f);
        let defect = op_norm(&(&total - &ComplexMatrix::identity(d)));
        if defect > tol * effects.len().max(1) as f64 {
            return Err(ApplicationError::NotPovm(format!("‖Σ F − I‖ = {defect:e}")));
        }
        Ok(Self { effects })
    }

    /// `F_x = (2/3)|ψ_x⟩⟨ψ_x|` for three real states at 120°.
    pub fn trine() -> Self {
        let effects = (0..3)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let (c, s) = (a.cos(), a.sin());
                ComplexMatrix::from_real(&[&[c * c, c * s], &[c * s, s * s]]).scale(2.0 / 3.0)
            })
            .collect();
        Self { effects }
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// `F(Δ)` for the subset with bitmask `mask`.
    pub fn measure(&self, mask: usize) -> ComplexMatrix {
        let d = self.dim();
        self.effects
            .iter()
            .enumerate()
            .filter(|(x, _)| mask & (1 << x) != 0)
            .fold(ComplexMatrix::zeros(d, d), |acc, (_, f)| &acc + f)
    }
}

#[derive(Clone, Debug)]
pub struct NaimarkReport {
    pub triple: DilationTriple,
    /// `max_Δ max(‖Φ(Δ)² − Φ(Δ)‖, ‖Φ(Δ) − Φ(Δ)*‖)`
    pub projection_residual: f64,
    /// `max ‖Φ(Δ∩Δ′) − Φ(Δ)Φ(Δ′)‖`
    pub product_residual: f64,
    /// `max ‖Φ(Δ∪Δ′) − Φ(Δ) − Φ(Δ′)‖` over disjoint pairs.
    pub additivity_residual: f64,
    /// `‖V*V − I‖`
    pub isometry_error: f64,
    /// `max_Δ ‖F(Δ) − V*Φ(Δ)V‖`
    pub compression_error: f64,
    /// Same two checks for the block construction with rows `√F({x})`.
    pub oracle_isometry_error: f64,
    pub oracle_compression_error: f64,
    pub framework_dimension: usize,
    pub oracle_dimension: usize,
}

pub fn naimark(povm: &Povm, opts: &DilationOptions) -> Result<NaimarkReport, ApplicationError> {
    let m = povm.outcomes();
    let d = povm.dim();
    let s = FiniteStarSemigroup::intersection_semigroup(m).map_err(|e| ApplicationError::Shape(e.to_string()))?;
    let omega = AFunction::on_semigroup(&s, (0..s.len()).map(|mask| povm.measure(mask)).collect())?;
    let triple = build_dilation(&s, &omega, opts)?;
    let phi: Vec<&ComplexMatrix> = triple.phi.iter().map(|p| &p.matrix).collect();

    let mut projection_residual = 0.0f64;
    let mut product_residual = 0.0f64;
    let mut additivity_residual = 0.0f64;
    let mut compression_error = 0.0f64;
    for a in 0..s.len() {
        projection_residual = projection_residual
            .max(op_norm(&(&phi[a].matmul(phi[a]) - phi[a])))
            .max(op_norm(&(phi[a] - &phi[a].adjoint())));
        compression_error = compression_error.max(op_norm(&(&povm.measure(a) - &triple.compress(a))));
        for b in 0..s.len() {
            product_residual = product_residual.max(op_norm(&(phi[a & b] - &phi[a].matmul(phi[b]))));
            if a & b == 0 {
                additivity_residual = additivity_residual.max(op_norm(&(&(phi[a | b] - phi[a]) - phi[b])));
            }
        }
    }
    let isometry_error = op_norm(&(&triple.v_adjoint.matmul(&triple.v) - &ComplexMatrix::identity(d)));

    let roots = povm
        .effects()
        .iter()
        .map(|f| psd_sqrt(f, opts.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let v_oracle = ComplexMatrix::vstack(&roots);
    let oracle_isometry_error = op_norm(&(&v_oracle.adjoint_mul(&v_oracle) - &ComplexMatrix::identity(d)));
    let mut oracle_compression_error = 0.0f64;
    for mask in 0..s.len() {
        let mut projected = ComplexMatrix::zeros(m * d, d);
        for x in 0..m {
            if mask & (1 << x) != 0 {
                projected.set_submatrix(x * d, 0, &roots[x]);
            }
        }
        let value = v_oracle.adjoint_mul(&projected);
        oracle_compression_error = oracle_compression_error.max(op_norm(&(&value - &povm.measure(mask))));
    }
    let oracle_dimension = povm
        .effects()
        .iter()
        .map(|f| hermitian_eig(f).map(|e| e.rank(opts.tol)))
        .sum::<Result<usize, _>>()?;
    Ok(NaimarkReport {
        framework_dimension: triple.dimension(),
        triple,
        projection_residual,
        product_residual,
        additivity_residual,
        isometry_error,
        compression_error,
        oracle_isometry_error,
        oracle_compression_error,
        oracle_dimension,
    })
}
