//! Completely positive maps `M_m → M_n` through the matrix-unit semigroup.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ApplicationError;
use crate::algebra::{block_assemble, hermitian_eig, is_psd, op_norm, ComplexMatrix};
use crate::dilation::{
    build_dilation, extension_property, omega_module, unitization_lift, DilationOptions, DilationTriple,
    ExtensionReport, LiftReport,
};
use crate::kernel::{check_positive_definite, kernel_from_omega, AFunction};
use crate::semigroup::FiniteStarSemigroup;

/// Linear map given on matrix units, `action[i·m + j] = ω(e_ij)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpMap {
    m: usize,
    n: usize,
    action: Vec<ComplexMatrix>,
}

impl CpMap {
    pub fn new(m: usize, n: usize, action: Vec<ComplexMatrix>) -> Result<Self, ApplicationError> {
        if action.len() != m * m {
            return Err(ApplicationError::Shape(format!(
                "{} matrix-unit images for m = {m}",
                action.len()
            )));
        }
        if let Some(k) = action.iter().position(|a| a.shape() != (n, n)) {
            return Err(ApplicationError::Shape(format!(
                "image of e{}{} is {:?}, expected {n}x{n}",
                k / m + 1,
                k % m + 1,
                action[k].shape()
            )));
        }
        Ok(Self { m, n, action })
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(usize, usize) -> ComplexMatrix) -> Result<Self, ApplicationError> {
        Self::new(m, n, (0..m * m).map(|k| f(k / m, k % m)).collect())
    }

    /// `x ↦ Σ_k A_k* x A_k` with `A_k` of shape `m × n`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self, ApplicationError> {
        let (m, n) = ops
            .first()
            .map(ComplexMatrix::shape)
            .ok_or_else(|| ApplicationError::Shape("no Kraus operators".into()))?;
        if ops.iter().any(|a| a.shape() != (m, n)) {
            return Err(ApplicationError::Shape("Kraus operators differ in shape".into()));
        }
        Self::from_fn(m, n, |i, j| {
            let mut acc = ComplexMatrix::zeros(n, n);
            for a in ops {
                let ri = a.submatrix(i, 0, 1, n);
                let rj = a.submatrix(j, 0, 1, n);
                acc = &acc + &ri.adjoint_mul(&rj);
            }
            acc
        })
    }

    /// Random CP map with `kraus` random Kraus operators.
    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, kraus: usize, rng: &mut R) -> Self {
        let ops: Vec<ComplexMatrix> = (0..kraus.max(1)).map(|_| ComplexMatrix::random(m, n, rng)).collect();
        Self::from_kraus(&ops).expect("shapes agree by construction")
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, m, |i, j| unit(m, i, j)).expect("square")
    }

    pub fn transpose(m: usize) -> Self {
        Self::from_fn(m, m, |i, j| unit(m, j, i)).expect("square")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn action(&self) -> &[ComplexMatrix] {
        &self.action
    }

    pub fn image(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.action[i * self.m + j]
    }

    /// Block `(i, j)` equal to `ω(e_ij)`.
    pub fn choi(&self) -> ComplexMatrix {
        let grid: Vec<Vec<ComplexMatrix>> = (0..self.m)
            .map(|i| (0..self.m).map(|j| self.image(i, j).clone()).collect())
            .collect();
        block_assemble(&grid).expect("uniform blocks")
    }

    /// `ω(x) = Σ_ij x_ij ω(e_ij)`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.m {
            for j in 0..self.m {
                acc = &acc + &self.image(i, j).scale_complex(x[(i, j)]);
            }
        }
        acc
    }

    /// `ω` on `matrix_unit_semigroup(m)`, with `ω(0) = 0`.
    pub fn semigroup_function(&self) -> Result<(FiniteStarSemigroup, AFunction), ApplicationError> {
        let s = FiniteStarSemigroup::matrix_unit_semigroup(self.m)
            .map_err(|e| ApplicationError::Shape(e.to_string()))?;
        let mut values = vec![ComplexMatrix::zeros(self.n, self.n)];
        values.extend(self.action.iter().cloned());
        let omega = AFunction::on_semigroup(&s, values)?;
        Ok((s, omega))
    }
}

fn unit(m: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(m, m);
    e[(i, j)] = Complex64::new(1.0, 0.0);
    e
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CpVerdict {
    pub completely_positive: bool,
    pub choi_min_eigenvalue: f64,
    pub witness: Vec<Complex64>,
    pub choi_rank: usize,
    /// Positive definiteness of `(u, v) ↦ ω(u* v)` on the matrix-unit semigroup.
    pub kernel_positive_definite: bool,
    pub agree: bool,
}

/// Complete positivity via the Choi matrix, cross-checked against the
/// semigroup kernel.
pub fn cp_check(map: &CpMap, tol: f64) -> Result<CpVerdict, ApplicationError> {
    let choi = map.choi();
    let verdict = is_psd(&choi, tol)?;
    let choi_rank = hermitian_eig(&choi)?.rank(tol);
    let (s, omega) = map.semigroup_function()?;
    let kernel = kernel_from_omega(&s, &omega)?;
    let kernel_pd = check_positive_definite(&kernel, tol)?.psd;
    Ok(CpVerdict {
        completely_positive: verdict.psd,
        choi_min_eigenvalue: verdict.min_eigenvalue,
        witness: verdict.witness,
        choi_rank,
        kernel_positive_definite: kernel_pd,
        agree: kernel_pd == verdict.psd,
    })
}

/// Kraus operators `A_k` (`m × n`) from the Choi eigendecomposition.
pub fn kraus_from_choi(map: &CpMap, tol: f64) -> Result<Vec<ComplexMatrix>, ApplicationError> {
    let eig = hermitian_eig(&map.choi())?;
    let (m, n) = (map.m(), map.n());
    Ok(eig
        .kept_indices(tol)
        .into_iter()
        .map(|k| {
            let root = eig.values[k].sqrt();
            let mut a = ComplexMatrix::zeros(m, n);
            for i in 0..m {
                for b in 0..n {
                    a[(i, b)] = eig.vectors[(i * n + b, k)].conj() * root;
                }
            }
            a
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct StinespringReport {
    pub verdict: CpVerdict,
    pub triple: DilationTriple,
    pub kraus: Vec<ComplexMatrix>,
    /// `max ‖V* Φ(x) V − Σ A_k* x A_k‖` over random inputs.
    pub route_disagreement: f64,
    /// `max ‖V* Φ(x) V − ω(x)‖`
    pub framework_error: f64,
    /// `max ‖Σ A_k* x A_k − ω(x)‖`
    pub kraus_error: f64,
    /// Rank of the full module over the matrix-unit semigroup.
    pub module_rank: usize,
    /// Rank of the sections `K_{e_1j}`, whose Gram matrix is the Choi matrix.
    pub row_block_rank: usize,
    pub extension: Option<ExtensionReport>,
    pub lift: Option<LiftReport>,
}

fn kraus_apply(kraus: &[ComplexMatrix], x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    kraus
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, a| &acc + &a.adjoint_mul(&x.matmul(a)))
}

/// Dilation of a CP map, framework route against the Kraus oracle.
pub fn stinespring(map: &CpMap, opts: &DilationOptions) -> Result<StinespringReport, ApplicationError> {
    let tol = opts.tol;
    let verdict = cp_check(map, tol)?;
    if !verdict.completely_positive {
        return Err(ApplicationError::NotCp {
            min_eigenvalue: verdict.choi_min_eigenvalue,
            witness: verdict.witness,
        });
    }
    let (s, omega) = map.semigroup_function()?;
    let triple = build_dilation(&s, &omega, opts)?;
    let kraus = kraus_from_choi(map, tol)?;
    let (m, n) = (map.m(), map.n());

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut route_disagreement = 0.0f64;
    let mut framework_error = 0.0f64;
    let mut kraus_error = 0.0f64;
    for _ in 0..8 {
        let x = ComplexMatrix::random(m, m, &mut rng);
        let mut phi_x = ComplexMatrix::zeros(triple.dimension(), triple.dimension());
        for i in 0..m {
            for j in 0..m {
                let e = 1 + i * m + j;
                phi_x = &phi_x + &triple.phi[e].matrix.scale_complex(x[(i, j)]);
            }
        }
        let framework = triple.v_adjoint.matmul(&phi_x.matmul(&triple.v));
        let oracle = kraus_apply(&kraus, &x, n);
        let direct = map.apply(&x);
        route_disagreement = route_disagreement.max(op_norm(&(&framework - &oracle)));
        framework_error = framework_error.max(op_norm(&(&framework - &direct)));
        kraus_error = kraus_error.max(op_norm(&(&oracle - &direct)));
    }

    let space = &triple.module;
    let row: Vec<ComplexMatrix> = (0..m).map(|j| space.section_coordinates(1 + j)).collect();
    let row_block_rank = crate::algebra::numerical_rank(&ComplexMatrix::hstack(&row), tol);

    let (extension, lift) = if s.is_unital() {
        (None, None)
    } else {
        match extension_property(&s, &omega, tol) {
            Ok(ext) => {
                let c = if ext.c_max.is_finite() { 0.5 * ext.c_max } else { 1.0 };
                let lift = unitization_lift(&s, &omega, c, tol)?;
                (Some(ext), Some(lift))
            }
            Err(_) => (None, None),
        }
    };
    let module_rank = omega_module(&s, &omega, tol)?.rank();
    Ok(StinespringReport {
        verdict,
        triple,
        kraus,
        route_disagreement,
        framework_error,
        kraus_error,
        module_rank,
        row_block_rank,
        extension,
        lift,
    })
}
