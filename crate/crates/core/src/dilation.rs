//! Translation `*`-representations of invariant kernels, boundedness
//! conditions, the extension property and assembly of dilation triples
//! `ω(s) = V* Φ(s) V`.
//!
//! Everything operates on the reduced model of [`ModuleSpace`]: an operator
//! `X` on `D_ω` acting on coefficient columns becomes the `r × r` matrix
//! `R X R⁺`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    jacobi, numerical_rank, op_norm, verdict_from_eig, AlgebraError, ComplexMatrix, DEFAULT_TOL,
};
use crate::kernel::{kernel_from_omega, AFunction, KernelError, ModuleElement, ModuleSpace};
use crate::par::{map_range, Execution};
use crate::semigroup::FiniteStarSemigroup;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DilationError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("NotHermitianOmega: max ‖ω(s*) − ω(s)*‖ = {deviation:e}")]
    NotHermitianOmega { deviation: f64 },
    #[error("IllDefinedTranslation: Φ({element}) has null-space residual {residual:e}")]
    IllDefinedTranslation {
        element: String,
        residual: f64,
        witness: Vec<Complex64>,
    },
    #[error("Unbounded: Φ({element}) is not a bounded operator on the quotient (residual {residual:e})")]
    Unbounded { element: String, residual: f64 },
    #[error("BadConstant: extension with c = {c} fails positivity, minimal eigenvalue {min_eigenvalue:e}")]
    BadConstant {
        c: f64,
        min_eigenvalue: f64,
        witness: Vec<Complex64>,
    },
    #[error("NoExtension: {0}")]
    NoExtension(String),
    #[error("NoStarCondition: {0}")]
    NoStarCondition(String),
}

/// Knobs shared by the dilation operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationOptions {
    pub tol: f64,
    /// Highest exponent `n` in the `(s*s)^{2^n}` sequence.
    pub n_max: usize,
    /// Random coefficient matrices on top of the matrix units.
    pub sample_budget: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for DilationOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            n_max: 6,
            sample_budget: 4,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// How the dilation space was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `ω ∈ E_ω`: dilate on `E_ω` with `V a = ω a`.
    Star,
    /// Adjoin a unit, dilate on `E_{ω⁺}` with `V⁺ a = ω⁺_𝟏 a`.
    Extension,
}

/// `Φ(s)` on the reduced model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationOperator {
    pub s: usize,
    pub label: String,
    pub matrix: ComplexMatrix,
    pub adjoint_matrix: ComplexMatrix,
    pub well_defined: bool,
    /// `‖R P_s (I − R⁺R)‖`
    pub residual: f64,
    pub norm: f64,
    /// Null coefficient column `c` with `G P_s c ≠ 0`, when ill defined.
    pub witness: Option<Vec<Complex64>>,
}

fn check_omega(s: &FiniteStarSemigroup, omega: &AFunction) -> Result<(), DilationError> {
    if omega.len() != s.len() {
        return Err(KernelError::BaseMismatch(format!(
            "omega has {} values, semigroup has {} elements",
            omega.len(),
            s.len()
        ))
        .into());
    }
    Ok(())
}

/// `max_s ‖ω(s*) − ω(s)*‖`.
pub fn omega_symmetry_defect(s: &FiniteStarSemigroup, omega: &AFunction) -> f64 {
    (0..s.len())
        .map(|a| op_norm(&(omega.value(s.star(a)) - &omega.value(a).adjoint())))
        .fold(0.0, f64::max)
}

fn omega_scale(omega: &AFunction) -> f64 {
    omega.values().iter().map(op_norm).fold(1.0, f64::max)
}

/// Module `E_ω` of the invariant kernel `ω(s* t)`.
pub fn omega_module(s: &FiniteStarSemigroup, omega: &AFunction, tol: f64) -> Result<ModuleSpace, DilationError> {
    check_omega(s, omega)?;
    Ok(ModuleSpace::build(&kernel_from_omega(s, omega)?, tol)?)
}

/// `Φ(s) Σ_t K_t a_t = Σ_t K_{st} a_t`, as `R P_s R⁺`.
pub fn translation_operator(
    sg: &FiniteStarSemigroup,
    space: &ModuleSpace,
    s: usize,
    tol: f64,
) -> TranslationOperator {
    let n = space.n();
    let r = space.rank();
    let reducer = space.reducer();
    // block column t of R P_s is block column s·t of R
    let mut shifted = ComplexMatrix::zeros(r, reducer.cols());
    for t in 0..sg.len() {
        let block = reducer.submatrix(0, sg.mul(s, t) * n, r, n);
        shifted.set_submatrix(0, t * n, &block);
    }
    let matrix = shifted.matmul(space.pseudo_inverse());
    let leak = &shifted - &matrix.matmul(reducer);
    let residual = op_norm(&leak);
    let well_defined = residual <= tol * op_norm(&shifted).max(f64::MIN_POSITIVE);
    let witness = (!well_defined).then(|| {
        let eig = space.eigen();
        let kept = eig.kept_indices(space.tol());
        (0..eig.dim())
            .filter(|k| !kept.contains(k))
            .map(|k| {
                let v = eig.eigenvector(k);
                let hit = shifted.matmul(&ComplexMatrix::column(&v)).frobenius_norm();
                (hit, v)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, v)| v)
            .unwrap_or_default()
    });
    TranslationOperator {
        s,
        label: sg.label(s).to_string(),
        adjoint_matrix: matrix.adjoint(),
        norm: op_norm(&matrix),
        matrix,
        well_defined,
        residual,
        witness,
    }
}

/// `Φ(s)` for every element, in index order.
pub fn translation_table(
    sg: &FiniteStarSemigroup,
    space: &ModuleSpace,
    tol: f64,
    exec: Execution,
) -> Vec<TranslationOperator> {
    map_range(exec, sg.len(), |s| translation_operator(sg, space, s, tol))
}

fn first_ill_defined(phi: &[TranslationOperator]) -> Option<&TranslationOperator> {
    phi.iter().find(|p| !p.well_defined)
}

/// Coefficient samples: all matrix units of `M_n`, then `budget` seeded random
/// matrices of operator norm 1.
pub fn sample_matrices(n: usize, budget: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n + budget);
    for i in 0..n {
        for j in 0..n {
            let mut e = ComplexMatrix::zeros(n, n);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            out.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n * n + budget {
        let a = ComplexMatrix::random(n, n, &mut rng);
        let norm = op_norm(&a);
        if norm > 0.0 {
            out.push(a.scale(1.0 / norm));
        }
    }
    out
}

/// The `(s*s)^{2^k}` sequence of the fourth boundedness condition for one `s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerSequence {
    pub s: usize,
    /// Element index of `(s*s)^{2^k}`, `k = 0..=n_max`.
    pub powers: Vec<usize>,
    /// `x_k = ‖⟨ξ, Φ((s*s)^{2^k}) ξ⟩‖` for the fixed probe `ξ` with `‖⟨ξ,ξ⟩‖ = 1`.
    pub values: Vec<f64>,
    /// `x_k^{2^{-k}}`
    pub roots: Vec<f64>,
    /// `(x_k / x_{k-1})^{2^{-(k-1)}}` for `k ≥ 1`; exact for eventually periodic powers.
    pub ratio_estimates: Vec<f64>,
    pub limit_estimate: f64,
    /// `c_a(s)`, the spectral radius of `Φ(s*s)`.
    pub prediction: f64,
    pub stabilized: bool,
}

/// One entry `d(t, a) = ‖a* ω(t*t) a‖`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DBound {
    pub t: usize,
    pub sample: usize,
    pub value: f64,
}

/// Constants of the four equivalent boundedness conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub labels: Vec<String>,
    /// `‖Φ(s)‖²`, the optimal constant of the quadratic-form condition.
    pub c_a: Vec<f64>,
    /// Sampled lower estimate of the diagonal condition's optimal constant.
    pub c_b: Vec<f64>,
    /// Pairs `(s, t)` with `c_b(st) > c_b(s) c_b(t)`.
    pub c_b_violations: Vec<(usize, usize)>,
    pub c_a_violations: Vec<(usize, usize)>,
    pub sequences: Vec<PowerSequence>,
    pub d_bounds: Vec<DBound>,
    pub sample_count: usize,
}

impl BoundednessReport {
    pub fn finite(&self) -> bool {
        self.c_a.iter().all(|c| c.is_finite())
    }
}

const SUBMULT_REL: f64 = 1e-6;

fn submultiplicative_violations(sg: &FiniteStarSemigroup, c: &[f64], abs: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..sg.len() {
        for t in 0..sg.len() {
            let bound = c[s] * c[t];
            if c[sg.mul(s, t)] > bound * (1.0 + SUBMULT_REL) + abs {
                out.push((s, t));
            }
        }
    }
    out
}

/// Boundedness constants for the invariant kernel of `ω`.
pub fn boundedness_report(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    space: &ModuleSpace,
    opts: &DilationOptions,
) -> Result<BoundednessReport, DilationError> {
    check_omega(sg, omega)?;
    let tol = opts.tol;
    let phi = translation_table(sg, space, tol, opts.exec);
    if let Some(bad) = first_ill_defined(&phi) {
        return Err(DilationError::IllDefinedTranslation {
            element: bad.label.clone(),
            residual: bad.residual,
            witness: bad.witness.clone().unwrap_or_default(),
        });
    }
    let c_a: Vec<f64> = phi.iter().map(|p| p.norm * p.norm).collect();

    let n = omega.n();
    let samples = sample_matrices(n, opts.sample_budget, opts.seed);
    let len = sg.len();
    // q[u][k] = ‖a_k* ω(u*u) a_k‖
    let q: Vec<Vec<f64>> = map_range(opts.exec, len, |u| {
        let w = omega.value(sg.mul(sg.star(u), u));
        samples.iter().map(|a| op_norm(&a.adjoint_mul(&w.matmul(a)))).collect()
    });
    let q_scale = q.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
    let floor = tol.sqrt() * q_scale;
    let c_b: Vec<f64> = map_range(opts.exec, len, |s| {
        let mut best = 0.0f64;
        for t in 0..len {
            let st = sg.mul(s, t);
            for k in 0..samples.len() {
                if q[t][k] > floor {
                    best = best.max(q[st][k] / q[t][k]);
                }
            }
        }
        best
    });
    let d_bounds = (0..len)
        .flat_map(|t| {
            q[t].iter()
                .enumerate()
                .map(move |(k, &value)| DBound { t, sample: k, value })
        })
        .collect();

    let sequences = power_sequences(sg, omega, &c_a, opts);
    let abs = 1e-8;
    Ok(BoundednessReport {
        labels: sg.labels().to_vec(),
        c_b_violations: submultiplicative_violations(sg, &c_b, abs),
        c_a_violations: submultiplicative_violations(sg, &c_a, abs),
        c_a,
        c_b,
        sequences,
        d_bounds,
        sample_count: samples.len(),
    })
}

fn power_sequences(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    c_a: &[f64],
    opts: &DilationOptions,
) -> Vec<PowerSequence> {
    let len = sg.len();
    let n = omega.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut probe: Vec<ComplexMatrix> = (0..len).map(|_| ComplexMatrix::random(n, n, &mut rng)).collect();
    let form = |u: Option<usize>, probe: &[ComplexMatrix]| -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(n, n);
        for i in 0..len {
            for j in 0..len {
                let mid = match u {
                    Some(u) => sg.mul(sg.mul(sg.star(i), u), j),
                    None => sg.mul(sg.star(i), j),
                };
                acc = &acc + &probe[i].adjoint_mul(&omega.value(mid).matmul(&probe[j]));
            }
        }
        acc
    };
    let norm0 = op_norm(&form(None, &probe));
    if norm0 > 0.0 {
        let scale = 1.0 / norm0.sqrt();
        probe = probe.iter().map(|a| a.scale(scale)).collect();
    }
    let floor = 1e3 * opts.tol;
    map_range(opts.exec, len, |s| {
        let ss = sg.mul(sg.star(s), s);
        let mut powers = Vec::with_capacity(opts.n_max + 1);
        let mut p = ss;
        for k in 0..=opts.n_max {
            if k > 0 {
                p = sg.mul(p, p);
            }
            powers.push(p);
        }
        let values: Vec<f64> = powers.iter().map(|&u| op_norm(&form(Some(u), &probe))).collect();
        let roots: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(k, &x)| x.powf(0.5f64.powi(k as i32)))
            .collect();
        let ratio_estimates: Vec<f64> = (1..values.len())
            .map(|k| {
                if values[k - 1] <= floor {
                    0.0
                } else {
                    (values[k] / values[k - 1]).powf(0.5f64.powi(k as i32 - 1))
                }
            })
            .collect();
        let limit_estimate = ratio_estimates.last().copied().unwrap_or(roots[0]);
        let stabilized = match ratio_estimates.len() {
            0 | 1 => true,
            m => (ratio_estimates[m - 1] - ratio_estimates[m - 2]).abs() <= 1e-6 * limit_estimate.max(1.0),
        };
        PowerSequence {
            s,
            powers,
            values,
            roots,
            ratio_estimates,
            limit_estimate,
            prediction: c_a[s],
            stabilized,
        }
    })
}

/// Residuals of the `*`-representation identities.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RepresentationReport {
    /// `max ‖Φ(st) − Φ(s)Φ(t)‖`
    pub multiplicativity: f64,
    /// `max ‖Φ(s*) − Φ(s)*‖`
    pub star: f64,
    /// `‖Φ(𝟏) − I‖` when the semigroup is unital.
    pub unit: Option<f64>,
    /// `max |⟨Φ(s)K_{s'}a, Φ(t)K_{t'}b⟩ − a* K(ss', tt') b|` over samples.
    pub covariance: f64,
    /// `max ‖Φ(s)ω − ω_s‖` when `ω ∈ E_ω`.
    pub omega_translation: Option<f64>,
}

/// Checks that `s ↦ Φ(s)` is a multiplicative `*`-map.
pub fn representation_checks(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    space: &ModuleSpace,
    phi: &[TranslationOperator],
    samples: &[ComplexMatrix],
    exec: Execution,
) -> RepresentationReport {
    let len = sg.len();
    let r = space.rank();
    let per_s: Vec<(f64, f64, f64)> = map_range(exec, len, |s| {
        let mut mult = 0.0f64;
        for t in 0..len {
            let prod = phi[s].matrix.matmul(&phi[t].matrix);
            mult = mult.max(op_norm(&(&phi[sg.mul(s, t)].matrix - &prod)));
        }
        let star = op_norm(&(&phi[sg.star(s)].matrix - &phi[s].adjoint_matrix));
        let mut cov = 0.0f64;
        let n = space.n();
        let mut coeffs = vec![ComplexMatrix::identity(n)];
        coeffs.extend(samples.iter().take(2).cloned());
        for s1 in 0..len {
            let left = phi[s].matrix.matmul(&space.section_coordinates(s1));
            for t in 0..len {
                for t1 in 0..len {
                    let right = phi[t].matrix.matmul(&space.section_coordinates(t1));
                    let k = omega.value(sg.mul(sg.star(sg.mul(s, s1)), sg.mul(t, t1)));
                    for a in &coeffs {
                        let la = left.matmul(a);
                        for b in &coeffs {
                            let lhs = la.adjoint_mul(&right.matmul(b));
                            let rhs = a.adjoint_mul(&k.matmul(b));
                            cov = cov.max(op_norm(&(&lhs - &rhs)));
                        }
                    }
                }
            }
        }
        (mult, star, cov)
    });
    let unit = sg
        .unit()
        .map(|u| op_norm(&(&phi[u].matrix - &ComplexMatrix::identity(r))));
    let omega_translation = star_condition(sg, omega, space, space.tol())
        .ok()
        .and_then(|sc| sc.representative)
        .and_then(|c| space.reduce(&c).ok())
        .map(|x| {
            (0..len)
                .map(|s| op_norm(&(&phi[s].matrix.matmul(&x) - &space.section_coordinates(s))))
                .fold(0.0, f64::max)
        });
    RepresentationReport {
        multiplicativity: per_s.iter().map(|p| p.0).fold(0.0, f64::max),
        star: per_s.iter().map(|p| p.1).fold(0.0, f64::max),
        unit,
        covariance: per_s.iter().map(|p| p.2).fold(0.0, f64::max),
        omega_translation,
    }
}

/// Largest admissible constant in `c [ω(s_i)* ω(s_j)] ≤ [ω(s_i* s_j)]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionReport {
    /// Bisection result (feasible end); `+∞` when `ω ≡ 0`.
    pub c_max: f64,
    /// `1 / λ_max(W G⁺ W*)`, which equals `1/‖ω‖_ω²` under condition (∗).
    pub closed_form: f64,
    pub iterations: usize,
    pub symmetry_defect: f64,
    /// Part of `W*` outside `range G`.
    pub range_residual: f64,
}

fn psd_with_tol(m: &ComplexMatrix, tol: f64) -> Result<crate::algebra::PsdVerdict, DilationError> {
    let eig = jacobi(&m.hermitian_part())?;
    Ok(verdict_from_eig(&eig, tol))
}

/// Extension property: bisection on `c ↦ G − c W*W ⪰ 0`.
pub fn extension_property(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    tol: f64,
) -> Result<ExtensionReport, DilationError> {
    check_omega(sg, omega)?;
    let symmetry_defect = omega_symmetry_defect(sg, omega);
    if symmetry_defect > tol * omega_scale(omega) {
        return Err(DilationError::NotHermitianOmega {
            deviation: symmetry_defect,
        });
    }
    let space = omega_module(sg, omega, tol)?;
    let w = omega.row_block();
    let wstar = w.adjoint();
    let w_scale = w.frobenius_norm();
    if w_scale == 0.0 {
        return Ok(ExtensionReport {
            c_max: f64::INFINITY,
            closed_form: f64::INFINITY,
            iterations: 0,
            symmetry_defect,
            range_residual: 0.0,
        });
    }
    let range_residual = (&wstar - &space.range_projector().matmul(&wstar)).frobenius_norm();
    if range_residual > tol * (1.0 + w_scale) {
        return Err(DilationError::NoExtension(format!(
            "ω(s) has a component of size {range_residual:e} outside the range of the Gram matrix; no c > 0 is admissible"
        )));
    }
    let wr = w.matmul(space.pseudo_inverse());
    let lambda = op_norm(&wr).powi(2);
    let closed_form = if lambda > 0.0 { 1.0 / lambda } else { f64::INFINITY };

    let gram = space.gram();
    let wtw = w.adjoint_mul(&w);
    let ww = jacobi(&w.matmul(&wstar).hermitian_part())?;
    let sigma_min = ww
        .kept_indices(tol)
        .first()
        .map_or(1.0, |&k| ww.values[k]);
    let mut lo = 0.0f64;
    let mut hi = space.eigen().max_value() / sigma_min + 1.0;
    let mut iterations = 0;
    while iterations < 60 && hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if psd_with_tol(&(gram - &wtw.scale(mid)), tol)?.psd {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    if lo <= 0.0 {
        return Err(DilationError::NoExtension("no positive constant is admissible".into()));
    }
    Ok(ExtensionReport {
        c_max: lo,
        closed_form,
        iterations,
        symmetry_defect,
        range_residual,
    })
}

/// `ω⁺ = ω` on `S`, `ω⁺(𝟏) = c⁻¹ I` on the adjoined unit.
///
/// A unital semigroup is returned unchanged.
pub fn extend_omega(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    c: f64,
    tol: f64,
) -> Result<(FiniteStarSemigroup, AFunction), DilationError> {
    check_omega(sg, omega)?;
    if sg.is_unital() {
        return Ok((sg.clone(), omega.clone()));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(DilationError::BadConstant {
            c,
            min_eigenvalue: f64::NAN,
            witness: Vec::new(),
        });
    }
    let plus = sg.unitize();
    let mut values = omega.values().to_vec();
    values.push(ComplexMatrix::identity(omega.n()).scale(if c.is_finite() { 1.0 / c } else { 0.0 }));
    let omega_plus = AFunction::on_semigroup(&plus, values)?;
    let kernel = kernel_from_omega(&plus, &omega_plus)?;
    let verdict = psd_with_tol(&kernel.gram(), tol)?;
    if !verdict.psd {
        return Err(DilationError::BadConstant {
            c,
            min_eigenvalue: verdict.min_eigenvalue,
            witness: verdict.witness,
        });
    }
    Ok((plus, omega_plus))
}

/// Condition (∗): `ω ∈ E_ω` and `ω(s*) = ω(s)*`.
#[derive(Clone, Debug)]
pub struct StarCondition {
    pub holds: bool,
    pub symmetry_defect: f64,
    pub membership_residual: f64,
    /// Coefficient column of `ω` in `E_ω`.
    pub representative: Option<ModuleElement>,
    /// `‖ω‖_ω²`
    pub norm_sq: Option<f64>,
}

pub fn star_condition(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    space: &ModuleSpace,
    tol: f64,
) -> Result<StarCondition, DilationError> {
    check_omega(sg, omega)?;
    let symmetry_defect = omega_symmetry_defect(sg, omega);
    let symmetric = symmetry_defect <= tol * omega_scale(omega);
    let (candidate, residual) = match sg.unit() {
        // ω = K_𝟏
        Some(u) => {
            let c = ModuleElement::section(sg.len(), u, &ComplexMatrix::identity(omega.n()));
            let target = omega.stacked_adjoint();
            let residual = (&space.gram().matmul(c.stacked()) - &target).frobenius_norm();
            (c, residual)
        }
        None => {
            let m = space.membership(omega, tol)?;
            (m.candidate, m.residual)
        }
    };
    let in_module = residual <= tol * (1.0 + omega.stacked_adjoint().frobenius_norm());
    let holds = symmetric && in_module;
    let norm_sq = if in_module {
        Some(op_norm(&space.inner_product(&candidate, &candidate)?))
    } else {
        None
    };
    Ok(StarCondition {
        holds,
        symmetry_defect,
        membership_residual: residual,
        representative: in_module.then_some(candidate),
        norm_sq,
    })
}

/// Dilation `(E, Φ, V)` of `ω` with its diagnostics.
#[derive(Clone, Debug)]
pub struct DilationTriple {
    pub route: Route,
    /// Semigroup the module is built over: `S`, or `S⁺` for [`Route::Extension`].
    pub semigroup: FiniteStarSemigroup,
    /// `ω`, or `ω⁺` for [`Route::Extension`].
    pub omega: AFunction,
    pub module: ModuleSpace,
    /// `Φ(s)` for the elements of the original `S`.
    pub phi: Vec<TranslationOperator>,
    /// `r × n`
    pub v: ComplexMatrix,
    pub v_adjoint: ComplexMatrix,
    pub minimal: bool,
    /// `max_s ‖ω(s) − V* Φ(s) V‖`
    pub reconstruction_error: f64,
    /// `max |a* ω(s) b − ⟨Va, Φ(s)Vb⟩|` over sampled `a, b`.
    pub sampled_error: f64,
    /// Constant used to adjoin the unit.
    pub extension_constant: Option<f64>,
}

impl DilationTriple {
    pub fn dimension(&self) -> usize {
        self.module.rank()
    }

    /// `V* Φ(s) V`
    pub fn compress(&self, s: usize) -> ComplexMatrix {
        self.v_adjoint.matmul(&self.phi[s].matrix.matmul(&self.v))
    }
}

/// Dilation through condition (∗) when it holds, otherwise through the
/// extension property.
pub fn build_dilation(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    opts: &DilationOptions,
) -> Result<DilationTriple, DilationError> {
    let space = omega_module(sg, omega, opts.tol)?;
    let star = star_condition(sg, omega, &space, opts.tol)?;
    if star.holds {
        return assemble_star(sg, omega, space, star, opts);
    }
    match extension_property(sg, omega, opts.tol) {
        Ok(ext) => assemble_extension(sg, omega, ext.c_max, opts),
        Err(DilationError::NoExtension(why)) => Err(DilationError::NoStarCondition(format!(
            "ω is not in its own module (residual {:e}) and has no extension: {why}",
            star.membership_residual
        ))),
        Err(e) => Err(e),
    }
}

/// Dilation along a fixed route.
pub fn build_dilation_with(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    route: Route,
    opts: &DilationOptions,
) -> Result<DilationTriple, DilationError> {
    match route {
        Route::Star => {
            let space = omega_module(sg, omega, opts.tol)?;
            let star = star_condition(sg, omega, &space, opts.tol)?;
            if !star.holds {
                return Err(DilationError::NoStarCondition(format!(
                    "membership residual {:e}, symmetry defect {:e}",
                    star.membership_residual, star.symmetry_defect
                )));
            }
            assemble_star(sg, omega, space, star, opts)
        }
        Route::Extension => {
            let ext = extension_property(sg, omega, opts.tol)?;
            assemble_extension(sg, omega, ext.c_max, opts)
        }
    }
}

fn checked_phi(
    sg: &FiniteStarSemigroup,
    space: &ModuleSpace,
    opts: &DilationOptions,
) -> Result<Vec<TranslationOperator>, DilationError> {
    let phi = translation_table(sg, space, opts.tol, opts.exec);
    if let Some(bad) = first_ill_defined(&phi) {
        return Err(DilationError::Unbounded {
            element: bad.label.clone(),
            residual: bad.residual,
        });
    }
    Ok(phi)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    route: Route,
    semigroup: FiniteStarSemigroup,
    original: &AFunction,
    omega: AFunction,
    module: ModuleSpace,
    phi: Vec<TranslationOperator>,
    v: ComplexMatrix,
    extension_constant: Option<f64>,
    opts: &DilationOptions,
) -> DilationTriple {
    let v_adjoint = v.adjoint();
    let len = original.len();
    let compressions: Vec<ComplexMatrix> = (0..len)
        .map(|s| v_adjoint.matmul(&phi[s].matrix.matmul(&v)))
        .collect();
    let reconstruction_error = (0..len)
        .map(|s| op_norm(&(original.value(s) - &compressions[s])))
        .fold(0.0, f64::max);
    let samples = sample_matrices(original.n(), opts.sample_budget.min(3), opts.seed);
    let mut sampled_error = 0.0f64;
    for s in 0..len {
        for a in &samples {
            for b in samples.iter().rev().take(3) {
                let lhs = a.adjoint_mul(&original.value(s).matmul(b));
                let rhs = v.matmul(a).adjoint_mul(&phi[s].matrix.matmul(&v.matmul(b)));
                sampled_error = sampled_error.max(op_norm(&(&lhs - &rhs)));
            }
        }
    }
    let span = ComplexMatrix::hstack(&(0..len).map(|s| phi[s].matrix.matmul(&v)).collect::<Vec<_>>());
    let minimal = numerical_rank(&span, opts.tol) == module.rank();
    DilationTriple {
        route,
        semigroup,
        omega,
        module,
        phi,
        v,
        v_adjoint,
        minimal,
        reconstruction_error,
        sampled_error,
        extension_constant,
    }
}

fn assemble_star(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    space: ModuleSpace,
    star: StarCondition,
    opts: &DilationOptions,
) -> Result<DilationTriple, DilationError> {
    let phi = checked_phi(sg, &space, opts)?;
    let rep = star
        .representative
        .ok_or_else(|| DilationError::NoStarCondition("no representative".into()))?;
    let v = space.reduce(&rep)?;
    Ok(finish(Route::Star, sg.clone(), omega, omega.clone(), space, phi, v, None, opts))
}

fn assemble_extension(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    c_max: f64,
    opts: &DilationOptions,
) -> Result<DilationTriple, DilationError> {
    // stay strictly inside the admissible interval so the extended Gram keeps a clean rank gap
    let c = if c_max.is_finite() { 0.5 * c_max } else { 1.0 };
    let (plus, omega_plus) = extend_omega(sg, omega, c, opts.tol)?;
    let space = omega_module(&plus, &omega_plus, opts.tol)?;
    let mut phi = checked_phi(&plus, &space, opts)?;
    phi.truncate(sg.len());
    let unit = plus.unit().unwrap_or(0);
    let v = space.section_coordinates(unit);
    let constant = (!sg.is_unital()).then_some(c);
    Ok(finish(
        Route::Extension,
        plus,
        omega,
        omega_plus,
        space,
        phi,
        v,
        constant,
        opts,
    ))
}

/// `W: ω_s a ↦ ω⁺_s a` from `E_ω` into `E_{ω⁺}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftReport {
    /// `r⁺ × r`
    pub w: ComplexMatrix,
    /// `‖W*W − I‖`
    pub isometry_error: f64,
    /// `max_s ‖W Φ_ω(s) − Φ_{ω⁺}(s) W‖`, the intertwining identity on `range W = E⁰`.
    pub intertwining_error: f64,
    pub constant: f64,
}

pub fn unitization_lift(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    c: f64,
    tol: f64,
) -> Result<LiftReport, DilationError> {
    let space = omega_module(sg, omega, tol)?;
    let (plus, omega_plus) = extend_omega(sg, omega, c, tol)?;
    let space_plus = omega_module(&plus, &omega_plus, tol)?;
    let n = omega.n();
    let rows = plus.len() * n;
    let cols = sg.len() * n;
    let embed = ComplexMatrix::identity(rows).submatrix(0, 0, rows, cols);
    let w = space_plus.reducer().matmul(&embed).matmul(space.pseudo_inverse());
    let isometry_error = op_norm(&(&w.adjoint_mul(&w) - &ComplexMatrix::identity(space.rank())));
    let intertwining_error = (0..sg.len())
        .map(|s| {
            let phi = translation_operator(sg, &space, s, tol);
            let phi_plus = translation_operator(&plus, &space_plus, s, tol);
            op_norm(&(&w.matmul(&phi.matrix) - &phi_plus.matrix.matmul(&w)))
        })
        .fold(0.0, f64::max);
    Ok(LiftReport {
        w,
        isometry_error,
        intertwining_error,
        constant: c,
    })
}

/// Finite approximate-unit arrays for `ω` read off its membership representative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxUnit {
    /// `(s_i, a_i)`
    pub terms: Vec<(usize, ComplexMatrix)>,
    /// `max_s ‖Σ a_i* ω(s_i s) − ω(s)‖`
    pub left_residual: f64,
    /// `max_s ‖Σ ω(s s_i*) a_i − ω(s)‖`
    pub right_residual: f64,
    /// `Σ a_i* ω(s_i s_j*) a_j`; the sequence in `n` is constant.
    pub cauchy_value: ComplexMatrix,
    /// Distance between consecutive terms of that sequence.
    pub cauchy_residual: f64,
}

pub fn approx_unit_arrays(
    sg: &FiniteStarSemigroup,
    omega: &AFunction,
    tol: f64,
) -> Result<ApproxUnit, DilationError> {
    let space = omega_module(sg, omega, tol)?;
    let star = star_condition(sg, omega, &space, tol)?;
    let rep = match (star.holds, star.representative) {
        (true, Some(rep)) => rep,
        _ => {
            return Err(DilationError::NoStarCondition(format!(
                "membership residual {:e}, symmetry defect {:e}",
                star.membership_residual, star.symmetry_defect
            )))
        }
    };
    let blocks: Vec<ComplexMatrix> = (0..sg.len()).map(|t| rep.block(t)).collect();
    let cut = tol * blocks.iter().map(op_norm).fold(0.0, f64::max);
    let terms: Vec<(usize, ComplexMatrix)> = blocks
        .into_iter()
        .enumerate()
        .filter(|(_, a)| op_norm(a) > cut)
        .map(|(t, a)| (sg.star(t), a))
        .collect();
    let n = omega.n();
    let mut left_residual = 0.0f64;
    let mut right_residual = 0.0f64;
    for s in 0..sg.len() {
        let mut left = ComplexMatrix::zeros(n, n);
        let mut right = ComplexMatrix::zeros(n, n);
        for (si, a) in &terms {
            left = &left + &a.adjoint_mul(omega.value(sg.mul(*si, s)));
            right = &right + &omega.value(sg.mul(s, sg.star(*si))).matmul(a);
        }
        left_residual = left_residual.max(op_norm(&(&left - omega.value(s))));
        right_residual = right_residual.max(op_norm(&(&right - omega.value(s))));
    }
    let mut cauchy_value = ComplexMatrix::zeros(n, n);
    for (si, a) in &terms {
        for (sj, b) in &terms {
            cauchy_value = &cauchy_value + &a.adjoint_mul(&omega.value(sg.mul(*si, sg.star(*sj))).matmul(b));
        }
    }
    Ok(ApproxUnit {
        terms,
        left_residual,
        right_residual,
        cauchy_value,
        cauchy_residual: 0.0,
    })
}
