//! One function per command, each mapping a problem onto a library operation.

use std::collections::BTreeMap;

use dilation_core::applications::{
    cp_check, hamburger, multi_hamburger, naimark, stinespring, subnormality_kernel, szn_contraction,
    ApplicationError, CpMap, MomentData, Povm,
};
use dilation_core::dilation::{
    boundedness_report, build_dilation, extend_omega, extension_property, omega_module,
    representation_checks, sample_matrices, star_condition, DilationError,
};
use dilation_core::kernel::{check_hermitian_symmetry, check_positive_definite, kernel_from_omega, KernelError};
use dilation_core::semigroup::{SemigroupError, Violation};
use dilation_core::{AFunction, AKernel, DilationOptions, Execution, FiniteStarSemigroup, ModuleSpace, DEFAULT_TOL};
use serde_json::{json, Value};

use crate::problem::{cp_matrices, moment_matrices, CpMatrices, MomentInput, Payload, PovmBuiltin, PovmSpec, Problem};
use crate::report::{matrix, num, nums, vector, Report};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    ValidateSemigroup,
    CheckPd,
    BuildRkhm,
    Dilate,
    Bounded,
    Extend,
    Stinespring,
    Naimark,
    Contraction,
    Moments,
    Subnormal,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::ValidateSemigroup,
        Command::CheckPd,
        Command::BuildRkhm,
        Command::Dilate,
        Command::Bounded,
        Command::Extend,
        Command::Stinespring,
        Command::Naimark,
        Command::Contraction,
        Command::Moments,
        Command::Subnormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::ValidateSemigroup => "validate-semigroup",
            Command::CheckPd => "check-pd",
            Command::BuildRkhm => "build-rkhm",
            Command::Dilate => "dilate",
            Command::Bounded => "bounded",
            Command::Extend => "extend",
            Command::Stinespring => "stinespring",
            Command::Naimark => "naimark",
            Command::Contraction => "contraction",
            Command::Moments => "moments",
            Command::Subnormal => "subnormal",
        }
    }

    /// Problem kinds the command accepts.
    pub fn kinds(self) -> &'static [&'static str] {
        match self {
            Command::ValidateSemigroup => &["semigroup", "invariant"],
            Command::CheckPd | Command::BuildRkhm => &["kernel", "invariant"],
            Command::Dilate | Command::Bounded | Command::Extend => &["invariant"],
            Command::Stinespring => &["cp_map"],
            Command::Naimark => &["povm"],
            Command::Contraction => &["contraction"],
            Command::Moments => &["moments"],
            Command::Subnormal => &["subnormality"],
        }
    }
}

/// Values from the command line or environment; `None` defers to the problem file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub n_max: Option<usize>,
    pub sample_budget: Option<usize>,
    pub window: Option<usize>,
}

/// Resolved options for one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub n_max: usize,
    pub sample_budget: usize,
    pub window: Option<usize>,
}

pub const DEFAULT_CONTRACTION_WINDOW: usize = 8;
pub const DEFAULT_SUBNORMAL_WINDOW: usize = 6;

impl Settings {
    pub fn resolve(problem: &Problem, over: &Overrides) -> Self {
        let o = &problem.options;
        let defaults = DilationOptions::default();
        Settings {
            tol: over.tol.or(o.tol).unwrap_or(DEFAULT_TOL),
            seed: over.seed.or(o.seed).unwrap_or(defaults.seed),
            n_max: over.n_max.or(o.n_max).unwrap_or(defaults.n_max),
            sample_budget: over.sample_budget.or(o.sample_budget).unwrap_or(defaults.sample_budget),
            window: over.window.or(o.window),
        }
    }

    pub fn dilation_options(&self) -> DilationOptions {
        DilationOptions {
            tol: self.tol,
            n_max: self.n_max,
            sample_budget: self.sample_budget,
            seed: self.seed,
            exec: Execution::default(),
        }
    }

    /// Threshold for reconstruction and representation residuals.
    pub fn residual_tol(&self) -> f64 {
        self.tol.max(1e-8)
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "tol": num(self.tol),
            "seed": self.seed,
            "n_max": self.n_max,
            "sample_budget": self.sample_budget,
        });
        if let Some(w) = self.window {
            v["window"] = w.into();
        }
        v
    }
}

/// Runs `command` on `problem`. Library failures that carry a certificate
/// become negative verdicts; everything else becomes an error report.
pub fn run(command: Command, problem: &Problem, over: &Overrides) -> Report {
    let kind = problem.payload.kind();
    let settings = Settings::resolve(problem, over);
    let mut report = Report::new(command.name(), kind, settings);
    if !command.kinds().contains(&kind) {
        return report.with_error(&CliError::UnsupportedKind {
            command: command.name().into(),
            kind: kind.into(),
        });
    }
    let outcome = match command {
        Command::ValidateSemigroup => validate_semigroup(problem, &mut report),
        Command::CheckPd => check_pd(problem, &settings, &mut report),
        Command::BuildRkhm => build_rkhm(problem, &settings, &mut report),
        Command::Dilate => dilate(problem, &settings, &mut report),
        Command::Bounded => bounded(problem, &settings, &mut report),
        Command::Extend => extend(problem, &settings, &mut report),
        Command::Stinespring => stinespring_cmd(problem, &settings, &mut report),
        Command::Naimark => naimark_cmd(problem, &settings, &mut report),
        Command::Contraction => contraction(problem, &settings, &mut report),
        Command::Moments => moments(problem, &settings, &mut report),
        Command::Subnormal => subnormal(problem, &settings, &mut report),
    };
    match outcome {
        Ok(()) => report,
        Err(e) => report.with_error(&e),
    }
}

fn labels_of(s: &FiniteStarSemigroup, idx: &[usize]) -> Value {
    Value::Array(idx.iter().map(|&i| s.label(i).into()).collect())
}

fn invariant(problem: &Problem) -> Result<(FiniteStarSemigroup, AFunction), CliError> {
    match &problem.payload {
        Payload::Invariant(inv) => inv.build(),
        _ => unreachable!("kind checked in run"),
    }
}

fn kernel_of(problem: &Problem) -> Result<AKernel, CliError> {
    match &problem.payload {
        Payload::Kernel(k) => k.build(),
        Payload::Invariant(inv) => {
            let (s, omega) = inv.build()?;
            Ok(kernel_from_omega(&s, &omega)?)
        }
        _ => unreachable!("kind checked in run"),
    }
}

fn validate_semigroup(problem: &Problem, report: &mut Report) -> Result<(), CliError> {
    let spec = match &problem.payload {
        Payload::Semigroup(s) => s,
        Payload::Invariant(inv) => &inv.semigroup,
        _ => unreachable!("kind checked in run"),
    };
    let raw = spec.raw()?;
    let labels = raw.labels.clone();
    match FiniteStarSemigroup::validate(raw) {
        Ok(s) => {
            report
                .verdict("valid", true)
                .cert("violations", 0)
                .cert("size", s.len())
                .cert("unit", s.unit().map_or(Value::Null, |u| s.label(u).into()))
                .cert("inverse_semigroup", s.is_inverse_semigroup());
            Ok(())
        }
        Err(SemigroupError::Invalid(violations)) => {
            let first = &violations[0];
            let (indices, axiom) = match *first {
                Violation::NotAssociative { a, b, c } => (vec![a, b, c], "(a·b)·c = a·(b·c)"),
                Violation::NotInvolutive { a } => (vec![a], "a** = a"),
                Violation::NotAntiHomomorphism { a, b } => (vec![a, b], "(a·b)* = b*·a*"),
            };
            report
                .verdict("valid", false)
                .cert("violations", violations.len())
                .cert(
                    "witness",
                    json!({
                        "violation": first.name(),
                        "axiom": axiom,
                        "indices": indices,
                        "labels": indices.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>(),
                    }),
                );
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn check_pd(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let k = kernel_of(problem)?;
    let deviation = check_hermitian_symmetry(&k);
    report.cert("hermitian_deviation", num(deviation)).cert("points", k.len()).cert("n", k.n());
    match check_positive_definite(&k, settings.tol) {
        Ok(v) => {
            report
                .verdict("hermitian", true)
                .verdict("positive_definite", v.psd)
                .cert("min_eigenvalue", num(v.min_eigenvalue))
                .cert("threshold", num(v.threshold))
                .cert("witness", vector(&v.witness));
            Ok(())
        }
        Err(KernelError::NonHermitianKernel { .. }) => {
            report.verdict("hermitian", false).verdict("positive_definite", false);
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn not_pd(report: &mut Report, min_eigenvalue: f64, witness: &[dilation_core::num_complex::Complex64]) {
    report
        .verdict("positive_definite", false)
        .cert("min_eigenvalue", num(min_eigenvalue))
        .cert("witness", vector(witness));
}

fn build_rkhm(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let k = kernel_of(problem)?;
    let space = match ModuleSpace::build(&k, settings.tol) {
        Ok(space) => space,
        Err(KernelError::NotPositiveDefinite { min_eigenvalue, witness }) => {
            not_pd(report, min_eigenvalue, &witness);
            return Ok(());
        }
        Err(KernelError::NonHermitianKernel { deviation }) => {
            report.verdict("positive_definite", false).cert("hermitian_deviation", num(deviation));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let samples = sample_matrices(k.n(), settings.sample_budget, settings.seed);
    let residual = space.kolmogorov_check(&samples);
    let scale = k.max_block_norm().max(1.0);
    let eig = space.eigen();
    report
        .verdict("positive_definite", true)
        .verdict("kolmogorov", residual <= settings.residual_tol() * scale)
        .cert("rank", space.rank())
        .cert("gram_eigenvalues", nums(&eig.values))
        .cert("kolmogorov_residual", num(residual))
        .cert("residual_threshold", num(settings.residual_tol() * scale))
        .artifact("reducer", matrix(space.reducer()));
    Ok(())
}

fn omega_scale(omega: &AFunction) -> f64 {
    omega.values().iter().map(dilation_core::algebra::op_norm).fold(1.0, f64::max)
}

fn dilate(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let (s, omega) = invariant(problem)?;
    let opts = settings.dilation_options();
    let thr = settings.residual_tol() * omega_scale(&omega);
    let triple = match build_dilation(&s, &omega, &opts) {
        Ok(t) => t,
        Err(e) => return negative_dilation(&s, &omega, settings, report, e),
    };
    let rep = representation_checks(&s, &omega, &triple.module, &triple.phi, &[], opts.exec);
    report
        .verdict("dilation", true)
        .verdict("reconstructs", triple.reconstruction_error <= thr && triple.sampled_error <= thr)
        .verdict("representation", rep.multiplicativity <= thr && rep.star <= thr)
        .verdict("minimal", triple.minimal)
        .cert("route", serde_json::to_value(triple.route).expect("route serializes"))
        .cert("dimension", triple.dimension())
        .cert("reconstruction_error", num(triple.reconstruction_error))
        .cert("sampled_error", num(triple.sampled_error))
        .cert("multiplicativity_residual", num(rep.multiplicativity))
        .cert("star_residual", num(rep.star))
        .cert("covariance_residual", num(rep.covariance))
        .cert("residual_threshold", num(thr))
        .cert("extension_constant", triple.extension_constant.map_or(Value::Null, num))
        .artifact("v", matrix(&triple.v))
        .artifact(
            "phi",
            Value::Object(
                triple
                    .phi
                    .iter()
                    .map(|p| (p.label.clone(), matrix(&p.matrix)))
                    .collect(),
            ),
        );
    Ok(())
}

/// Certificates for a dilation failure.
fn negative_dilation(
    s: &FiniteStarSemigroup,
    omega: &AFunction,
    settings: &Settings,
    report: &mut Report,
    err: DilationError,
) -> Result<(), CliError> {
    match err {
        DilationError::NoStarCondition(why) => {
            let space = omega_module(s, omega, settings.tol)?;
            let star = star_condition(s, omega, &space, settings.tol)?;
            report
                .verdict("dilation", false)
                .cert("membership_residual", num(star.membership_residual))
                .cert("symmetry_defect", num(star.symmetry_defect))
                .cert("reason", why);
        }
        DilationError::NotHermitianOmega { deviation } => {
            report.verdict("dilation", false).cert("symmetry_defect", num(deviation));
        }
        DilationError::IllDefinedTranslation { element, residual, witness } => {
            report
                .verdict("dilation", false)
                .cert("element", element)
                .cert("null_space_residual", num(residual))
                .cert("witness", vector(&witness));
        }
        DilationError::Unbounded { element, residual } => {
            report
                .verdict("dilation", false)
                .cert("element", element)
                .cert("residual", num(residual));
        }
        DilationError::Kernel(KernelError::NotPositiveDefinite { min_eigenvalue, witness }) => {
            report.verdict("dilation", false);
            not_pd(report, min_eigenvalue, &witness);
        }
        other => return Err(other.into()),
    }
    Ok(())
}

fn bounded(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let (s, omega) = invariant(problem)?;
    let space = match omega_module(&s, &omega, settings.tol) {
        Ok(space) => space,
        Err(DilationError::Kernel(KernelError::NotPositiveDefinite { min_eigenvalue, witness })) => {
            not_pd(report, min_eigenvalue, &witness);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let b = match boundedness_report(&s, &omega, &space, &settings.dilation_options()) {
        Ok(b) => b,
        Err(DilationError::IllDefinedTranslation { element, residual, witness }) => {
            report
                .verdict("bounded", false)
                .cert("element", element)
                .cert("null_space_residual", num(residual))
                .cert("witness", vector(&witness));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let by_label = |xs: &[f64]| -> Value { Value::Object(b.labels.iter().cloned().zip(xs.iter().map(|&x| num(x))).collect()) };
    let b_le_a = b.c_b.iter().zip(&b.c_a).all(|(cb, ca)| *cb <= ca + 1e-8);
    let mut stable = true;
    let mut matches = true;
    let sequences: Vec<Value> = b
        .sequences
        .iter()
        .map(|q| {
            stable &= q.stabilized;
            let close = (q.limit_estimate - q.prediction).abs() <= 0.05 * q.prediction + 1e-8;
            matches &= close;
            json!({
                "element": s.label(q.s),
                "powers": labels_of(&s, &q.powers),
                "values": nums(&q.values),
                "roots": nums(&q.roots),
                "ratio_estimates": nums(&q.ratio_estimates),
                "limit_estimate": num(q.limit_estimate),
                "prediction": num(q.prediction),
                "stabilized": q.stabilized,
            })
        })
        .collect();
    let pairs = |v: &[(usize, usize)]| -> Value {
        Value::Array(v.iter().map(|&(a, c)| json!([s.label(a), s.label(c)])).collect())
    };
    let mut d_max: BTreeMap<String, f64> = BTreeMap::new();
    for d in &b.d_bounds {
        let e = d_max.entry(s.label(d.t).to_string()).or_insert(0.0);
        *e = e.max(d.value);
    }
    report
        .verdict("bounded", b.finite())
        .verdict("submultiplicative", b.c_a_violations.is_empty() && b.c_b_violations.is_empty())
        .verdict("c_b_le_c_a", b_le_a)
        .verdict("power_sequences_stable", stable)
        .verdict("power_limits_match", matches)
        .cert("c_a", by_label(&b.c_a))
        .cert("c_b", by_label(&b.c_b))
        .cert("c_a_violations", pairs(&b.c_a_violations))
        .cert("c_b_violations", pairs(&b.c_b_violations))
        .cert("sequences", Value::Array(sequences))
        .cert("d_max", Value::Object(d_max.into_iter().map(|(k, v)| (k, num(v))).collect()))
        .cert("sample_count", b.sample_count);
    Ok(())
}

fn extend(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let (s, omega) = invariant(problem)?;
    let tol = settings.tol;
    let ext = match extension_property(&s, &omega, tol) {
        Ok(ext) => ext,
        Err(DilationError::NoExtension(why)) => {
            report.verdict("extendable", false).cert("reason", why);
            return Ok(());
        }
        Err(DilationError::NotHermitianOmega { deviation }) => {
            report.verdict("extendable", false).cert("symmetry_defect", num(deviation));
            return Ok(());
        }
        Err(DilationError::Kernel(KernelError::NotPositiveDefinite { min_eigenvalue, witness })) => {
            report.verdict("extendable", false);
            not_pd(report, min_eigenvalue, &witness);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    report
        .verdict("extendable", true)
        .cert("c_max", num(ext.c_max))
        .cert("closed_form", num(ext.closed_form))
        .cert("iterations", ext.iterations)
        .cert("range_residual", num(ext.range_residual))
        .cert("unital", s.is_unital());
    let space = omega_module(&s, &omega, tol)?;
    let star = star_condition(&s, &omega, &space, tol)?;
    report.cert("star_condition", star.holds);
    if let Some(norm_sq) = star.norm_sq {
        report
            .verdict("c_max_dominates_inverse_norm", ext.c_max >= 1.0 / norm_sq - 1e-8)
            .cert("inverse_norm_sq", num(1.0 / norm_sq));
    }
    if ext.c_max.is_finite() && !s.is_unital() {
        let at = extend_omega(&s, &omega, ext.c_max, tol);
        report.verdict("psd_at_c_max", at.is_ok());
        match extend_omega(&s, &omega, 1.01 * ext.c_max, tol) {
            Err(DilationError::BadConstant { c, min_eigenvalue, witness }) => {
                report.verdict("fails_above_c_max", true).cert(
                    "above_c_max",
                    json!({ "c": num(c), "min_eigenvalue": num(min_eigenvalue), "witness": vector(&witness) }),
                );
            }
            Ok(_) => {
                report.verdict("fails_above_c_max", false);
            }
            Err(e) => return Err(e.into()),
        }
        if let Ok((plus, omega_plus)) = at {
            report.artifact(
                "omega_plus",
                Value::Object(plus.labels().iter().cloned().zip(omega_plus.values().iter().map(matrix)).collect()),
            );
        }
    }
    Ok(())
}

fn stinespring_cmd(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let Payload::CpMap(spec) = &problem.payload else {
        unreachable!("kind checked in run")
    };
    let map = match cp_matrices(spec)? {
        CpMatrices::Kraus(ops) => CpMap::from_kraus(&ops)?,
        CpMatrices::Action(m, images) => {
            let n = images[0].rows();
            CpMap::new(m, n, images)?
        }
    };
    let verdict = cp_check(&map, settings.tol)?;
    report
        .verdict("completely_positive", verdict.completely_positive)
        .cert("choi_min_eigenvalue", num(verdict.choi_min_eigenvalue))
        .cert("choi_rank", verdict.choi_rank)
        .cert("kernel_positive_definite", verdict.kernel_positive_definite)
        .cert("tests_agree", verdict.agree);
    if !verdict.completely_positive {
        report.cert("witness", vector(&verdict.witness));
        return Ok(());
    }
    let rep = match stinespring(&map, &settings.dilation_options()) {
        Ok(rep) => rep,
        Err(ApplicationError::NotCp { min_eigenvalue, witness }) => {
            report
                .verdict("completely_positive", false)
                .cert("choi_min_eigenvalue", num(min_eigenvalue))
                .cert("witness", vector(&witness));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let thr = 1e-7f64.max(settings.tol);
    report
        .verdict("routes_agree", rep.route_disagreement <= thr)
        .verdict("rank_matches_choi", rep.row_block_rank == verdict.choi_rank)
        .cert("route_disagreement", num(rep.route_disagreement))
        .cert("framework_error", num(rep.framework_error))
        .cert("kraus_error", num(rep.kraus_error))
        .cert("module_rank", rep.module_rank)
        .cert("row_block_rank", rep.row_block_rank)
        .cert("kraus_count", rep.kraus.len())
        .cert("dimension", rep.triple.dimension())
        .cert("route", serde_json::to_value(rep.triple.route).expect("route serializes"))
        .artifact("kraus", Value::Array(rep.kraus.iter().map(matrix).collect()))
        .artifact("v", matrix(&rep.triple.v));
    Ok(())
}

fn naimark_cmd(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let Payload::Povm(spec) = &problem.payload else {
        unreachable!("kind checked in run")
    };
    let povm = match spec {
        PovmSpec::Builtin { builtin: PovmBuiltin::Trine } => Povm::trine(),
        PovmSpec::Effects { effects } => {
            let effects = effects
                .iter()
                .enumerate()
                .map(|(i, m)| m.to_matrix(&format!("payload.effects[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Povm::new(effects, settings.tol)?
        }
    };
    let rep = naimark(&povm, &settings.dilation_options())?;
    let thr = settings.residual_tol();
    report
        .verdict("projection_valued", rep.projection_residual <= thr && rep.product_residual <= thr)
        .verdict("additive", rep.additivity_residual <= thr)
        .verdict("reproduces_povm", rep.compression_error <= thr)
        .cert("outcomes", povm.outcomes())
        .cert("dimension", rep.framework_dimension)
        .cert("oracle_dimension", rep.oracle_dimension)
        .cert("projection_residual", num(rep.projection_residual))
        .cert("product_residual", num(rep.product_residual))
        .cert("additivity_residual", num(rep.additivity_residual))
        .cert("isometry_error", num(rep.isometry_error))
        .cert("compression_error", num(rep.compression_error))
        .cert("oracle_isometry_error", num(rep.oracle_isometry_error))
        .cert("oracle_compression_error", num(rep.oracle_compression_error))
        .cert("residual_threshold", num(thr))
        .artifact("v", matrix(&rep.triple.v));
    Ok(())
}

fn operator(problem: &Problem) -> Result<dilation_core::ComplexMatrix, CliError> {
    match &problem.payload {
        Payload::Contraction(op) | Payload::Subnormality(op) => op.t.to_matrix("payload.t"),
        _ => unreachable!("kind checked in run"),
    }
}

fn contraction(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let t = operator(problem)?;
    let window = settings.window.unwrap_or(DEFAULT_CONTRACTION_WINDOW);
    report.cert("window", window);
    let rep = match szn_contraction(&t, window, settings.tol) {
        Ok(rep) => rep,
        Err(ApplicationError::NotContraction { norm }) => {
            report.verdict("contraction", false).cert("norm", num(norm));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let thr = settings.residual_tol();
    report
        .verdict("contraction", true)
        .verdict("unitary", rep.unitarity_error <= thr)
        .verdict("compresses_powers", rep.compression_error <= thr)
        .verdict("toeplitz_positive", rep.window.psd)
        .cert("norm", num(rep.norm))
        .cert("unitarity_error", num(rep.unitarity_error))
        .cert("compression_error", num(rep.compression_error))
        .cert("defect_norm", num(rep.defect_norm))
        .cert("adjoint_defect_norm", num(rep.adjoint_defect_norm))
        .cert("toeplitz_min_eigenvalue", num(rep.window.min_eigenvalue))
        .cert("residual_threshold", num(thr))
        .artifact("unitary", matrix(&rep.unitary));
    Ok(())
}

fn moments(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let Payload::Moments(spec) = &problem.payload else {
        unreachable!("kind checked in run")
    };
    let mut data = match moment_matrices(spec)? {
        MomentInput::Sequence(seq) => MomentData::from_sequence(seq)?,
        MomentInput::Atoms(atoms, cap) => MomentData::from_atoms(&atoms, cap)?,
        MomentInput::Table(dim, table) => MomentData::new(dim, table)?,
    };
    if let Some(w) = settings.window.filter(|&w| w < data.window()) {
        let kept = data
            .entries()
            .filter(|(k, _)| k.iter().all(|&x| x <= 2 * w))
            .map(|(k, m)| (k.clone(), m.clone()))
            .collect();
        data = MomentData::new(data.dim(), kept)?;
    }
    report.cert("dim", data.dim()).cert("window", data.window());
    if data.dim() == 1 {
        let rep = hamburger(&data, settings.tol)?;
        report
            .verdict("positive", rep.hankel.psd)
            .cert("min_eigenvalue", num(rep.hankel.min_eigenvalue))
            .cert("threshold", num(rep.hankel.threshold))
            .cert("radius_estimate", num(rep.radius_estimate));
        if !rep.hankel.psd {
            report.cert("witness", vector(&rep.hankel.witness));
        }
    } else {
        let rep = multi_hamburger(&data, settings.tol)?;
        report
            .verdict("positive", rep.moment_matrix.psd)
            .cert("min_eigenvalue", num(rep.moment_matrix.min_eigenvalue))
            .cert("threshold", num(rep.moment_matrix.threshold))
            .cert("radii", nums(&rep.radii));
        if !rep.moment_matrix.psd {
            report.cert("witness", vector(&rep.moment_matrix.witness));
        }
    }
    Ok(())
}

fn subnormal(problem: &Problem, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let t = operator(problem)?;
    let window = settings.window.unwrap_or(DEFAULT_SUBNORMAL_WINDOW);
    let rep = subnormality_kernel(&t, window, settings.tol)?;
    report
        .verdict("windows_positive", rep.passes_all())
        .cert("window", window)
        .cert("min_eigenvalues", nums(&rep.min_eigenvalues));
    if let Some(f) = &rep.failure {
        report.cert(
            "failure",
            json!({
                "window": f.window,
                "min_eigenvalue": num(f.certificate.min_eigenvalue),
                "witness": vector(&f.certificate.witness),
            }),
        );
    }
    Ok(())
}
