//! Problem files: `{kind, payload, options}` JSON.

use std::collections::BTreeMap;
use std::path::Path;

use dilation_core::num_complex::Complex64;
use dilation_core::semigroup::{Family, RawSemigroup};
use dilation_core::{AFunction, AKernel, ComplexMatrix, FiniteStarSemigroup};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// `[re, im]` entries, one array per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixJson(
            (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix, CliError> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(CliError::Shape {
                field: field.into(),
                message: "empty matrix".into(),
            });
        }
        if let Some(i) = self.0.iter().position(|r| r.len() != cols) {
            return Err(CliError::Shape {
                field: field.into(),
                message: format!("row {i} has {} entries, row 0 has {cols}", self.0[i].len()),
            });
        }
        if self.0.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Shape {
                field: field.into(),
                message: "non-finite entry".into(),
            });
        }
        let rows: Vec<Vec<Complex64>> = self
            .0
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Shape {
            field: field.into(),
            message: e.to_string(),
        })
    }

    fn to_square(&self, field: &str, n: usize) -> Result<ComplexMatrix, CliError> {
        let m = self.to_matrix(field)?;
        if m.shape() != (n, n) {
            return Err(CliError::Shape {
                field: field.into(),
                message: format!("expected {n}×{n}, got {}×{}", m.rows(), m.cols()),
            });
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SemigroupSpec {
    Table {
        labels: Vec<String>,
        /// `mult[a][b] = a·b`, by index.
        mult: Vec<Vec<usize>>,
        inv: Vec<usize>,
    },
    Builtin(Family),
}

impl SemigroupSpec {
    pub fn from_semigroup(s: &FiniteStarSemigroup) -> Self {
        let raw = s.to_raw();
        let n = raw.labels.len();
        SemigroupSpec::Table {
            labels: raw.labels,
            mult: raw.mult.chunks(n).map(<[usize]>::to_vec).collect(),
            inv: raw.inv,
        }
    }

    /// The raw table, before axiom checks.
    pub fn raw(&self) -> Result<RawSemigroup, CliError> {
        match self {
            SemigroupSpec::Table { labels, mult, inv } => {
                let n = labels.len();
                if let Some(i) = mult.iter().position(|r| r.len() != n) {
                    return Err(CliError::Shape {
                        field: format!("mult[{i}]"),
                        message: format!("expected {n} entries, got {}", mult[i].len()),
                    });
                }
                Ok(RawSemigroup {
                    labels: labels.clone(),
                    mult: mult.concat(),
                    inv: inv.clone(),
                })
            }
            SemigroupSpec::Builtin(f) => Ok(FiniteStarSemigroup::builtin(f)?.to_raw()),
        }
    }

    pub fn build(&self) -> Result<FiniteStarSemigroup, CliError> {
        Ok(FiniteStarSemigroup::validate(self.raw()?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub base: Vec<String>,
    pub n: usize,
    /// Keyed by `"s|t"`.
    pub blocks: BTreeMap<String, MatrixJson>,
}

impl KernelSpec {
    pub fn from_kernel(k: &AKernel) -> Self {
        let mut blocks = BTreeMap::new();
        for (i, s) in k.base().iter().enumerate() {
            for (j, t) in k.base().iter().enumerate() {
                blocks.insert(format!("{s}|{t}"), MatrixJson::from_matrix(k.get(i, j)));
            }
        }
        KernelSpec {
            base: k.base().to_vec(),
            n: k.n(),
            blocks,
        }
    }

    pub fn build(&self) -> Result<AKernel, CliError> {
        let mut out = Vec::with_capacity(self.base.len() * self.base.len());
        for s in &self.base {
            for t in &self.base {
                let key = format!("{s}|{t}");
                let m = self.blocks.get(&key).ok_or_else(|| CliError::Schema {
                    field: format!("payload.blocks.{key}"),
                    message: "missing block".into(),
                })?;
                out.push(m.to_square(&format!("payload.blocks.{key}"), self.n)?);
            }
        }
        if let Some(extra) = self.blocks.keys().find(|k| {
            let mut it = k.splitn(2, '|');
            let known = |x: Option<&str>| x.is_some_and(|x| self.base.iter().any(|b| b == x));
            !(known(it.next()) && known(it.next()))
        }) {
            return Err(CliError::Schema {
                field: format!("payload.blocks.{extra}"),
                message: "key does not name two base points".into(),
            });
        }
        Ok(AKernel::new(self.base.clone(), self.n, out)?)
    }
}

/// `ω` on a semigroup, keyed by element label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantSpec {
    pub semigroup: SemigroupSpec,
    pub omega: BTreeMap<String, MatrixJson>,
}

impl InvariantSpec {
    pub fn from_omega(s: &FiniteStarSemigroup, omega: &AFunction) -> Self {
        InvariantSpec {
            semigroup: SemigroupSpec::from_semigroup(s),
            omega: s
                .labels()
                .iter()
                .zip(omega.values())
                .map(|(l, m)| (l.clone(), MatrixJson::from_matrix(m)))
                .collect(),
        }
    }

    pub fn build(&self) -> Result<(FiniteStarSemigroup, AFunction), CliError> {
        let s = self.semigroup.build()?;
        let n = self.omega.values().next().map_or(0, |m| m.0.len());
        let mut values = Vec::with_capacity(s.len());
        for label in s.labels() {
            let field = format!("payload.omega.{label}");
            let m = self.omega.get(label).ok_or_else(|| CliError::Schema {
                field: field.clone(),
                message: "missing value".into(),
            })?;
            values.push(m.to_square(&field, n)?);
        }
        if let Some(extra) = self.omega.keys().find(|k| s.index_of(k).is_none()) {
            return Err(CliError::Schema {
                field: format!("payload.omega.{extra}"),
                message: "not an element of the semigroup".into(),
            });
        }
        Ok((s.clone(), AFunction::on_semigroup(&s, values)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CpMapSpec {
    /// `x ↦ Σ A_k* x A_k`, each `A_k` of shape `m × n`.
    Kraus { kraus: Vec<MatrixJson> },
    /// Images `φ(E_ij)` in row-major order over `(i, j)`.
    Action { m: usize, action: Vec<MatrixJson> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PovmSpec {
    Effects { effects: Vec<MatrixJson> },
    Builtin { builtin: PovmBuiltin },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PovmBuiltin {
    Trine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub t: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MomentSpec {
    /// `γ_0, …, γ_{2N}`.
    Sequence { sequence: Vec<MatrixJson> },
    /// Moments of a discrete measure up to `cap` per axis.
    Atoms { atoms: Vec<Atom>, cap: usize },
    /// Multi-indices written `"k1,k2,…"`.
    Table {
        dim: usize,
        moments: BTreeMap<String, MatrixJson>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Payload {
    Semigroup(SemigroupSpec),
    Kernel(KernelSpec),
    Invariant(InvariantSpec),
    CpMap(CpMapSpec),
    Povm(PovmSpec),
    Contraction(OperatorSpec),
    Moments(MomentSpec),
    Subnormality(OperatorSpec),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Semigroup(_) => "semigroup",
            Payload::Kernel(_) => "kernel",
            Payload::Invariant(_) => "invariant",
            Payload::CpMap(_) => "cp_map",
            Payload::Povm(_) => "povm",
            Payload::Contraction(_) => "contraction",
            Payload::Moments(_) => "moments",
            Payload::Subnormality(_) => "subnormality",
        }
    }
}

/// Values stored in the file; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_budget: Option<usize>,
    /// Window `N` for contraction, subnormality and moment truncation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "options_empty")]
    pub options: ProblemOptions,
}

fn options_empty(o: &ProblemOptions) -> bool {
    *o == ProblemOptions::default()
}

const KINDS: [&str; 8] = [
    "semigroup",
    "kernel",
    "invariant",
    "cp_map",
    "povm",
    "contraction",
    "moments",
    "subnormality",
];

impl Problem {
    pub fn new(payload: Payload) -> Self {
        Problem {
            payload,
            options: ProblemOptions::default(),
        }
    }

    pub fn with_options(mut self, options: ProblemOptions) -> Self {
        self.options = options;
        self
    }

    pub fn to_json(&self) -> String {
        crate::report::render(&crate::report::sorted(serde_json::to_value(self).expect("problems serialize")))
    }

    /// Parses and shape-checks a problem from JSON text.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| CliError::Schema {
            field: "$".into(),
            message: "top level must be an object".into(),
        })?;
        if let Some(key) = obj.keys().find(|k| !["kind", "payload", "options", "schema_version"].contains(&k.as_str())) {
            return Err(CliError::Schema {
                field: key.clone(),
                message: "unknown field".into(),
            });
        }
        let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| CliError::Schema {
            field: "kind".into(),
            message: "missing or not a string".into(),
        })?;
        if !KINDS.contains(&kind) {
            return Err(CliError::Schema {
                field: "kind".into(),
                message: format!("unknown kind {kind:?}, expected one of {KINDS:?}"),
            });
        }
        let payload = obj.get("payload").cloned().ok_or_else(|| CliError::Schema {
            field: "payload".into(),
            message: "missing".into(),
        })?;
        let payload = parse_payload(kind, payload)?;
        let options = match obj.get("options") {
            None => ProblemOptions::default(),
            Some(v) => serde_path_to_error::deserialize(v.clone()).map_err(|e| CliError::Schema {
                field: format!("options.{}", e.path()),
                message: e.inner().to_string(),
            })?,
        };
        let problem = Problem { payload, options };
        problem.validate()?;
        Ok(problem)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Shape checks on every matrix. Semantic checks are left to dispatch.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.payload {
            Payload::Semigroup(s) => s.raw().map(drop),
            Payload::Kernel(k) => k.build().map(drop),
            Payload::Invariant(inv) => {
                let n = inv.omega.values().next().map_or(0, |m| m.0.len());
                for (label, m) in &inv.omega {
                    m.to_square(&format!("payload.omega.{label}"), n)?;
                }
                inv.semigroup.raw().map(drop)
            }
            Payload::CpMap(spec) => cp_matrices(spec).map(drop),
            Payload::Povm(PovmSpec::Effects { effects }) => effects
                .iter()
                .enumerate()
                .try_for_each(|(i, m)| m.to_matrix(&format!("payload.effects[{i}]")).map(drop)),
            Payload::Povm(PovmSpec::Builtin { .. }) => Ok(()),
            Payload::Contraction(op) | Payload::Subnormality(op) => op.t.to_matrix("payload.t").map(drop),
            Payload::Moments(spec) => moment_matrices(spec).map(drop),
        }
    }
}

fn parse_payload(kind: &str, payload: Value) -> Result<Payload, CliError> {
    fn typed<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
        serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            CliError::Schema {
                field: if path == "." { "payload".into() } else { format!("payload.{path}") },
                message: e.inner().to_string(),
            }
        })
    }
    Ok(match kind {
        "semigroup" => Payload::Semigroup(typed(payload)?),
        "kernel" => Payload::Kernel(typed(payload)?),
        "invariant" => Payload::Invariant(typed(payload)?),
        "cp_map" => Payload::CpMap(typed(payload)?),
        "povm" => Payload::Povm(typed(payload)?),
        "contraction" => Payload::Contraction(typed(payload)?),
        "moments" => Payload::Moments(typed(payload)?),
        "subnormality" => Payload::Subnormality(typed(payload)?),
        _ => unreachable!("kind checked by caller"),
    })
}

pub(crate) enum CpMatrices {
    Kraus(Vec<ComplexMatrix>),
    Action(usize, Vec<ComplexMatrix>),
}

pub(crate) fn cp_matrices(spec: &CpMapSpec) -> Result<CpMatrices, CliError> {
    match spec {
        CpMapSpec::Kraus { kraus } => {
            let ops = kraus
                .iter()
                .enumerate()
                .map(|(i, m)| m.to_matrix(&format!("payload.kraus[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            if ops.is_empty() {
                return Err(CliError::Schema {
                    field: "payload.kraus".into(),
                    message: "no Kraus operators".into(),
                });
            }
            if let Some(i) = ops.iter().position(|a| a.shape() != ops[0].shape()) {
                return Err(CliError::Shape {
                    field: format!("payload.kraus[{i}]"),
                    message: format!("shape {:?} differs from kraus[0] {:?}", ops[i].shape(), ops[0].shape()),
                });
            }
            Ok(CpMatrices::Kraus(ops))
        }
        CpMapSpec::Action { m, action } => {
            if action.len() != m * m {
                return Err(CliError::Shape {
                    field: "payload.action".into(),
                    message: format!("expected {} images, got {}", m * m, action.len()),
                });
            }
            let n = action.first().map_or(0, |a| a.0.len());
            let images = action
                .iter()
                .enumerate()
                .map(|(i, a)| a.to_square(&format!("payload.action[{i}]"), n))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CpMatrices::Action(*m, images))
        }
    }
}

pub(crate) enum MomentInput {
    Sequence(Vec<ComplexMatrix>),
    Atoms(Vec<(Vec<f64>, f64)>, usize),
    Table(usize, BTreeMap<Vec<usize>, ComplexMatrix>),
}

pub(crate) fn moment_matrices(spec: &MomentSpec) -> Result<MomentInput, CliError> {
    match spec {
        MomentSpec::Sequence { sequence } => {
            let n = sequence.first().map_or(0, |m| m.0.len());
            Ok(MomentInput::Sequence(
                sequence
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_square(&format!("payload.sequence[{i}]"), n))
                    .collect::<Result<_, _>>()?,
            ))
        }
        MomentSpec::Atoms { atoms, cap } => {
            let dim = atoms.first().map_or(0, |a| a.point.len());
            if let Some(i) = atoms.iter().position(|a| a.point.len() != dim || dim == 0) {
                return Err(CliError::Shape {
                    field: format!("payload.atoms[{i}].point"),
                    message: format!("expected {dim} coordinates"),
                });
            }
            Ok(MomentInput::Atoms(
                atoms.iter().map(|a| (a.point.clone(), a.weight)).collect(),
                *cap,
            ))
        }
        MomentSpec::Table { dim, moments } => {
            let n = moments.values().next().map_or(0, |m| m.0.len());
            let mut out = BTreeMap::new();
            for (key, m) in moments {
                let field = format!("payload.moments.{key}");
                let index = key
                    .split(',')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .ok()
                    .filter(|k| k.len() == *dim)
                    .ok_or_else(|| CliError::Schema {
                        field: field.clone(),
                        message: format!("key must be {dim} comma-separated integers"),
                    })?;
                out.insert(index, m.to_square(&field, n)?);
            }
            Ok(MomentInput::Table(*dim, out))
        }
    }
}
