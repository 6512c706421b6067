//! Reports: verdicts with their certificates, plus optional exported matrices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dilation_core::num_complex::Complex64;
use dilation_core::ComplexMatrix;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::Settings;
use crate::{CliError, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Affirmative,
    Negative,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Affirmative => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub kind: Option<String>,
    pub settings: Option<Settings>,
    pub verdicts: BTreeMap<String, bool>,
    pub certificates: BTreeMap<String, Value>,
    pub artifacts: BTreeMap<String, Value>,
    pub error: Option<(String, String)>,
}

impl Report {
    pub fn new(command: &str, kind: &str, settings: Settings) -> Self {
        Report {
            command: command.into(),
            kind: Some(kind.into()),
            settings: Some(settings),
            verdicts: BTreeMap::new(),
            certificates: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            error: None,
        }
    }

    pub fn failure(command: &str, err: &CliError) -> Self {
        Report {
            command: command.into(),
            kind: None,
            settings: None,
            verdicts: BTreeMap::new(),
            certificates: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            error: Some((err.name(), err.to_string())),
        }
    }

    pub fn with_error(mut self, err: &CliError) -> Self {
        self.error = Some((err.name(), err.to_string()));
        self
    }

    pub fn verdict(&mut self, name: &str, holds: bool) -> &mut Self {
        self.verdicts.insert(name.into(), holds);
        self
    }

    pub fn cert(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.certificates.insert(name.into(), value.into());
        self
    }

    pub fn artifact(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.artifacts.insert(name.into(), value.into());
        self
    }

    pub fn status(&self) -> Status {
        if self.error.is_some() {
            Status::Error
        } else if self.verdicts.values().all(|&v| v) {
            Status::Affirmative
        } else {
            Status::Negative
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status().exit_code()
    }

    pub fn to_value(&self, with_artifacts: bool) -> Value {
        let mut out = Map::new();
        out.insert("schema_version".into(), SCHEMA_VERSION.into());
        out.insert("command".into(), self.command.clone().into());
        out.insert("status".into(), serde_json::to_value(self.status()).expect("status serializes"));
        if let Some(kind) = &self.kind {
            out.insert("kind".into(), kind.clone().into());
        }
        if let Some(s) = &self.settings {
            out.insert("options".into(), s.to_value());
        }
        out.insert("verdicts".into(), serde_json::to_value(&self.verdicts).expect("bools serialize"));
        out.insert("certificates".into(), Value::Object(self.certificates.clone().into_iter().collect()));
        if with_artifacts && !self.artifacts.is_empty() {
            out.insert("artifacts".into(), Value::Object(self.artifacts.clone().into_iter().collect()));
        }
        if let Some((name, message)) = &self.error {
            out.insert("error".into(), serde_json::json!({ "name": name, "message": message }));
        }
        sorted(Value::Object(out))
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self, with_artifacts: bool) -> String {
        render(&self.to_value(with_artifacts))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = match self.status() {
            Status::Affirmative => "AFFIRMATIVE",
            Status::Negative => "NEGATIVE",
            Status::Error => "ERROR",
        };
        match &self.kind {
            Some(kind) => writeln!(s, "{} ({kind}): {status}", self.command),
            None => writeln!(s, "{}: {status}", self.command),
        }
        .unwrap();
        if let Some((_, message)) = &self.error {
            writeln!(s, "  error: {message}").unwrap();
        }
        if !self.verdicts.is_empty() {
            s.push_str("verdicts:\n");
            for (k, v) in &self.verdicts {
                writeln!(s, "  {k}: {v}").unwrap();
            }
        }
        if !self.certificates.is_empty() {
            s.push_str("certificates:\n");
            for (k, v) in &self.certificates {
                writeln!(s, "  {k}: {}", text_value(v)).unwrap();
            }
        }
        if !self.artifacts.is_empty() {
            let names: Vec<&str> = self.artifacts.keys().map(String::as_str).collect();
            writeln!(s, "artifacts (json only): {}", names.join(", ")).unwrap();
        }
        s
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        other => {
            let s = other.to_string();
            if s.len() > 160 {
                format!("{}…", &s[..s.char_indices().nth(157).map_or(s.len(), |(i, _)| i)])
            } else {
                s
            }
        }
    }
}

/// Rebuilds every object with its keys in sorted order.
pub fn sorted(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let entries: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, sorted(v))).collect();
            Value::Object(entries.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

/// Finite values as numbers; `inf`, `-inf`, `nan` as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn vector(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(complex).collect())
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(m.row(i))).collect())
}

/// Pretty JSON with a trailing newline. Arrays without objects inside are
/// kept on one line when they fit in 100 columns.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn has_object(v: &Value) -> bool {
    match v {
        Value::Object(_) => true,
        Value::Array(items) => items.iter().any(has_object),
        _ => false,
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() => {
            let compact = v.to_string();
            if !has_object(v) && compact.len() + 2 * indent <= 100 {
                out.push_str(&compact.replace(',', ", "));
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}
