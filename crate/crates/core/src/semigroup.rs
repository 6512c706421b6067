//! Finite *-semigroups as explicit multiplication and involution tables.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unvalidated tables as they come from a file or a constructor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSemigroup {
    pub labels: Vec<String>,
    /// Row-major `|S| × |S|` table, `mult[a * |S| + b] = a·b`.
    pub mult: Vec<usize>,
    pub inv: Vec<usize>,
}

/// A single failed axiom, with the offending indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// `(a·b)·c ≠ a·(b·c)`
    NotAssociative { a: usize, b: usize, c: usize },
    /// `a** ≠ a`
    NotInvolutive { a: usize },
    /// `(a·b)* ≠ b*·a*`
    NotAntiHomomorphism { a: usize, b: usize },
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::NotAssociative { .. } => "NotAssociative",
            Violation::NotInvolutive { .. } => "NotInvolutive",
            Violation::NotAntiHomomorphism { .. } => "NotAntiHomomorphism",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotAssociative { a, b, c } => write!(f, "NotAssociative({a}, {b}, {c})"),
            Violation::NotInvolutive { a } => write!(f, "NotInvolutive({a})"),
            Violation::NotAntiHomomorphism { a, b } => write!(f, "NotAntiHomomorphism({a}, {b})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("{}: {} violation(s), first {}", .0[0].name(), .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("TableShape: {0}")]
    TableShape(String),
    #[error("BadParams: {0}")]
    BadParams(String),
}

impl SemigroupError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            SemigroupError::Invalid(v) => v,
            _ => &[],
        }
    }
}

/// Validated finite *-semigroup. Elements are the indices `0..len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteStarSemigroup {
    labels: Vec<String>,
    mult: Vec<usize>,
    inv: Vec<usize>,
    unit: Option<usize>,
}

/// Built-in families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `Z_k` with `s* = s^{-1}`; element `j` is `g^j`.
    CyclicGroup { k: usize },
    /// Power set of `{1..m}` under intersection, identity involution, unit `Ω`.
    /// Element `j` is the subset whose bitmask is `j`.
    IntersectionSemigroup { m: usize },
    /// `{0} ∪ {e_ij}`: index 0 is zero, `e_ij` sits at `1 + i·m + j`.
    MatrixUnitSemigroup { m: usize },
    /// `{z, a}` with every product equal to `z`, identity involution.
    NullSemigroup,
}

impl FiniteStarSemigroup {
    /// Check every axiom and report all violations.
    pub fn validate(raw: RawSemigroup) -> Result<Self, SemigroupError> {
        let n = raw.labels.len();
        if n == 0 {
            return Err(SemigroupError::TableShape("empty element set".into()));
        }
        if raw.mult.len() != n * n {
            return Err(SemigroupError::TableShape(format!(
                "mult has {} entries, expected {}",
                raw.mult.len(),
                n * n
            )));
        }
        if raw.inv.len() != n {
            return Err(SemigroupError::TableShape(format!(
                "inv has {} entries, expected {n}",
                raw.inv.len()
            )));
        }
        if let Some(bad) = raw.mult.iter().chain(&raw.inv).find(|&&x| x >= n) {
            return Err(SemigroupError::TableShape(format!("index {bad} out of range")));
        }

        let mul = |a: usize, b: usize| raw.mult[a * n + b];
        let mut violations = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        violations.push(Violation::NotAssociative { a, b, c });
                    }
                }
            }
        }
        for a in 0..n {
            if raw.inv[raw.inv[a]] != a {
                violations.push(Violation::NotInvolutive { a });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if raw.inv[mul(a, b)] != mul(raw.inv[b], raw.inv[a]) {
                    violations.push(Violation::NotAntiHomomorphism { a, b });
                }
            }
        }
        if !violations.is_empty() {
            return Err(SemigroupError::Invalid(violations));
        }

        // a two-sided identity is unique when it exists
        let unit = (0..n).find(|&u| (0..n).all(|a| mul(u, a) == a && mul(a, u) == a));
        Ok(Self {
            labels: raw.labels,
            mult: raw.mult,
            inv: raw.inv,
            unit,
        })
    }

    pub fn builtin(family: &Family) -> Result<Self, SemigroupError> {
        let raw = match *family {
            Family::CyclicGroup { k } => {
                if k == 0 {
                    return Err(SemigroupError::BadParams("cyclic_group needs k >= 1".into()));
                }
                RawSemigroup {
                    labels: (0..k).map(|j| format!("g^{j}")).collect(),
                    mult: (0..k * k).map(|x| (x / k + x % k) % k).collect(),
                    inv: (0..k).map(|j| (k - j) % k).collect(),
                }
            }
            Family::IntersectionSemigroup { m } => {
                if m == 0 || m > 16 {
                    return Err(SemigroupError::BadParams(
                        "intersection_semigroup needs 1 <= m <= 16".into(),
                    ));
                }
                let size = 1usize << m;
                RawSemigroup {
                    labels: (0..size).map(|mask| subset_label(mask, m)).collect(),
                    mult: (0..size * size).map(|x| (x / size) & (x % size)).collect(),
                    inv: (0..size).collect(),
                }
            }
            Family::MatrixUnitSemigroup { m } => {
                if m == 0 {
                    return Err(SemigroupError::BadParams("matrix_unit_semigroup needs m >= 1".into()));
                }
                let size = 1 + m * m;
                let unit_index = |i: usize, j: usize| 1 + i * m + j;
                let mut labels = vec!["0".to_string()];
                let mut inv = vec![0];
                for i in 0..m {
                    for j in 0..m {
                        labels.push(format!("e{}{}", i + 1, j + 1));
                        inv.push(unit_index(j, i));
                    }
                }
                let mut mult = vec![0; size * size];
                for i in 0..m {
                    for j in 0..m {
                        for l in 0..m {
                            // e_ij · e_jl = e_il, every other product is 0
                            mult[unit_index(i, j) * size + unit_index(j, l)] = unit_index(i, l);
                        }
                    }
                }
                RawSemigroup { labels, mult, inv }
            }
            Family::NullSemigroup => RawSemigroup {
                labels: vec!["z".into(), "a".into()],
                mult: vec![0; 4],
                inv: vec![0, 1],
            },
        };
        Self::validate(raw)
    }

    pub fn cyclic_group(k: usize) -> Result<Self, SemigroupError> {
        Self::builtin(&Family::CyclicGroup { k })
    }

    pub fn intersection_semigroup(m: usize) -> Result<Self, SemigroupError> {
        Self::builtin(&Family::IntersectionSemigroup { m })
    }

    pub fn matrix_unit_semigroup(m: usize) -> Result<Self, SemigroupError> {
        Self::builtin(&Family::MatrixUnitSemigroup { m })
    }

    pub fn null_semigroup() -> Self {
        Self::builtin(&Family::NullSemigroup).expect("null semigroup is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.len() + b]
    }

    #[inline]
    pub fn star(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    /// `a^k` for `k ≥ 1`.
    pub fn pow(&self, a: usize, k: usize) -> usize {
        assert!(k >= 1, "pow needs k >= 1");
        let mut acc = a;
        for _ in 1..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn to_raw(&self) -> RawSemigroup {
        RawSemigroup {
            labels: self.labels.clone(),
            mult: self.mult.clone(),
            inv: self.inv.clone(),
        }
    }

    /// `S⁺`: `S` itself when unital, otherwise `S` with a fresh unit `1` appended last.
    pub fn unitize(&self) -> Self {
        if self.unit.is_some() {
            return self.clone();
        }
        let n = self.len();
        let m = n + 1;
        let mut labels = self.labels.clone();
        let mut fresh = String::from("1");
        while labels.contains(&fresh) {
            fresh.push('\'');
        }
        labels.push(fresh);
        let mut mult = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                mult[a * m + b] = match (a == n, b == n) {
                    (true, _) => b,
                    (false, true) => a,
                    (false, false) => self.mul(a, b),
                };
            }
        }
        let mut inv = self.inv.clone();
        inv.push(n);
        Self {
            labels,
            mult,
            inv,
            unit: Some(n),
        }
    }

    /// Every `s` satisfies `s s* s = s`, `s* s s* = s*`, and `s*` is the only such element.
    pub fn is_inverse_semigroup(&self) -> bool {
        let n = self.len();
        let is_inverse_pair =
            |s: usize, x: usize| self.mul(self.mul(s, x), s) == s && self.mul(self.mul(x, s), x) == x;
        (0..n).all(|s| {
            let st = self.star(s);
            is_inverse_pair(s, st) && (0..n).all(|x| x == st || !is_inverse_pair(s, x))
        })
    }
}

fn subset_label(mask: usize, m: usize) -> String {
    if mask == 0 {
        return "{}".into();
    }
    let items: Vec<String> = (0..m)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}
