//! Moment (multi)sequences: Hankel positivity and support radius estimates.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ApplicationError;
use crate::algebra::{block_assemble, hermitian_eig, is_psd, ComplexMatrix, PsdVerdict};

/// Moments `γ_k` on the box `{k ∈ N^d : |k|_∞ ≤ cap}`, `cap` even.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentData {
    dim: usize,
    n: usize,
    cap: usize,
    moments: BTreeMap<Vec<usize>, ComplexMatrix>,
}

fn box_indices(dim: usize, side: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=side).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

impl MomentData {
    pub fn new(dim: usize, moments: BTreeMap<Vec<usize>, ComplexMatrix>) -> Result<Self, ApplicationError> {
        if dim == 0 {
            return Err(ApplicationError::Shape("moment dimension must be positive".into()));
        }
        let n = moments
            .values()
            .next()
            .map(ComplexMatrix::rows)
            .ok_or_else(|| ApplicationError::OddData("no moments".into()))?;
        if moments.values().any(|g| g.shape() != (n, n)) {
            return Err(ApplicationError::Shape("moments differ in shape".into()));
        }
        if let Some(k) = moments.keys().find(|k| k.len() != dim) {
            return Err(ApplicationError::Shape(format!("multi-index {k:?} has wrong length")));
        }
        let cap = moments.keys().flatten().copied().max().unwrap_or(0);
        if cap % 2 != 0 {
            return Err(ApplicationError::OddData(format!(
                "highest degree {cap} per axis is odd; need moments up to an even degree 2N"
            )));
        }
        if let Some(missing) = box_indices(dim, cap).into_iter().find(|k| !moments.contains_key(k)) {
            return Err(ApplicationError::OddData(format!("moment {missing:?} is missing")));
        }
        Ok(Self { dim, n, cap, moments })
    }

    /// `γ_0, …, γ_{2N}` on `N`.
    pub fn from_sequence(values: Vec<ComplexMatrix>) -> Result<Self, ApplicationError> {
        if values.len().is_multiple_of(2) {
            return Err(ApplicationError::OddData(format!(
                "{} moments given; a table γ_0..γ_2N has odd length",
                values.len()
            )));
        }
        Self::new(1, values.into_iter().enumerate().map(|(k, g)| (vec![k], g)).collect())
    }

    pub fn scalar_sequence(values: &[f64]) -> Result<Self, ApplicationError> {
        Self::from_sequence(values.iter().map(|&x| ComplexMatrix::scalar(Complex64::new(x, 0.0))).collect())
    }

    /// Moments `Σ_j w_j x_j^k` of a discrete measure, up to `cap` per axis.
    pub fn from_atoms(atoms: &[(Vec<f64>, f64)], cap: usize) -> Result<Self, ApplicationError> {
        let dim = atoms
            .first()
            .map(|a| a.0.len())
            .ok_or_else(|| ApplicationError::Shape("no atoms".into()))?;
        let moments = box_indices(dim, cap)
            .into_iter()
            .map(|k| {
                let value: f64 = atoms
                    .iter()
                    .map(|(x, w)| w * x.iter().zip(&k).map(|(xi, &ki)| xi.powi(ki as i32)).product::<f64>())
                    .sum();
                (k, ComplexMatrix::scalar(Complex64::new(value, 0.0)))
            })
            .collect();
        Self::new(dim, moments)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N` with moments up to `2N` per axis.
    pub fn window(&self) -> usize {
        self.cap / 2
    }

    pub fn get(&self, k: &[usize]) -> Option<&ComplexMatrix> {
        self.moments.get(k)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &ComplexMatrix)> {
        self.moments.iter()
    }

    /// `[γ_{k+l+shift}]` over `k, l` in the box of side `side`.
    fn gram(&self, side: usize, shift: &[usize]) -> ComplexMatrix {
        let idx = box_indices(self.dim, side);
        let grid: Vec<Vec<ComplexMatrix>> = idx
            .iter()
            .map(|k| {
                idx.iter()
                    .map(|l| {
                        let key: Vec<usize> = (0..self.dim).map(|a| k[a] + l[a] + shift[a]).collect();
                        self.moments[&key].clone()
                    })
                    .collect()
            })
            .collect();
        block_assemble(&grid).expect("uniform blocks")
    }
}

/// `√ λ_max(H⁺ᐟ² H′ H⁺ᐟ²)` on `range H`.
fn shifted_radius(h: &ComplexMatrix, shifted: &ComplexMatrix, tol: f64) -> Result<f64, ApplicationError> {
    let eig = hermitian_eig(&h.hermitian_part())?;
    let kept = eig.kept_indices(tol);
    if kept.is_empty() {
        return Ok(0.0);
    }
    let dim = h.rows();
    let mut b = ComplexMatrix::zeros(dim, kept.len());
    for (col, &k) in kept.iter().enumerate() {
        let inv = 1.0 / eig.values[k].sqrt();
        for i in 0..dim {
            b[(i, col)] = eig.vectors[(i, k)] * inv;
        }
    }
    let reduced = b.adjoint_mul(&shifted.matmul(&b)).hermitian_part();
    Ok(hermitian_eig(&reduced)?.max_value().max(0.0).sqrt())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamburgerReport {
    pub window: usize,
    pub hankel: PsdVerdict,
    pub radius_estimate: f64,
}

/// Hankel positivity `[γ_{i+j}]_{0≤i,j≤N}` and the radius estimate from the
/// shifted Gram `[γ_{i+j+2}]_{0≤i,j<N}`.
pub fn hamburger(data: &MomentData, tol: f64) -> Result<HamburgerReport, ApplicationError> {
    if data.dim() != 1 {
        return Err(ApplicationError::Shape(format!(
            "one-variable moments expected, got dimension {}",
            data.dim()
        )));
    }
    let window = data.window();
    let hankel = is_psd(&data.gram(window, &[0]), tol)?;
    let radius_estimate = if window == 0 {
        0.0
    } else {
        shifted_radius(&data.gram(window - 1, &[0]), &data.gram(window - 1, &[2]), tol)?
    };
    Ok(HamburgerReport {
        window,
        hankel,
        radius_estimate,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiHamburgerReport {
    pub window: usize,
    pub moment_matrix: PsdVerdict,
    /// One estimate per coordinate axis.
    pub radii: Vec<f64>,
}

/// `[γ_{k+l}]_{|k|_∞,|l|_∞ ≤ N}` positivity and per-axis radius estimates.
pub fn multi_hamburger(data: &MomentData, tol: f64) -> Result<MultiHamburgerReport, ApplicationError> {
    let d = data.dim();
    let window = data.window();
    let moment_matrix = is_psd(&data.gram(window, &vec![0; d]), tol)?;
    let radii = (0..d)
        .map(|axis| {
            if window == 0 {
                return Ok(0.0);
            }
            let mut shift = vec![0; d];
            shift[axis] = 2;
            shifted_radius(&data.gram(window - 1, &vec![0; d]), &data.gram(window - 1, &shift), tol)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiHamburgerReport {
        window,
        moment_matrix,
        radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use approx::assert_abs_diff_eq;

    #[test]
    fn point_mass_at_zero() {
        let mut g = vec![0.0; 9];
        g[0] = 1.0;
        let rep = hamburger(&MomentData::scalar_sequence(&g).unwrap(), DEFAULT_TOL).unwrap();
        assert!(rep.hankel.psd);
        assert_abs_diff_eq!(rep.radius_estimate, 0.0);
    }

    #[test]
    fn point_mass_at_one() {
        let rep = hamburger(&MomentData::scalar_sequence(&[1.0; 9]).unwrap(), DEFAULT_TOL).unwrap();
        assert!(rep.hankel.psd);
        assert_abs_diff_eq!(rep.radius_estimate, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn symmetric_pair() {
        let data = MomentData::from_atoms(&[(vec![-1.0], 0.5), (vec![1.0], 0.5)], 8).unwrap();
        assert_eq!(data.get(&[2]).unwrap()[(0, 0)].re, 1.0);
        assert_eq!(data.get(&[3]).unwrap()[(0, 0)].re, 0.0);
        let rep = hamburger(&data, DEFAULT_TOL).unwrap();
        assert!(rep.hankel.psd);
        assert_abs_diff_eq!(rep.radius_estimate, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn even_length_is_odd_data() {
        assert!(matches!(MomentData::scalar_sequence(&[1.0, 0.0]), Err(ApplicationError::OddData(_))));
    }

    #[test]
    fn non_moment_sequence_fails() {
        // γ_2 < γ_1² violates Cauchy-Schwarz
        let rep = hamburger(&MomentData::scalar_sequence(&[1.0, 1.0, 0.5]).unwrap(), DEFAULT_TOL).unwrap();
        assert!(!rep.hankel.psd);
    }

    #[test]
    fn two_variable_examples() {
        let origin = MomentData::from_atoms(&[(vec![0.0, 0.0], 1.0)], 4).unwrap();
        let rep = multi_hamburger(&origin, DEFAULT_TOL).unwrap();
        assert!(rep.moment_matrix.psd);
        assert_eq!(rep.radii, vec![0.0, 0.0]);

        let corner = MomentData::from_atoms(&[(vec![1.0, 1.0], 1.0)], 4).unwrap();
        let rep = multi_hamburger(&corner, DEFAULT_TOL).unwrap();
        assert!(rep.moment_matrix.psd);
        for r in rep.radii {
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-10);
        }

        let cross = MomentData::from_atoms(
            &[
                (vec![1.0, 0.0], 0.25),
                (vec![-1.0, 0.0], 0.25),
                (vec![0.0, 1.0], 0.25),
                (vec![0.0, -1.0], 0.25),
            ],
            4,
        )
        .unwrap();
        let rep = multi_hamburger(&cross, DEFAULT_TOL).unwrap();
        assert!(rep.moment_matrix.psd);
        assert!(rep.radii.iter().all(|&r| r <= 1.0 + DEFAULT_TOL));
    }
}
