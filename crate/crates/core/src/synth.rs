//! Seeded instance generators: representations, factorized kernels and
//! contractions with known dilations.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{op_norm, ComplexMatrix};
use crate::kernel::{AFunction, AKernel};
use crate::semigroup::FiniteStarSemigroup;

/// `K(s, t) = V_s* V_t` with random `V_s` of shape `rank × n`.
pub fn factorized_kernel<R: Rng + ?Sized>(points: usize, n: usize, rank: usize, rng: &mut R) -> AKernel {
    let vs: Vec<ComplexMatrix> = (0..points).map(|_| ComplexMatrix::random(rank, n, rng)).collect();
    AKernel::from_fn((0..points).map(|i| format!("p{i}")).collect(), n, |s, t| vs[s].adjoint_mul(&vs[t]))
        .expect("uniform blocks")
}

/// `ω(j) = V₀* U D^j U* V₀` on `Z_k`, with `D` diagonal of `k`-th roots of unity.
pub fn cyclic_omega<R: Rng + ?Sized>(k: usize, n: usize, dim: usize, rng: &mut R) -> (FiniteStarSemigroup, AFunction) {
    let g = FiniteStarSemigroup::cyclic_group(k).expect("k ≥ 1");
    let u = ComplexMatrix::random_unitary(dim, rng);
    let v0 = ComplexMatrix::random(dim, n, rng);
    let freqs: Vec<usize> = (0..dim).map(|_| rng.random_range(0..k)).collect();
    let values = (0..k)
        .map(|j| {
            let mut d = ComplexMatrix::zeros(dim, dim);
            for (i, f) in freqs.iter().enumerate() {
                d[(i, i)] = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (f * j) as f64 / k as f64);
            }
            v0.adjoint_mul(&u.matmul(&d).matmul(&u.adjoint()).matmul(&v0))
        })
        .collect();
    let omega = AFunction::on_semigroup(&g, values).expect("one value per element");
    (g, omega)
}

/// `ω(s) = V₀* π(s) V₀` on the matrix units with `π(e_ij) = E_ij ⊗ I_mult`, `π(0) = 0`.
pub fn matrix_unit_omega<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    mult: usize,
    rng: &mut R,
) -> (FiniteStarSemigroup, AFunction) {
    let s = FiniteStarSemigroup::matrix_unit_semigroup(m).expect("m ≥ 1");
    let v0 = ComplexMatrix::random(m * mult, n, rng);
    let mut values = vec![ComplexMatrix::zeros(n, n)];
    for i in 0..m {
        for j in 0..m {
            let mut e = ComplexMatrix::zeros(m, m);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let pi = e.kron(&ComplexMatrix::identity(mult));
            values.push(v0.adjoint_mul(&pi.matmul(&v0)));
        }
    }
    let omega = AFunction::on_semigroup(&s, values).expect("one value per element");
    (s, omega)
}

/// Random `d × d` matrix rescaled to operator norm `ρ ∈ (0, 1]`.
pub fn contraction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let x = ComplexMatrix::random(d, d, rng);
    let rho: f64 = rng.random_range(0.05..=1.0);
    x.scale(rho / op_norm(&x))
}
