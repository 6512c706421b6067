//! Built-in problems. The shipped fixtures are these, serialized.

use dilation_core::applications::CpMap;
use dilation_core::num_complex::Complex64;
use dilation_core::semigroup::Family;
use dilation_core::synth::{contraction, cyclic_omega, matrix_unit_omega};
use dilation_core::{AFunction, ComplexMatrix, FiniteStarSemigroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{
    Atom, CpMapSpec, InvariantSpec, KernelSpec, MatrixJson, MomentSpec, OperatorSpec, Payload, PovmBuiltin, PovmSpec,
    Problem, ProblemOptions, SemigroupSpec,
};

pub const NAMES: [&str; 18] = [
    "semigroup-z3",
    "semigroup-broken",
    "kernel-minimal",
    "invariant-z2-x2",
    "invariant-cyclic",
    "invariant-units",
    "invariant-null",
    "invariant-null-bad",
    "cp-random",
    "cp-transpose",
    "povm-trine",
    "povm-incomplete",
    "contraction-random",
    "contraction-large",
    "moments-atoms",
    "moments-bad",
    "subnormal-diagonal",
    "subnormal-jordan",
];

fn scalar(x: f64) -> MatrixJson {
    MatrixJson(vec![vec![[x, 0.0]]])
}

fn real(rows: &[&[f64]]) -> MatrixJson {
    MatrixJson::from_matrix(&ComplexMatrix::from_real(rows))
}

fn on(s: &FiniteStarSemigroup, values: Vec<ComplexMatrix>) -> Payload {
    let omega = AFunction::on_semigroup(s, values).expect("shapes match");
    Payload::Invariant(InvariantSpec::from_omega(s, &omega))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn example(name: &str) -> Option<Problem> {
    let payload = match name {
        "semigroup-z3" => Payload::Semigroup(SemigroupSpec::Builtin(Family::CyclicGroup { k: 3 })),
        "semigroup-broken" => Payload::Semigroup(SemigroupSpec::Table {
            labels: vec!["a".into(), "b".into()],
            mult: vec![vec![1, 0], vec![0, 0]],
            inv: vec![0, 1],
        }),
        "kernel-minimal" => Payload::Kernel(KernelSpec {
            base: vec!["x".into()],
            n: 1,
            blocks: [("x|x".to_string(), scalar(2.0))].into_iter().collect(),
        }),
        "invariant-z2-x2" => {
            let s = FiniteStarSemigroup::builtin(&Family::CyclicGroup { k: 2 }).expect("k ≥ 1");
            let omega = [1.0, 2.0].iter().map(|&x| ComplexMatrix::from_real(&[&[x]])).collect();
            let mut p = on(&s, omega);
            if let Payload::Invariant(inv) = &mut p {
                inv.semigroup = SemigroupSpec::Builtin(Family::CyclicGroup { k: 2 });
            }
            p
        }
        "invariant-cyclic" => {
            let (s, omega) = cyclic_omega(4, 2, 3, &mut rng(11));
            Payload::Invariant(InvariantSpec::from_omega(&s, &omega))
        }
        "invariant-units" => {
            let (s, omega) = matrix_unit_omega(2, 2, 1, &mut rng(12));
            Payload::Invariant(InvariantSpec::from_omega(&s, &omega))
        }
        "invariant-null" => {
            let s = FiniteStarSemigroup::null_semigroup();
            on(&s, vec![ComplexMatrix::identity(1), ComplexMatrix::identity(1)])
        }
        "invariant-null-bad" => {
            let s = FiniteStarSemigroup::null_semigroup();
            on(&s, vec![ComplexMatrix::identity(1), ComplexMatrix::zeros(1, 1)])
        }
        "cp-random" => {
            let map = CpMap::random(2, 2, 2, &mut rng(13));
            Payload::CpMap(CpMapSpec::Action {
                m: 2,
                action: map.action().iter().map(MatrixJson::from_matrix).collect(),
            })
        }
        "cp-transpose" => Payload::CpMap(CpMapSpec::Action {
            m: 2,
            action: CpMap::transpose(2).action().iter().map(MatrixJson::from_matrix).collect(),
        }),
        "povm-trine" => Payload::Povm(PovmSpec::Builtin {
            builtin: PovmBuiltin::Trine,
        }),
        "povm-incomplete" => Payload::Povm(PovmSpec::Effects {
            effects: vec![real(&[&[0.5, 0.0], &[0.0, 0.0]]), real(&[&[0.0, 0.0], &[0.0, 1.0]])],
        }),
        "contraction-random" => Payload::Contraction(OperatorSpec {
            t: MatrixJson::from_matrix(&contraction(3, &mut rng(14))),
        }),
        "contraction-large" => Payload::Contraction(OperatorSpec {
            t: real(&[&[1.0, 1.0], &[0.0, 1.0]]),
        }),
        "moments-atoms" => Payload::Moments(MomentSpec::Atoms {
            atoms: [-1.0, 0.5, 1.0]
                .iter()
                .map(|&x| Atom {
                    point: vec![x],
                    weight: 1.0 / 3.0,
                })
                .collect(),
            cap: 64,
        }),
        "moments-bad" => Payload::Moments(MomentSpec::Sequence {
            sequence: vec![scalar(1.0), scalar(0.0), scalar(-1.0)],
        }),
        "subnormal-diagonal" => {
            let mut t = ComplexMatrix::zeros(2, 2);
            t[(0, 0)] = Complex64::new(0.6, 0.3);
            t[(1, 1)] = Complex64::new(-0.9, 0.0);
            Payload::Subnormality(OperatorSpec {
                t: MatrixJson::from_matrix(&t),
            })
        }
        "subnormal-jordan" => Payload::Subnormality(OperatorSpec {
            t: real(&[&[0.0, 1.0], &[0.0, 0.0]]),
        }),
        _ => return None,
    };
    let options = match name {
        "contraction-random" => ProblemOptions {
            window: Some(8),
            ..Default::default()
        },
        "invariant-cyclic" | "invariant-units" => ProblemOptions {
            seed: Some(7),
            ..Default::default()
        },
        _ => ProblemOptions::default(),
    };
    Some(Problem::new(payload).with_options(options))
}
