//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use dilation_cli::examples::example;
use dilation_cli::{Payload, Problem};
use dilation_core::algebra::{hermitian_eig, op_norm};
use dilation_core::applications::{
    cp_check, hamburger, naimark, stinespring, subnormality_kernel, szn_contraction, CpMap, MomentData, Povm,
};
use dilation_core::dilation::{
    boundedness_report, build_dilation, extend_omega, extension_property, omega_module, representation_checks,
    star_condition, DilationError,
};
use dilation_core::kernel::check_positive_definite;
use dilation_core::num_complex::Complex64;
use dilation_core::synth::{contraction, cyclic_omega, factorized_kernel, matrix_unit_omega};
use dilation_core::{AFunction, AKernel, ComplexMatrix, DilationOptions, Execution, FiniteStarSemigroup, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let a = nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let mut v: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn oracle_eigenvector(m: &ComplexMatrix, which: usize) -> Vec<Complex64> {
    let a = nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    eig.eigenvectors.column(order[which]).iter().copied().collect()
}

fn kernel_from_gram(base: &[String], n: usize, g: &ComplexMatrix) -> AKernel {
    let len = base.len();
    let blocks = (0..len * len)
        .map(|idx| g.submatrix((idx / len) * n, (idx % len) * n, n, n))
        .collect();
    AKernel::new(base.to_vec(), n, blocks).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let points = rng.random_range(1..=6);
        let n = rng.random_range(1..=3);
        let rank = rng.random_range(1..=points * n);
        let k = factorized_kernel(points, n, rank, &mut rng);
        let (k, perturbed) = if case % 2 == 0 {
            (k, false)
        } else {
            // push the smallest eigenvalue to −ε
            let g = k.gram();
            let lambda0 = oracle_eigenvalues(&g)[0];
            let u = ComplexMatrix::column(&oracle_eigenvector(&g, 0));
            let eps = 10f64.powf(rng.random_range(-6.0..0.0));
            let shifted = &g - &u.matmul(&u.adjoint()).scale(lambda0 + eps);
            (kernel_from_gram(k.base(), n, &shifted.hermitian_part()), true)
        };
        let g = k.gram();
        let oracle = oracle_eigenvalues(&g);
        let scale = oracle.last().unwrap().abs().max(1.0);
        let oracle_psd = oracle[0] >= -1e-8 * scale;
        let v = check_positive_definite(&k, DEFAULT_TOL).map_err(|e| format!("case {case}: {e}"))?;
        worst = worst.max((v.min_eigenvalue - oracle[0]).abs() / scale);
        ensure(v.psd == oracle_psd, || format!("case {case}: verdict {} vs oracle λ_min {:e}", v.psd, oracle[0]))?;
        ensure(v.psd != perturbed, || format!("case {case}: perturbed = {perturbed}, psd = {}", v.psd))?;
        ensure((v.min_eigenvalue - oracle[0]).abs() <= 1e-8 * scale, || {
            format!("case {case}: λ_min {:e} vs oracle {:e}", v.min_eigenvalue, oracle[0])
        })?;
    }
    Ok(format!("50 kernels agree with the oracle, max relative λ_min gap {worst:.1e}"))
}

/// Twenty `ω = V₀*π(·)V₀` instances over `Z_k` (k ≤ 6) and matrix units (m ≤ 3).
fn instances() -> Vec<(String, FiniteStarSemigroup, AFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut out = Vec::new();
    for i in 0..10 {
        let k = 1 + i % 6;
        let n = 1 + i % 3;
        let (s, w) = cyclic_omega(k, n, 2 + i % 3, &mut rng);
        out.push((format!("Z_{k}, n = {n}"), s, w));
    }
    for i in 0..10 {
        let m = 1 + i % 3;
        let n = 1 + (i / 3) % 3;
        let (s, w) = matrix_unit_omega(m, n, 1 + i % 2, &mut rng);
        out.push((format!("units m = {m}, n = {n}"), s, w));
    }
    out
}

fn shipped_invariants() -> Vec<(String, FiniteStarSemigroup, AFunction)> {
    ["invariant-cyclic", "invariant-units", "invariant-null", "invariant-null-bad"]
        .iter()
        .map(|name| {
            let p: Problem = example(name).unwrap();
            let Payload::Invariant(inv) = p.payload else { unreachable!() };
            let (s, w) = inv.build().unwrap();
            (name.to_string(), s, w)
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for (name, s, omega) in instances() {
        let t = build_dilation(&s, &omega, &DilationOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        // V*Φ(s)V against ω, recomputed here
        let direct = (0..s.len())
            .map(|x| op_norm(&(&t.v_adjoint.matmul(&t.phi[x].matrix.matmul(&t.v)) - omega.value(x))))
            .fold(0.0, f64::max);
        worst = worst.max(direct).max(t.reconstruction_error);
        ensure(direct <= 1e-8 && t.reconstruction_error <= 1e-8, || {
            format!("{name}: reconstruction error {:e} (direct {direct:e})", t.reconstruction_error)
        })?;
        ensure(t.minimal, || format!("{name}: not minimal"))?;
    }
    Ok(format!("20 instances, max reconstruction error {worst:.1e}, all minimal"))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for (name, s, omega) in instances() {
        let t = build_dilation(&s, &omega, &DilationOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let rep = representation_checks(&s, &omega, &t.module, &t.phi, &[], Execution::default());
        // Φ(s)Φ(t) = Φ(st), Φ(s*) = Φ(s)*, recomputed here
        let mut mult = 0.0f64;
        let mut star = 0.0f64;
        for a in 0..s.len() {
            star = star.max(op_norm(&(&t.phi[s.star(a)].matrix - &t.phi[a].matrix.adjoint())));
            for b in 0..s.len() {
                let prod = t.phi[a].matrix.matmul(&t.phi[b].matrix);
                mult = mult.max(op_norm(&(&t.phi[s.mul(a, b)].matrix - &prod)));
            }
        }
        worst = worst.max(mult).max(star).max(rep.multiplicativity).max(rep.star);
        ensure(mult.max(rep.multiplicativity) <= 1e-8, || format!("{name}: multiplicativity {mult:e}"))?;
        ensure(star.max(rep.star) <= 1e-8, || format!("{name}: star {star:e}"))?;
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let cyclic = instances()
        .into_iter()
        .chain(shipped_invariants())
        .filter(|(_, s, _)| s.is_inverse_semigroup() && s.is_unital() && (0..s.len()).all(|a| s.mul(s.star(a), a) == s.unit().unwrap()));
    let mut count = 0;
    for (name, s, omega) in cyclic {
        let space = omega_module(&s, &omega, DEFAULT_TOL).map_err(|e| format!("{name}: {e}"))?;
        let b = boundedness_report(&s, &omega, &space, &DilationOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        for &c in &b.c_a {
            lo = lo.min(c);
            hi = hi.max(c);
            ensure((c - 1.0).abs() <= 1e-8, || format!("{name}: c_a = {c}"))?;
        }
        count += 1;
    }
    ensure(count >= 10, || format!("only {count} group instances"))?;
    Ok(format!("{count} group instances, c_a ∈ [{lo:.12}, {hi:.12}]"))
}

fn criterion_5() -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut count = 0;
    for (name, s, omega) in instances().into_iter().chain(shipped_invariants()) {
        let space = omega_module(&s, &omega, DEFAULT_TOL).map_err(|e| format!("{name}: {e}"))?;
        let opts = DilationOptions { n_max: 6, ..Default::default() };
        let b = boundedness_report(&s, &omega, &space, &opts).map_err(|e| format!("{name}: {e}"))?;
        for x in 0..s.len() {
            ensure(b.c_b[x] <= b.c_a[x] + 1e-8, || format!("{name}: c_b({x}) = {} > c_a = {}", b.c_b[x], b.c_a[x]))?;
            for y in 0..s.len() {
                let bound = b.c_b[x] * b.c_b[y];
                ensure(b.c_b[s.mul(x, y)] <= bound * (1.0 + 1e-6) + 1e-8, || {
                    format!("{name}: c_b not submultiplicative at ({x}, {y})")
                })?;
            }
        }
        for q in &b.sequences {
            ensure(q.stabilized, || format!("{name}: sequence for {} not stabilized by n = 6", s.label(q.s)))?;
            let gap = (q.limit_estimate - q.prediction).abs();
            worst_gap = worst_gap.max(if q.prediction > 0.0 { gap / q.prediction } else { gap });
            ensure(gap <= 0.05 * q.prediction + 1e-8, || {
                format!("{name}: limit {} vs prediction {}", q.limit_estimate, q.prediction)
            })?;
        }
        count += 1;
    }
    Ok(format!("{count} instances, max relative limit gap {worst_gap:.1e}"))
}

fn criterion_6() -> Outcome {
    let g = FiniteStarSemigroup::cyclic_group(1).unwrap();
    let four = AFunction::on_semigroup(&g, vec![ComplexMatrix::from_real(&[&[4.0]])]).unwrap();
    let c = extension_property(&g, &four, DEFAULT_TOL).map_err(|e| e.to_string())?.c_max;
    ensure((c - 0.25).abs() <= 1e-6, || format!("trivial group c_max = {c}"))?;
    let mut checked = 0;
    let mut sharp = 0;
    for (name, s, omega) in instances().into_iter().chain(shipped_invariants()) {
        let space = omega_module(&s, &omega, DEFAULT_TOL).map_err(|e| format!("{name}: {e}"))?;
        let star = star_condition(&s, &omega, &space, DEFAULT_TOL).map_err(|e| format!("{name}: {e}"))?;
        if !star.holds {
            continue;
        }
        let ext = extension_property(&s, &omega, DEFAULT_TOL).map_err(|e| format!("{name}: {e}"))?;
        let inv = 1.0 / star.norm_sq.unwrap();
        ensure(ext.c_max >= inv - 1e-8, || format!("{name}: c_max {} < 1/‖ω‖² = {inv}", ext.c_max))?;
        checked += 1;
        if s.is_unital() || !ext.c_max.is_finite() {
            continue;
        }
        extend_omega(&s, &omega, ext.c_max, DEFAULT_TOL).map_err(|e| format!("{name}: at c_max: {e}"))?;
        match extend_omega(&s, &omega, 1.01 * ext.c_max, DEFAULT_TOL) {
            Err(DilationError::BadConstant { min_eigenvalue, witness, .. }) => {
                ensure(min_eigenvalue < 0.0 && !witness.is_empty(), || format!("{name}: empty certificate"))?;
            }
            other => return Err(format!("{name}: 1.01·c_max accepted: {:?}", other.map(|_| ()))),
        }
        sharp += 1;
    }
    Ok(format!("c_max(4) = {c}, {checked} (∗)-instances dominate 1/‖ω‖², {sharp} non-unital sharp at c_max"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let m = rng.random_range(1..=3);
        let n = rng.random_range(1..=3);
        let count = rng.random_range(1..=m * n);
        let kraus: Vec<ComplexMatrix> = (0..count).map(|_| ComplexMatrix::random(m, n, &mut rng)).collect();
        let map = CpMap::from_kraus(&kraus).map_err(|e| e.to_string())?;
        let rep = stinespring(&map, &DilationOptions { seed: case, ..Default::default() }).map_err(|e| e.to_string())?;
        // V*Φ(x)V against Σ A_k* x A_k with the generating Kraus operators
        for _ in 0..4 {
            let x = ComplexMatrix::random(m, m, &mut rng);
            let d = rep.triple.dimension();
            let mut phi_x = ComplexMatrix::zeros(d, d);
            for i in 0..m {
                for j in 0..m {
                    phi_x = &phi_x + &rep.triple.phi[1 + i * m + j].matrix.scale_complex(x[(i, j)]);
                }
            }
            let framework = rep.triple.v_adjoint.matmul(&phi_x.matmul(&rep.triple.v));
            let oracle = kraus
                .iter()
                .fold(ComplexMatrix::zeros(n, n), |acc, a| &acc + &a.adjoint_mul(&x.matmul(a)));
            worst = worst.max(op_norm(&(&framework - &oracle)));
        }
        worst = worst.max(rep.route_disagreement);
        ensure(worst <= 1e-7, || format!("case {case}: disagreement {worst:e}"))?;
        let choi_rank = oracle_eigenvalues(&map.choi())
            .iter()
            .filter(|&&l| l > 1e-9 * op_norm(&map.choi()))
            .count();
        ensure(rep.row_block_rank == choi_rank, || {
            format!("case {case}: module rank {} vs Choi rank {choi_rank}", rep.row_block_rank)
        })?;
    }
    for m in [2, 3] {
        let v = cp_check(&CpMap::transpose(m), DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure(!v.completely_positive, || format!("transpose on M_{m} accepted"))?;
        ensure((v.choi_min_eigenvalue + 1.0).abs() <= 1e-9, || {
            format!("transpose on M_{m}: min Choi eigenvalue {}", v.choi_min_eigenvalue)
        })?;
        ensure(stinespring(&CpMap::transpose(m), &DilationOptions::default()).is_err(), || {
            format!("transpose on M_{m} dilated")
        })?;
    }
    Ok(format!("20 maps, max disagreement {worst:.1e}; transpose rejected with λ_min = −1"))
}

fn criterion_8() -> Outcome {
    let povm = Povm::trine();
    let rep = naimark(&povm, &DilationOptions::default()).map_err(|e| e.to_string())?;
    ensure(rep.framework_dimension == 3, || format!("dimension {}", rep.framework_dimension))?;
    let t = &rep.triple;
    let mut proj = 0.0f64;
    let mut comp = 0.0f64;
    for mask in 0..8 {
        let p = &t.phi[mask].matrix;
        proj = proj.max(op_norm(&(&p.matmul(p) - p))).max(op_norm(&(p - &p.adjoint())));
        comp = comp.max(op_norm(&(&t.compress(mask) - &povm.measure(mask))));
    }
    ensure(proj <= 1e-8 && rep.projection_residual <= 1e-8, || format!("projection residual {proj:e}"))?;
    ensure(comp <= 1e-8, || format!("compression residual {comp:e}"))?;
    Ok(format!("dimension 3, projection residual {proj:.1e}, F(Δ) residual {comp:.1e} over 8 subsets"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut unit, mut comp) = (0.0f64, 0.0f64);
    for case in 0..30 {
        let d = rng.random_range(1..=3);
        let t = contraction(d, &mut rng);
        let rep = szn_contraction(&t, 8, DEFAULT_TOL).map_err(|e| format!("case {case}: {e}"))?;
        let u = &rep.unitary;
        let id = ComplexMatrix::identity(u.rows());
        let uu = op_norm(&(&u.adjoint_mul(u) - &id));
        // corner of U^k against T^k, recomputed here
        let mut uk = id.clone();
        let mut tk = ComplexMatrix::identity(d);
        let mut c = 0.0f64;
        for _ in 0..=8 {
            c = c.max(op_norm(&(&uk.submatrix(0, 0, d, d) - &tk)));
            uk = uk.matmul(u);
            tk = tk.matmul(&t);
        }
        unit = unit.max(uu).max(rep.unitarity_error);
        comp = comp.max(c).max(rep.compression_error);
        ensure(unit <= 1e-10, || format!("case {case}: ‖U*U − I‖ = {unit:e}"))?;
        ensure(comp <= 1e-8, || format!("case {case}: compression {comp:e}"))?;
        ensure(rep.window.psd, || format!("case {case}: Toeplitz window not PSD"))?;
    }
    Ok(format!("30 contractions, ‖U*U − I‖ ≤ {unit:.1e}, compression ≤ {comp:.1e}"))
}

fn criterion_10() -> Outcome {
    let atoms: Vec<(Vec<f64>, f64)> = [-1.0, 0.5, 1.0].iter().map(|&x| (vec![x], 1.0 / 3.0)).collect();
    let full = MomentData::from_atoms(&atoms, 64).map_err(|e| e.to_string())?;
    let seq: Vec<ComplexMatrix> = (0..=64).map(|k| full.get(&[k]).unwrap().clone()).collect();
    let mut estimates = Vec::new();
    for n in [4usize, 8, 16, 32] {
        let data = MomentData::from_sequence(seq[..=2 * n].to_vec()).map_err(|e| e.to_string())?;
        let rep = hamburger(&data, DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure(rep.hankel.psd, || format!("N = {n}: Hankel min eigenvalue {:e}", rep.hankel.min_eigenvalue))?;
        estimates.push(rep.radius_estimate);
    }
    let r = *estimates.last().unwrap();
    ensure((0.9..=1.0 + 1e-8).contains(&r), || format!("r_est = {r}"))?;
    // equal exact values differ by rounding only
    ensure(estimates.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0]), || format!("not monotone: {estimates:?}"))?;
    Ok(format!("r_est over N = 4, 8, 16, 32: {estimates:?}"))
}

fn criterion_11() -> Outcome {
    let mut diag = ComplexMatrix::zeros(3, 3);
    diag[(0, 0)] = Complex64::new(0.6, 0.3);
    diag[(1, 1)] = Complex64::new(-0.9, 0.0);
    diag[(2, 2)] = Complex64::new(0.0, 0.4);
    let rep = subnormality_kernel(&diag, 6, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(rep.passes_all(), || "diagonal T failed".into())?;
    let jordan = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let rep = subnormality_kernel(&jordan, 6, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let f = rep.failure.ok_or("Jordan block passed")?;
    ensure(f.window <= 3, || format!("Jordan block failed only at window {}", f.window))?;
    let g = hermitian_eig(&dilation_core::applications::subnormality_window(&jordan, f.window).unwrap().gram())
        .map_err(|e| e.to_string())?;
    ensure(f.certificate.min_eigenvalue < 0.0 && g.values[0] < 0.0, || "no negative certificate".into())?;
    Ok(format!(
        "diagonal passes N ≤ 6; Jordan fails at window {} with λ_min = {:.6}",
        f.window, f.certificate.min_eigenvalue
    ))
}

fn criterion_12() -> Outcome {
    for (command, name, code) in common::CASES {
        let a = common::dilate(&[command, &common::fixture(name), "--format", "json"]);
        let b = common::dilate(&[command, &common::fixture(name), "--format", "json"]);
        ensure(a.status.code() == Some(code), || format!("{command} {name}: exit {:?}", a.status.code()))?;
        ensure(a.stdout == b.stdout, || format!("{command} {name}: reports differ between runs"))?;
        let golden = std::fs::read(common::golden_path(command, name)).map_err(|e| format!("{command} {name}: {e}"))?;
        ensure(a.stdout == golden, || format!("{command} {name}: differs from golden file"))?;
    }
    Ok(format!("{} golden cases over 11 commands, byte-identical reruns", common::CASES.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("PD-equivalence", criterion_1),
        ("dilation reconstruction", criterion_2),
        ("*-representation residuals", criterion_3),
        ("group boundedness", criterion_4),
        ("condition-chain consistency", criterion_5),
        ("extension property", criterion_6),
        ("Stinespring cross-validation", criterion_7),
        ("Naimark", criterion_8),
        ("contraction", criterion_9),
        ("moments", criterion_10),
        ("subnormality", criterion_11),
        ("CLI golden files and determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
