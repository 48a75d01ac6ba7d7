// Acceptance suite. Runs without the libtest harness so that the verdict
// line of every criterion is always printed.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mueller_cone::approx::{approx_invertible_mueller, approx_mueller};
use mueller_cone::conespec::{
    birkhoff_report, irreducibility, power_iteration, Irreducibility, DEFAULT_CONVERGENCE_TOL,
};
use mueller_cone::ecm::{build_h, calibrate, vectorize, CalibrationInput, CalibrationOptions};
use mueller_cone::fixtures::{golden_suite, lookup, Fixture};
use mueller_cone::mueller::{g_matrix, is_mueller, necessary_conditions, MuellerVerified, DEFAULT_RESOLUTION};
use mueller_cone::numkernel::{eigen_decompose, spectral_norm, Matrix4, Tolerances, Vector4};
use mueller_cone::stokes::{boundary_seeds, classify, ConeClass, StokesVector};

type Check = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn random_matrix(rng: &mut StdRng, half_width: f64) -> Matrix4 {
    Matrix4::from_fn(|_, _| rng.gen_range(-half_width..half_width))
}

/// Largest singular value from nalgebra's SVD.
fn svd_norm(m: &Matrix4) -> f64 {
    m.singular_values().max()
}

/// Spectral radius from `‖A^(2^k)‖^(1/2^k)` with renormalised squaring.
fn gelfand_radius(a: &Matrix4) -> f64 {
    let mut b = *a;
    let mut log_scale = 0.0;
    let mut power = 1.0;
    for _ in 0..40 {
        let n = b.norm();
        if n == 0.0 {
            return 0.0;
        }
        b /= n;
        log_scale += n.ln() / power;
        b = b * b;
        power *= 2.0;
    }
    let n = b.norm();
    if n == 0.0 {
        return 0.0;
    }
    (log_scale + n.ln() / power).exp()
}

fn verified_fixtures() -> Vec<(Fixture, MuellerVerified)> {
    golden_suite()
        .into_iter()
        .filter_map(|f| {
            let v = MuellerVerified::verify(&f.matrix, DEFAULT_RESOLUTION, &tol()).ok()?;
            Some((f, v))
        })
        .collect()
}

fn golden_classification() -> Check {
    let mut errors = Vec::new();
    let mut total = 0;
    for f in golden_suite() {
        let Some(expected) = f.expected_mueller else { continue };
        total += 1;
        let r = is_mueller(&f.matrix, DEFAULT_RESOLUTION, &tol()).map_err(|e| e.to_string())?;
        if r.verdict != expected {
            errors.push(f.name.clone());
        }
    }
    let neg = lookup("neg-unit").expect("fixture");
    let r = is_mueller(&neg.matrix, DEFAULT_RESOLUTION, &tol()).map_err(|e| e.to_string())?;
    if r.verdict || (r.min_b + 1.0).abs() > 1e-9 {
        errors.push(format!("neg-unit min_b = {}", r.min_b));
    }
    if errors.is_empty() {
        Ok(format!("{total}/{total} fixtures classified, neg-unit min_b = {}", r.min_b))
    } else {
        Err(format!("misclassified: {}", errors.join(", ")))
    }
}

fn exact_shift() -> Check {
    let out = approx_mueller(&(-Matrix4::identity()), DEFAULT_RESOLUTION, &tol())
        .map_err(|e| e.to_string())?
        .output;
    let g = g_matrix();
    if out.iter().zip(g.iter()).all(|(a, b)| a.to_bits() == b.to_bits()) {
        Ok("approx_mueller(-I4) == G bit for bit".into())
    } else {
        Err(format!("got {out}"))
    }
}

fn invertible_mueller_contract() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let mut passed = 0;
    let mut worst_det = f64::INFINITY;
    for _ in 0..200 {
        let a = random_matrix(&mut rng, 10.0);
        let out = approx_invertible_mueller(&a, 201, &tol()).map_err(|e| e.to_string())?.output;
        let det = out.determinant().abs();
        worst_det = worst_det.min(det);
        if is_mueller(&out, 201, &tol()).map_err(|e| e.to_string())?.verdict && det > 1e-18 {
            passed += 1;
        }
    }
    let msg = format!("{passed}/200 pass, smallest |det| = {worst_det:e}");
    if passed == 200 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn transpose_closure() -> Check {
    let fixtures = verified_fixtures();
    let failing: Vec<String> = fixtures
        .iter()
        .filter(|(f, _)| {
            !is_mueller(&f.matrix.transpose(), DEFAULT_RESOLUTION, &tol())
                .map(|r| r.verdict)
                .unwrap_or(false)
        })
        .map(|(f, _)| f.name.clone())
        .collect();
    if failing.is_empty() {
        Ok(format!("{0}/{0} transposes verified", fixtures.len()))
    } else {
        Err(format!("transpose rejected: {}", failing.join(", ")))
    }
}

fn screen_soundness() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let mut violations = 0;
    let mut accepted = 0;
    for k in 0..500 {
        let mut a = random_matrix(&mut rng, 1.0);
        // Half of the draws are pushed towards the Mueller cone so that both
        // verdicts occur.
        if k % 2 == 1 {
            a[(0, 0)] += rng.gen_range(0.0..2.0) * spectral_norm(&a);
        }
        let verdict = is_mueller(&a, 201, &tol()).map_err(|e| e.to_string())?.verdict;
        accepted += verdict as usize;
        if verdict && !necessary_conditions(&a, &tol()).all() {
            violations += 1;
        }
    }
    let msg = format!("{violations} violations on 500 matrices ({accepted} Mueller)");
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn birkhoff_necessity() -> Check {
    let mut errors = Vec::new();
    let fixtures = verified_fixtures();
    for (f, _) in &fixtures {
        let r = birkhoff_report(&f.matrix, &tol()).map_err(|e| e.to_string())?;
        let oracle = gelfand_radius(&f.matrix);
        if (r.rho - oracle).abs() > 1e-8 * oracle.max(1.0) {
            errors.push(format!("{}: rho {} vs {}", f.name, r.rho, oracle));
        }
        let Some(x) = r.perron_vector else {
            errors.push(format!("{}: no rho-eigenvector", f.name));
            continue;
        };
        let residual = (f.matrix * x - x * r.rho).norm();
        if !r.rho_is_eigenvalue || residual > 1e-8 {
            errors.push(format!("{}: residual {residual:e}", f.name));
        }
        if !classify(&StokesVector::from_vector4(&x), &tol()).in_cone() {
            errors.push(format!("{}: eigenvector outside K", f.name));
        }
    }
    let bad = lookup("birkhoff-fail").expect("fixture");
    let r = birkhoff_report(&bad.matrix, &tol()).map_err(|e| e.to_string())?;
    let m = is_mueller(&bad.matrix, DEFAULT_RESOLUTION, &tol()).map_err(|e| e.to_string())?;
    if r.rho_is_eigenvalue || m.verdict {
        errors.push("diag(-2,1,1,1) not rejected".into());
    }
    if errors.is_empty() {
        Ok(format!("{} fixtures satisfy the Birkhoff conditions; diag(-2,1,1,1) rejected", fixtures.len()))
    } else {
        Err(errors.join("; "))
    }
}

fn class_of(m: &Matrix4) -> Result<Irreducibility, String> {
    let v = MuellerVerified::verify(m, DEFAULT_RESOLUTION, &tol()).map_err(|e| e.to_string())?;
    Ok(irreducibility(&v, &tol()).map_err(|e| e.to_string())?.0)
}

fn primitivity_consistency() -> Check {
    let cases = [
        ("E11", Irreducibility::Primitive),
        ("G+2E11", Irreducibility::Primitive),
        ("G", Irreducibility::Neither),
        ("M_rot", Irreducibility::Neither),
        ("M_irr", Irreducibility::Irreducible),
    ];
    let mut errors = Vec::new();
    for (name, expected) in cases {
        let got = class_of(&lookup(name).expect("fixture").matrix)?;
        if got != expected {
            errors.push(format!("{name}: {got:?}, expected {expected:?}"));
        }
    }
    if errors.is_empty() {
        Ok("E11, G+2E11 primitive; G, M_rot not irreducible; M_irr irreducible only".into())
    } else {
        Err(errors.join("; "))
    }
}

fn power_iteration_limit() -> Check {
    let mut subjects = vec![("diag(2,1,1,1)".to_string(), lookup("diag(2,1,1,1)").expect("fixture").matrix)];
    for (f, v) in verified_fixtures() {
        if f.matrix.iter().any(|x| *x != 0.0)
            && irreducibility(&v, &tol()).map_err(|e| e.to_string())?.0 == Irreducibility::Primitive
            && f.name != "diag(2,1,1,1)"
        {
            subjects.push((f.name.clone(), f.matrix));
        }
    }
    let mut errors = Vec::new();
    let mut runs = 0;
    for (name, m) in &subjects {
        for seed in boundary_seeds() {
            runs += 1;
            let t = power_iteration(m, &seed, 200, DEFAULT_CONVERGENCE_TOL, &tol()).map_err(|e| e.to_string())?;
            let ok = t.converged
                && t.limit.is_some_and(|x| {
                    classify(&StokesVector::from_vector4(&x), &tol()) == ConeClass::Interior
                        && (m * x - x * t.rho).norm() <= 1e-8 * t.rho.max(1.0) * x.norm().max(1.0)
                });
            if !ok {
                errors.push(format!("{name} from {:?}", seed.v.as_slice()));
            }
        }
    }
    let g = power_iteration(&g_matrix(), &boundary_seeds()[0], 200, DEFAULT_CONVERGENCE_TOL, &tol())
        .map_err(|e| e.to_string())?;
    if g.converged {
        errors.push("G reported convergence".into());
    }
    if errors.is_empty() {
        Ok(format!("{runs} runs over {} matrices converge to interior eigenvectors; G does not converge", subjects.len()))
    } else {
        Err(errors.join("; "))
    }
}

fn ecm_round_trip() -> Check {
    let m0 = Matrix4::from_diagonal(&Vector4::new(1.0, 0.5, 0.5, 0.5));
    let mut rng = StdRng::seed_from_u64(9);
    let options = CalibrationOptions::default();
    let (mut exact_tight, mut exact_loose, mut noisy_loose) = (0, 0, 0);
    let mut worst = (0.0f64, 0.0f64);
    let mut cases = 0;
    while cases < 20 {
        let w0 = random_matrix(&mut rng, 1.0);
        let s = w0.singular_values();
        if s.max() / s.min() >= 100.0 {
            continue;
        }
        cases += 1;
        let exact = calibrate(&CalibrationInput { m: m0, aw: w0, amw: m0 * w0 }, &options, &tol())
            .map_err(|e| e.to_string())?;
        let e = svd_norm(&(exact.new_m_final - m0));
        exact_tight += (e <= 1e-6) as usize;
        exact_loose += (e <= 1e-3) as usize;
        let noise = Matrix4::from_fn(|_, _| rng.gen_range(-1e-6..1e-6));
        let noisy = calibrate(&CalibrationInput { m: m0, aw: w0, amw: m0 * w0 + noise }, &options, &tol())
            .map_err(|e| e.to_string())?;
        let n = svd_norm(&(noisy.new_m_final - m0));
        noisy_loose += (n <= 1e-3) as usize;
        worst = (worst.0.max(e), worst.1.max(n));
    }
    let msg = format!(
        "exact <= 1e-6: {exact_tight}/20, exact <= 1e-3: {exact_loose}/20, noisy <= 1e-3: {noisy_loose}/20 (worst {:e}, {:e})",
        worst.0, worst.1
    );
    if exact_tight >= 19 && exact_loose == 20 && noisy_loose >= 18 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn h_operator_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = random_matrix(&mut rng, 1.0);
        let b = random_matrix(&mut rng, 1.0);
        let x = random_matrix(&mut rng, 1.0);
        let lhs = build_h(&m, &b) * vectorize(&x);
        let rhs = vectorize(&(m * x - x * b));
        worst = worst.max((lhs - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE));
    }
    let mut spec_err = 0.0f64;
    for _ in 0..10 {
        let d: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let e: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let h = build_h(
            &Matrix4::from_diagonal(&Vector4::from_column_slice(&d)),
            &Matrix4::from_diagonal(&Vector4::from_column_slice(&e)),
        );
        let mut got: Vec<f64> = eigen_decompose(&h, &tol())
            .map_err(|e| e.to_string())?
            .iter()
            .flat_map(|p| std::iter::repeat(p.value.re).take(p.algebraic_multiplicity))
            .collect();
        let mut want: Vec<f64> = d.iter().flat_map(|di| e.iter().map(move |ej| di - ej)).collect();
        if got.len() != 16 {
            return Err(format!("{} eigenvalues returned", got.len()));
        }
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            spec_err = spec_err.max((g - w).abs());
        }
    }
    let msg = format!("matvec relative error {worst:e}, diagonal spectrum error {spec_err:e}");
    if worst <= 1e-10 && spec_err <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn direct_class(s: &StokesVector, zero_tol: f64) -> ConeClass {
    let d = s.a * s.a - s.v.norm_squared();
    if s.a < -zero_tol || d < -zero_tol {
        ConeClass::Outside
    } else if d.abs() <= zero_tol {
        ConeClass::Boundary
    } else {
        ConeClass::Interior
    }
}

fn stokes_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(13);
    let t = tol();
    let mut mismatches = 0;
    for k in 0..100_000 {
        let mut s = StokesVector::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if k % 4 == 0 {
            // Exactly on the boundary up to rounding.
            s.a = s.v.norm();
        }
        if classify(&s, &t) != direct_class(&s, t.zero_tol) {
            mismatches += 1;
        }
    }
    let msg = format!("{} of 100000 agree", 100_000 - mismatches);
    if mismatches == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Van der Corput radical inverse.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points pushed to S³ by the area-preserving map
/// `(√(1−u)·sin 2πv, √(1−u)·cos 2πv, √u·sin 2πw, √u·cos 2πw)`.
fn sphere_points(n: usize) -> Vec<Vector4> {
    let tau = std::f64::consts::TAU;
    (1..=n as u64)
        .map(|i| {
            let (u, v, w) = (radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5));
            let (r1, r2) = ((1.0 - u).sqrt(), u.sqrt());
            Vector4::new(
                r1 * (tau * v).sin(),
                r1 * (tau * v).cos(),
                r2 * (tau * w).sin(),
                r2 * (tau * w).cos(),
            )
        })
        .collect()
}

/// Best sample followed by a compass search on the sphere.
fn brute_force_norm(a: &Matrix4, points: &[Vector4]) -> f64 {
    let f = |x: &Vector4| (a * x).norm();
    let mut best = *points
        .iter()
        .max_by(|x, y| f(x).total_cmp(&f(y)))
        .expect("points");
    let mut value = f(&best);
    let mut step = 0.05;
    while step > 1e-13 {
        let mut improved = false;
        for k in 0..4 {
            for sign in [1.0, -1.0] {
                let mut y = best;
                y[k] += sign * step;
                let y = y.normalize();
                let fy = f(&y);
                if fy > value {
                    best = y;
                    value = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    value
}

fn spectral_norm_oracle() -> Check {
    let points = sphere_points(100_000);
    let mut rng = StdRng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = random_matrix(&mut rng, 5.0);
        worst = worst.max((spectral_norm(&a) - brute_force_norm(&a, &points)).abs());
    }
    let msg = format!("largest deviation {worst:e} over 50 matrices");
    if worst <= 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("golden classification", golden_classification),
        ("exact shift identity", exact_shift),
        ("invertible Mueller contract", invertible_mueller_contract),
        ("transpose closure", transpose_closure),
        ("necessary-condition soundness", screen_soundness),
        ("Birkhoff necessity", birkhoff_necessity),
        ("primitivity consistency", primitivity_consistency),
        ("power-iteration limit", power_iteration_limit),
        ("calibration round trip", ecm_round_trip),
        ("H operator oracle", h_operator_oracle),
        ("Stokes oracle", stokes_oracle),
        ("spectral norm oracle", spectral_norm_oracle),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{elapsed:.2}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}) [{elapsed:.2}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
