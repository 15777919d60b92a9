use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slm_core::linalg::Matrix;
use slm_core::solver::{kkt_residual, solve, solve_path, QuadProblem, SolverOptions};

fn to_matrix(m: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Matrix::from_rows(&refs).unwrap()
}

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

/// Proximal gradient on `bᵀΩb − 2aᵀb + λ|b|₁` with step `1/(2 λ_max(Ω))`.
fn ista(omega: &DMatrix<f64>, a: &DVector<f64>, lambda: f64, iters: usize) -> DVector<f64> {
    let top = SymmetricEigen::new(omega.clone()).eigenvalues.max();
    let step = 1.0 / (2.0 * top);
    let mut b = DVector::zeros(a.len());
    for _ in 0..iters {
        let grad = 2.0 * (omega * &b - a);
        let next = (&b - step * grad).map(|x| soft(x, lambda * step));
        let done = (&next - &b).amax() < 1e-16;
        b = next;
        if done {
            break;
        }
    }
    b
}

fn random_instance(rng: &mut ChaCha8Rng, p: usize) -> (DMatrix<f64>, DVector<f64>, f64) {
    let m = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    let omega = m.transpose() * m + DMatrix::identity(p, p) * 0.2;
    let a = DVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0));
    let lambda = rng.random_range(0.0..1.0) * 2.0 * a.amax();
    (omega, a, lambda)
}

fn objective(omega: &DMatrix<f64>, a: &DVector<f64>, lambda: f64, b: &DVector<f64>) -> f64 {
    (b.transpose() * omega * b)[(0, 0)] - 2.0 * a.dot(b) + lambda * b.lp_norm(1)
}

#[test]
fn small_instances_match_the_proximal_gradient_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..60 {
        let p = 1 + trial % 3;
        let (omega, a, lambda) = random_instance(&mut rng, p);
        let pr = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), lambda).unwrap();
        let opts = SolverOptions {
            tol: 1e-12,
            ..SolverOptions::default()
        };
        let s = solve(&pr, &opts).unwrap();
        let oracle = ista(&omega, &a, lambda, 1_000_000);
        let b = DVector::from_vec(s.b.clone());
        assert!((&b - &oracle).amax() < 1e-6, "trial {trial}: {b} vs {oracle}");
        let gap = objective(&omega, &a, lambda, &b) - objective(&omega, &a, lambda, &oracle);
        assert!(gap.abs() < 1e-9, "trial {trial}: objective gap {gap}");
        assert!(s.kkt_residual <= 1e-6);
    }
}

#[test]
fn pinned_two_by_two_instance() {
    let omega = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
    let a = DVector::from_vec(vec![1.0, 0.0]);
    let pr = QuadProblem::new(to_matrix(&omega), vec![1.0, 0.0], 0.3).unwrap();
    let s = solve(&pr, &SolverOptions::default()).unwrap();
    let oracle = ista(&omega, &a, 0.3, 1_000_000);
    // signs (+, −): Ωb = a − 0.15·(1, −1) = (0.85, 0.15)
    let exact = [0.775 / 0.75, -0.275 / 0.75];
    for j in 0..2 {
        assert!((oracle[j] - exact[j]).abs() < 1e-9);
        assert!((s.b[j] - oracle[j]).abs() < 1e-6);
    }
}

#[test]
fn unpenalized_solve_is_the_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (omega, a, _) = random_instance(&mut rng, 4);
        let direct = omega.clone().cholesky().unwrap().solve(&a);
        let pr = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), 0.0).unwrap();
        let opts = SolverOptions {
            tol: 1e-13,
            max_iter: 1_000_000,
            ..SolverOptions::default()
        };
        let s = solve(&pr, &opts).unwrap();
        for (x, y) in s.b.iter().zip(direct.iter()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

/// Ω with an `s × s` leading block, cross block `C` and `‖C Ω_SS⁻¹‖_∞ ≤ 1/2`;
/// `a = Ω b* + ε` with `|b*ⱼ| = 1` on the leading block.
fn irrepresentable_instance(rng: &mut ChaCha8Rng, p: usize, s: usize) -> (DMatrix<f64>, DVector<f64>, Vec<usize>) {
    loop {
        let mut omega = DMatrix::<f64>::identity(p, p);
        for i in 0..p {
            for j in 0..i {
                let same = (i < s) == (j < s);
                let v = if same {
                    0.3_f64.powi((i - j) as i32)
                } else {
                    rng.random_range(-0.08..0.08)
                };
                omega[(i, j)] = v;
                omega[(j, i)] = v;
            }
        }
        let ss = omega.view((0, 0), (s, s)).into_owned();
        let cs = omega.view((s, 0), (p - s, s)).into_owned();
        let irrep = (cs * ss.try_inverse().unwrap()).abs().row_sum().max();
        if irrep > 0.5 || SymmetricEigen::new(omega.clone()).eigenvalues.min() < 0.1 {
            continue;
        }
        let mut b_star = DVector::zeros(p);
        for j in 0..s {
            b_star[j] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        let noise = DVector::from_fn(p, |_, _| rng.random_range(-0.03..0.03));
        let a = &omega * b_star + noise;
        return (omega, a, (0..s).collect());
    }
}

#[test]
fn irrepresentable_instances_recover_the_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut hits = 0;
    for _ in 0..100 {
        let (omega, a, support) = irrepresentable_instance(&mut rng, 12, 3);
        let pr = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), 0.5).unwrap();
        let s = solve(&pr, &SolverOptions::default()).unwrap();
        if s.active_set == support {
            hits += 1;
        }
    }
    assert!(hits >= 95, "exact recovery on {hits}/100");
}

#[test]
fn path_matches_independent_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (omega, a, _) = random_instance(&mut rng, 5);
    let base = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), 0.0).unwrap();
    let top = base.lambda_max();
    let lambdas: Vec<f64> = (0..6).map(|k| top * 0.5f64.powi(k)).collect();
    let opts = SolverOptions {
        tol: 1e-12,
        ..SolverOptions::default()
    };
    let path: Vec<_> = solve_path(&base, &lambdas, &opts)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    for (sol, &l) in path.iter().zip(&lambdas) {
        let single = solve(&base.with_lambda(l).unwrap(), &opts).unwrap();
        for (x, y) in sol.b.iter().zip(&single.b) {
            assert!((x - y).abs() < 1e-9);
        }
    }
    assert!(path[0].active_set.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_the_problem_leaves_the_solution(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (omega, a, lambda) = random_instance(&mut rng, 4);
        let opts = SolverOptions { tol: 1e-12, ..SolverOptions::default() };
        let pr = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), lambda).unwrap();
        let scaled = QuadProblem::new(to_matrix(&(omega * c)), a.iter().map(|x| c * x).collect(), c * lambda).unwrap();
        let s1 = solve(&pr, &opts).unwrap();
        let s2 = solve(&scaled, &opts).unwrap();
        for (x, y) in s1.b.iter().zip(&s2.b) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn objective_never_increases_over_sweeps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (omega, a, lambda) = random_instance(&mut rng, 5);
        let pr = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), lambda).unwrap();
        // one sweep at a time, each restarted from the previous iterate
        let mut b = vec![0.0; 5];
        let mut last = pr.objective(&b).unwrap();
        for _ in 0..30 {
            // a huge tolerance stops after exactly one sweep
            let opts = SolverOptions { tol: f64::MAX, max_iter: 1, warm_start: Some(b.clone()) };
            b = solve(&pr, &opts).unwrap().b;
            let now = pr.objective(&b).unwrap();
            prop_assert!(now <= last + 1e-12);
            last = now;
        }
    }

    #[test]
    fn solutions_satisfy_kkt(seed in any::<u64>(), p in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (omega, a, lambda) = random_instance(&mut rng, p);
        let pr = QuadProblem::new(to_matrix(&omega), a.iter().copied().collect(), lambda).unwrap();
        let s = solve(&pr, &SolverOptions::default()).unwrap();
        prop_assert!(kkt_residual(&pr, &s.b).unwrap() <= 1e-6);
        let active: Vec<usize> = (0..p).filter(|&j| s.b[j] != 0.0).collect();
        prop_assert_eq!(active, s.active_set);
    }
}
