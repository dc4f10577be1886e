mod common;

use common::*;
use kyfan_core::norms::{self, NormParams};
use kyfan_core::solver::{self, certificate_check, Certificate, ProblemSpec, SolverOptions};
use kyfan_core::{Error, Matrix};
use proptest::prelude::*;

fn spec(a: Matrix, k: usize, theta: f64) -> ProblemSpec {
    ProblemSpec::new(a, NormParams::new(k, theta)).unwrap()
}

#[test]
fn rejects_nonpositive_data() {
    let a = Matrix::from_rows(&[vec![0.0, -1.0], vec![-2.0, 0.0]]).unwrap();
    assert!(matches!(
        ProblemSpec::new(a, NormParams::new(1, 0.1)),
        Err(Error::Infeasible(_))
    ));
    assert!(matches!(Matrix::from_rows(&[vec![f64::NAN]]), Err(Error::NonFinite)));
    assert!(ProblemSpec::new(Matrix::filled(2, 2, 1.0), NormParams::new(3, 0.1)).is_err());
    assert!(ProblemSpec::new(Matrix::filled(2, 2, 1.0), NormParams::new(1, -0.1)).is_err());
}

#[test]
fn scalar_instance() {
    let out = solver::solve(&spec(Matrix::filled(1, 1, 2.5), 1, 0.0), &SolverOptions::default()).unwrap();
    assert!(out.converged);
    assert!((out.objective - 0.4).abs() < 1e-8);
}

#[test]
fn two_block_biclique_is_certified() {
    let a = Matrix::from_fn(4, 4, |i, j| if (i < 2) == (j < 2) { 1.0 } else { 0.0 });
    let s = spec(a.clone(), 2, 0.1);
    let out = solver::solve(&s, &SolverOptions::default()).unwrap();
    assert!(out.converged);
    // Both blocks come back as equal constant blocks, nothing off them.
    let x = out.x.scale(1.0 / out.x.max_entry());
    assert!(max_abs_diff(&x, &a) < 1e-6);
    let cert = Certificate::from_outcome(&s, &out).unwrap();
    let report = certificate_check(&s, &out.x, &cert, 1e-6).unwrap();
    assert!(report.certified, "{report:?}");
}

#[test]
fn kyfan_k_baseline_agrees_at_k_one() {
    let a = random_nonneg(&mut rng(4), 5, 4);
    let s = spec(a, 1, 0.2);
    let o = SolverOptions::default();
    let x = solver::solve(&s, &o).unwrap();
    let y = solver::solve_kyfan_k_baseline(&s, &o).unwrap();
    assert!((x.objective - y.objective).abs() <= 1e-6 * x.objective);
}

#[test]
fn zero_theta_optimum_is_reciprocal_kyfan_norm() {
    let a = random_nonneg(&mut rng(12), 6, 5);
    let out = solver::solve(&spec(a.clone(), 2, 0.0), &SolverOptions::default()).unwrap();
    let expect = 1.0 / norms::kyfan_2k_norm(&a, 2).unwrap();
    assert!((out.objective - expect).abs() <= 1e-6 * expect);
}

#[test]
fn options_deserialize_with_defaults() {
    let o: SolverOptions = serde_json::from_str(r#"{"max_iters": 10}"#).unwrap();
    assert_eq!(o.max_iters, 10);
    assert_eq!(o.opt_tol, SolverOptions::default().opt_tol);
}

#[test]
fn iteration_cap_reports_nonconvergence() {
    let a = random_nonneg(&mut rng(3), 6, 6);
    let o = SolverOptions {
        max_iters: 3,
        ..Default::default()
    };
    let out = solver::solve(&spec(a, 2, 0.5), &o).unwrap();
    assert!(!out.converged);
    assert!(out.iterations <= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn duality_sandwich_and_feasibility(m in 2usize..7, n in 2usize..7, seed in any::<u64>(), t in 0usize..3) {
        let a = random_nonneg(&mut rng(seed), m, n);
        let k = 1 + (seed as usize) % a.min_dim();
        let theta = [0.0, 0.1, 1.0][t];
        let s = spec(a.clone(), k, theta);
        let out = solver::solve(&s, &SolverOptions::default()).unwrap();
        prop_assert!(out.converged);
        prop_assert!(a.inner(&out.x).unwrap() >= 1.0 - 1e-7);
        let lower = if theta == 0.0 {
            1.0 / norms::kyfan_2k_norm(&a, k).unwrap()
        } else {
            1.0 / norms::dual_combined_norm(&a, NormParams::new(k, theta)).unwrap().value
        };
        prop_assert!(out.objective >= lower * (1.0 - 1e-6));
        prop_assert!((out.objective - lower).abs() <= 1e-5 * lower);
    }

    #[test]
    fn scale_equivariance(m in 2usize..6, n in 2usize..6, seed in any::<u64>(), c in 0.2f64..5.0) {
        let a = random_nonneg(&mut rng(seed), m, n);
        let o = SolverOptions::default();
        let base = solver::solve(&spec(a.clone(), 1, 0.3), &o).unwrap();
        let scaled = solver::solve(&spec(a.scale(c), 1, 0.3), &o).unwrap();
        prop_assert!((scaled.objective * c - base.objective).abs() <= 1e-6 * base.objective);
        let diff = scaled.x.scale(c).sub(&base.x).unwrap().frobenius_norm();
        prop_assert!(diff <= 1e-4 * base.x.frobenius_norm());
    }
}
