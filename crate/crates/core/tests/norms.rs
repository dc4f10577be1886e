mod common;

use common::*;
use kyfan_core::norms::{self, gauge, NormParams};
use kyfan_core::solver::prox;
use kyfan_core::{svd, Matrix};
use proptest::prelude::*;

fn arb_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(m, n, s)| random_matrix(&mut rng(s), m, n))
}

fn arb_pair(max: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(m, n, s)| {
        let mut r = rng(s);
        (random_matrix(&mut r, m, n), random_matrix(&mut r, m, n))
    })
}

#[test]
fn svd_of_random_5x4_matches_eigen_of_gram() {
    let a = random_matrix(&mut rng(54), 5, 4);
    let f = svd(&a).unwrap();
    assert!(f.reconstruct().sub(&a).unwrap().frobenius_norm() <= 1e-8);
    let gram = to_na(&a).transpose() * to_na(&a);
    let mut eig: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    for (s, e) in f.s.iter().zip(&eig) {
        assert!((s - e).abs() <= 1e-8, "{s} vs {e}");
    }
}

#[test]
fn elementary_examples() {
    assert_eq!(Matrix::filled(2, 2, 1.0).l1_norm(), 4.0);
    assert_eq!(Matrix::identity(2).inner(&Matrix::identity(2)).unwrap(), 2.0);
    let m = Matrix::from_rows(&[vec![1.0, -3.0], vec![2.0, 0.0]]).unwrap();
    assert_eq!(m.linf_norm(), 3.0);
}

#[test]
fn gauge_examples() {
    assert!((gauge::gauge_2k(&[3.0, -4.0, 1.0], 2).unwrap() - 5.0).abs() < 1e-15);
    assert!((gauge::gauge_2k(&[1.0; 4], 4).unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(gauge::gauge_2k(&[2.0, 0.0, 0.0], 1).unwrap(), 2.0);
}

#[test]
fn dual_gauge_reductions() {
    let x = [0.3, -1.2, 2.0, 0.5, -0.1];
    let l1: f64 = x.iter().map(|v: &f64| v.abs()).sum();
    let l2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((gauge::dual_gauge_2k(&x, 1).unwrap() - l1).abs() < 1e-12);
    assert!((gauge::dual_gauge_2k(&x, 5).unwrap() - l2).abs() < 1e-12);
    for k in 1..=4 {
        let v = gauge::dual_gauge_2k(&[1.0, 1.0, 0.0, 0.0], k).unwrap();
        assert!((v - dual_gauge_oracle(&[1.0, 1.0, 0.0, 0.0], k)).abs() < 1e-6, "k = {k}");
    }
}

#[test]
fn matrix_norm_examples() {
    let d = Matrix::from_diag(&[3.0, 2.0, 1.0]);
    assert!((norms::kyfan_2k_norm(&d, 2).unwrap() - 13f64.sqrt()).abs() < 1e-12);
    assert!((norms::kyfan_k_norm(&d, 2).unwrap() - 5.0).abs() < 1e-12);
    let a = random_matrix(&mut rng(65), 6, 5);
    let s = na_singular_values(&a);
    let expect = gauge::gauge_2k(&s, 3).unwrap();
    assert!((norms::kyfan_2k_norm(&a, 3).unwrap() - expect).abs() < 1e-10);
    assert!((norms::kyfan_2k_norm(&a, 1).unwrap() - s[0]).abs() < 1e-10);
    let nuclear: f64 = s.iter().sum();
    assert!((norms::dual_2k_norm(&a, 1).unwrap() - nuclear).abs() < 1e-10);
    assert!((norms::kyfan_k_norm(&a, 1).unwrap() - s[0]).abs() < 1e-10);
}

#[test]
fn dual_kyfan_k_on_random_4x4() {
    // The unit ball of the Ky Fan k-norm has extreme points u vᵀ and
    // U_k V_kᵀ / k; the dual norm is the larger of the two pairings.
    let a = random_matrix(&mut rng(44), 4, 4);
    let s = na_singular_values(&a);
    let expect = s[0].max(s.iter().sum::<f64>() / 2.0);
    assert!((norms::dual_kyfan_k_norm(&a, 2).unwrap() - expect).abs() < 1e-6);
}

#[test]
fn rank_one_dual_norm() {
    let u = [1.0, -2.0, 0.5];
    let v = [3.0, 1.0];
    let a = Matrix::from_fn(3, 2, |i, j| u[i] * v[j]);
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for k in 1..=2 {
        assert!((norms::dual_2k_norm(&a, k).unwrap() - nu * nv).abs() < 1e-10);
    }
}

#[test]
fn combined_norm_examples() {
    let x = Matrix::identity(2);
    assert!((norms::combined_norm(&x, NormParams::new(1, 0.5)).unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(norms::combined_norm(&Matrix::zeros(2, 2), NormParams::new(1, 0.5)).unwrap(), 0.0);
    let a = random_matrix(&mut rng(2), 3, 3);
    let c0 = norms::combined_norm(&a, NormParams::new(2, 0.0)).unwrap();
    assert!((c0 - norms::dual_2k_norm(&a, 2).unwrap()).abs() < 1e-12);
}

#[test]
fn dual_combined_of_identity() {
    // Off-diagonal mass in Y would have to be cancelled by Z, so Y = cI and
    // the split balances at c = 1/2.
    let d = norms::dual_combined_norm(&Matrix::identity(2), NormParams::new(1, 1.0)).unwrap();
    assert!((d.value - 0.5).abs() < 1e-5, "{}", d.value);
}

#[test]
fn dual_combined_with_tiny_entries() {
    let a = Matrix::from_fn(3, 3, |i, j| 1e-3 * (1 + i + j) as f64);
    let params = NormParams::new(1, 10.0);
    let d = norms::dual_combined_norm(&a, params).unwrap();
    let z_only = a.linf_norm() / 10.0;
    let y_only = norms::kyfan_2k_norm(&a, 1).unwrap();
    assert!(d.value <= z_only.min(y_only) + 1e-12);
}

#[test]
fn ball_projection_examples() {
    let inside = [0.1, -0.2, 0.3];
    assert_eq!(gauge::project_gauge2k_ball(&inside, 2).unwrap(), inside.to_vec());
    let x = [3.0, -4.0, 1.0];
    let full = gauge::project_gauge2k_ball(&x, 3).unwrap();
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (p, v) in full.iter().zip(&x) {
        assert!((p - v / n).abs() < 1e-12);
    }
    let p = gauge::project_gauge2k_ball(&[3.0, 1.0, 0.5], 2).unwrap();
    let o = gauge_ball_projection_oracle(&[3.0, 1.0, 0.5], 2);
    for (a, b) in p.iter().zip(&o) {
        assert!((a - b).abs() < 1e-6, "{p:?} vs {o:?}");
    }
}

#[test]
fn prox_l1_examples() {
    let x = Matrix::from_rows(&[vec![2.0, -0.5]]).unwrap();
    assert_eq!(prox::prox_l1(&x, 1.0).unwrap(), Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap());
    assert_eq!(prox::prox_l1(&x, 0.0).unwrap(), x);
    let r = random_matrix(&mut rng(8), 4, 3).scale(3.0);
    let step = 0.7;
    let p = prox::prox_l1(&r, step).unwrap();
    for (pv, xv) in p.as_slice().iter().zip(r.as_slice()) {
        // 0 ∈ (p − x)/step + ∂|p|
        let g = (pv - xv) / step;
        if *pv == 0.0 {
            assert!(g.abs() <= 1.0 + 1e-12);
        } else {
            assert!((g + pv.signum()).abs() < 1e-12);
        }
    }
}

#[test]
fn prox_dual_2k_examples() {
    // Small inputs are annihilated by a large step.
    let small = random_matrix(&mut rng(1), 3, 3).scale(1e-3);
    assert!(prox::prox_dual_2k(&small, 10.0, 2).unwrap().frobenius_norm() < 1e-12);

    // k = 1 is singular value soft-thresholding.
    let a = random_matrix(&mut rng(3), 4, 3);
    let t = 0.3;
    let p = prox::prox_dual_2k(&a, t, 1).unwrap();
    let expect: Vec<f64> = na_singular_values(&a).iter().map(|s| (s - t).max(0.0)).collect();
    let got = na_singular_values(&p);
    for (g, e) in got.iter().zip(&expect) {
        assert!((g - e).abs() < 1e-9);
    }

    // Moreau: prox_{t‖·‖}(X) + t·P(X/t) = X, with P the projection onto the
    // Ky Fan 2-k unit ball.
    let x = random_matrix(&mut rng(5), 5, 4);
    let t = 0.7;
    let p = prox::prox_dual_2k(&x, t, 2).unwrap();
    let f = svd(&x.scale(1.0 / t)).unwrap();
    let proj = gauge::project_gauge2k_ball(&f.s, 2).unwrap();
    let back = p.add(&f.compose(&proj).scale(t)).unwrap();
    assert!(max_abs_diff(&back, &x) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs_and_matches_nalgebra(a in arb_matrix(30)) {
        let f = svd(&a).unwrap();
        let err = f.reconstruct().sub(&a).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-8 * a.frobenius_norm().max(1.0));
        for (s, t) in f.s.iter().zip(na_singular_values(&a)) {
            prop_assert!((s - t).abs() <= 1e-8 * t.max(1.0));
        }
    }

    #[test]
    fn inner_bounded_by_spectral_times_nuclear((a, x) in arb_pair(10)) {
        let s1 = na_singular_values(&a)[0];
        let nuc: f64 = na_singular_values(&x).iter().sum();
        prop_assert!(a.inner(&x).unwrap() <= s1 * nuc + 1e-10);
    }

    #[test]
    fn generalized_cauchy_schwarz((a, x) in arb_pair(10)) {
        let ip = a.inner(&x).unwrap();
        for k in 1..=a.min_dim() {
            let bound = norms::dual_2k_norm(&a, k).unwrap() * norms::kyfan_2k_norm(&x, k).unwrap();
            prop_assert!(ip <= bound + 1e-8);
        }
    }

    #[test]
    fn kyfan_monotone_in_k(a in arb_matrix(10)) {
        let mut prev = 0.0;
        for k in 1..=a.min_dim() {
            let v = norms::kyfan_2k_norm(&a, k).unwrap();
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
        prop_assert!((prev - a.frobenius_norm()).abs() <= 1e-10 * prev.max(1.0));
    }

    #[test]
    fn bi_duality_witness(a in arb_matrix(8), kk in 1usize..8) {
        // The truncated SVD direction attains the generalized Cauchy-Schwarz
        // bound, so it maximizes ⟨A, Y⟩ over the dual unit ball.
        let k = kk.min(a.min_dim());
        let f = svd(&a).unwrap();
        let mut d = f.s.clone();
        d.iter_mut().skip(k).for_each(|v| *v = 0.0);
        let y = f.compose(&d);
        let ny = norms::dual_2k_norm(&y, k).unwrap();
        let val = a.inner(&y).unwrap() / ny;
        prop_assert!((val - norms::kyfan_2k_norm(&a, k).unwrap()).abs() <= 1e-5);
    }

    #[test]
    fn combined_norm_axioms((a, b) in arb_pair(8), c in -3.0f64..3.0, theta in 0.0f64..2.0) {
        let k = 1 + (a.rows() + a.cols()) % a.min_dim();
        let p = NormParams::new(k.min(a.min_dim()), theta);
        let na = norms::combined_norm(&a, p).unwrap();
        let nb = norms::combined_norm(&b, p).unwrap();
        let nab = norms::combined_norm(&a.add(&b).unwrap(), p).unwrap();
        prop_assert!(nab <= na + nb + 1e-8);
        let nc = norms::combined_norm(&a.scale(c), p).unwrap();
        prop_assert!((nc - c.abs() * na).abs() <= 1e-10 * na.max(1.0));
        prop_assert!(na > 0.0);
    }

    #[test]
    fn dual_combined_below_one_sided_splits(a in arb_matrix(6), theta in 0.05f64..3.0) {
        let k = 1 + a.cols() % a.min_dim();
        let p = NormParams::new(k, theta);
        let d = norms::dual_combined_norm(&a, p).unwrap();
        let y_side = norms::kyfan_2k_norm(&a, k).unwrap();
        let z_side = a.linf_norm() / theta;
        prop_assert!(d.value <= y_side.min(z_side) + 1e-9);
        prop_assert!(d.value >= 0.0);
    }

    #[test]
    fn dual_gauge_matches_oracle(seed in any::<u64>(), len in 1usize..8) {
        let mut r = rng(seed);
        let x: Vec<f64> = (0..len).map(|_| rand::Rng::gen_range(&mut r, -2.0..2.0)).collect();
        for k in 1..=len {
            let v = gauge::dual_gauge_2k(&x, k).unwrap();
            prop_assert!((v - dual_gauge_oracle(&x, k)).abs() <= 1e-8 * v.max(1.0));
        }
    }

    #[test]
    fn prox_operators_nonexpansive((x, y) in arb_pair(6), t in 0.01f64..2.0) {
        let k = 1 + x.rows() % x.min_dim();
        let d = x.sub(&y).unwrap().frobenius_norm();
        let p1 = prox::prox_dual_2k(&x, t, k).unwrap().sub(&prox::prox_dual_2k(&y, t, k).unwrap()).unwrap();
        prop_assert!(p1.frobenius_norm() <= d + 1e-9);
        let p2 = prox::prox_l1(&x, t).unwrap().sub(&prox::prox_l1(&y, t).unwrap()).unwrap();
        prop_assert!(p2.frobenius_norm() <= d + 1e-12);
    }
}
