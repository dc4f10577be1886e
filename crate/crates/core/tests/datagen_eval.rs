mod common;

use common::*;
use kyfan_core::datagen::{self, BicliqueConfig, BlockLayout, GeneExprConfig, NoiseKind};
use kyfan_core::eval::{self, Biclustering, Penalty, Scaling, Truth};
use kyfan_core::recovery::{Block, BlockModel};
use kyfan_core::solver::SolverOptions;
use kyfan_core::Matrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn disjoint(layout: &[BlockLayout]) -> bool {
    let mut rows = std::collections::HashSet::new();
    let mut cols = std::collections::HashSet::new();
    layout.iter().all(|b| b.rows.iter().all(|r| rows.insert(*r)) && b.cols.iter().all(|c| cols.insert(*c)))
}

fn three_block_model() -> BlockModel {
    let mut blocks = vec![Block::ones(4, 3), Block::ones(3, 3), Block::ones(2, 2)];
    blocks[2].sigma_bar = 0.5;
    BlockModel {
        k: 2,
        blocks,
        mu: vec![vec![0.0, 0.02, 0.01], vec![0.02, 0.0, 0.01], vec![0.01, 0.01, 0.0]],
        b: 0.1,
        c_noisephi: 1.0,
    }
}

#[test]
fn bundle_round_trip() {
    let inst = datagen::gen_gene_expression(&GeneExprConfig { sigma: 0.04, seed: 3, shuffle: true, ..Default::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (mat, meta) = inst.write_bundle(dir.path(), "genes").unwrap();
    let a = Matrix::read_text(std::fs::File::open(mat).unwrap()).unwrap();
    assert_eq!(a, inst.a);
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(meta).unwrap()).unwrap();
    assert!(side["generator"].as_str().unwrap().contains("ChaCha8"));
    let cfg: GeneExprConfig = serde_json::from_value(side["config"].clone()).unwrap();
    assert_eq!(datagen::gen_gene_expression(&cfg).unwrap().a, inst.a);
}

#[test]
fn noise_families_have_unit_scale() {
    let mut model = BlockModel::single_block(60, 60);
    model.b = 1.0;
    for kind in [NoiseKind::Normal, NoiseKind::Rademacher, NoiseKind::Uniform] {
        let inst = datagen::gen_planted_with(&model, 5, kind, false).unwrap();
        let var = inst.noise.as_slice().iter().map(|v| v * v).sum::<f64>() / 3600.0;
        assert!((var - 1.0).abs() < 0.1, "{kind:?}: {var}");
    }
}

#[test]
fn match_score_asymmetry_on_nested_clusterings() {
    let bc = |sets: &[&[usize]]| {
        Biclustering::new(sets.iter().map(|r| BlockLayout { rows: r.to_vec(), cols: vec![0] }).collect())
    };
    let fine = bc(&[&[0, 1], &[2, 3]]);
    let coarse = bc(&[&[0, 1, 2, 3], &[4, 5]]);
    let a = eval::match_score(&fine, &coarse).unwrap();
    let b = eval::match_score(&coarse, &fine).unwrap();
    assert_ne!(a, b);
    assert_eq!(eval::match_score(&fine, &fine).unwrap(), 1.0);
}

#[test]
fn small_sweep_keeps_order_and_finds_recovery() {
    let inst = datagen::gen_biclique(&BicliqueConfig { m: 12, n: 12, p: 0.0, seed: 1, shuffle: true }).unwrap();
    let truth = Truth { layout: inst.observed_layout(), reference: inst.observed_signal(), scaling: Scaling::MaxEntry };
    let thetas = [0.3, 0.05, 0.1];
    let rows = eval::theta_sweep(&inst.a, 2, &thetas, &truth, &SolverOptions::default(), Penalty::KyFan2k);
    assert_eq!(rows.iter().map(|r| r.theta).collect::<Vec<_>>(), thetas.to_vec());
    for r in &rows {
        assert!(r.error.is_none() && r.converged);
        assert!(r.max_delta() < 1e-6, "{r:?}");
        assert_eq!((r.relevance, r.recovery), (1.0, 1.0));
    }
    assert_eq!(eval::theta_min(&rows, 1e-4), Some(0.05));
    assert!(eval::plateau(&rows, 0.1).is_some());
}

#[test]
fn evaluate_rejects_zero_solution() {
    let truth = Truth {
        layout: vec![BlockLayout { rows: vec![0], cols: vec![0] }],
        reference: Matrix::zeros(2, 2),
        scaling: Scaling::LeastSquares,
    };
    assert!(eval::evaluate(&Matrix::zeros(2, 2), &Matrix::filled(2, 2, 1.0), &truth, 1e3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), p in 0.0f64..1.0, shuffle in any::<bool>()) {
        let cfg = BicliqueConfig { m: 8, n: 6, p, seed, shuffle };
        let a = datagen::gen_biclique(&cfg).unwrap();
        let b = datagen::gen_biclique(&cfg).unwrap();
        prop_assert_eq!(a.a.as_slice(), b.a.as_slice());
        let g = GeneExprConfig { genes: 20, conditions: 10, modules: 2, sigma: 0.1, seed, shuffle, ..Default::default() };
        prop_assert_eq!(datagen::gen_gene_expression(&g).unwrap().a, datagen::gen_gene_expression(&g).unwrap().a);
        let m = three_block_model();
        prop_assert_eq!(datagen::gen_planted(&m, seed).unwrap().a, datagen::gen_planted(&m, seed).unwrap().a);
    }

    #[test]
    fn layouts_are_disjoint_and_unpermute(seed in any::<u64>()) {
        let insts = [
            datagen::gen_biclique(&BicliqueConfig { m: 10, n: 8, p: 0.3, seed, shuffle: true }).unwrap(),
            datagen::gen_gene_expression(&GeneExprConfig { seed, shuffle: true, sigma: 0.02, ..Default::default() }).unwrap(),
            datagen::gen_planted_with(&three_block_model(), seed, NoiseKind::Rademacher, true).unwrap(),
        ];
        for inst in &insts {
            prop_assert!(disjoint(&inst.layout));
            prop_assert!(disjoint(&inst.observed_layout()));
            prop_assert_eq!(inst.unpermute(&inst.a).unwrap(), inst.signal.add(&inst.noise).unwrap());
            prop_assert_eq!(inst.unpermute(&inst.observed_signal()).unwrap(), inst.signal.clone());
        }
    }

    #[test]
    fn match_score_in_unit_interval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let make = |r: &mut rand_chacha::ChaCha8Rng| {
            let n = r.gen_range(1..4);
            Biclustering::new((0..n).map(|_| {
                let rows: Vec<usize> = (0..10).filter(|_| r.gen_bool(0.4)).collect();
                BlockLayout { rows, cols: vec![0] }
            }).collect())
        };
        let a = make(&mut r);
        let b = make(&mut r);
        let s = eval::match_score(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn scale_to_fit_is_minimal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_matrix(&mut r, 4, 3);
        let e = random_matrix(&mut r, 4, 3);
        let (alpha, fit) = eval::scale_to_fit(&x, &e).unwrap();
        let best = fit.sub(&e).unwrap().frobenius_norm();
        for _ in 0..100 {
            let c: f64 = r.gen_range(-3.0..3.0);
            prop_assert!(x.scale(c).sub(&e).unwrap().frobenius_norm() >= best - 1e-12);
            if (c - alpha).abs() > 1e-6 {
                prop_assert!(x.scale(c).sub(&e).unwrap().frobenius_norm() > best);
            }
        }
    }

    #[test]
    fn block_deltas_permutation_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_matrix(&mut r, 6, 5);
        let reference = random_matrix(&mut r, 6, 5);
        let layout = vec![BlockLayout { rows: vec![0, 2], cols: vec![1, 4] }, BlockLayout { rows: vec![5], cols: vec![0] }];
        let d = eval::block_deltas(&x, &layout, &reference).unwrap();
        let mut rp: Vec<usize> = (0..6).collect();
        let mut cp: Vec<usize> = (0..5).collect();
        rp.shuffle(&mut r);
        cp.shuffle(&mut r);
        // Entry (i, j) moves to (rinv[i], cinv[j]).
        let inv = |p: &[usize]| { let mut o = vec![0; p.len()]; for (i, &v) in p.iter().enumerate() { o[v] = i; } o };
        let (ri, ci) = (inv(&rp), inv(&cp));
        let moved: Vec<BlockLayout> = layout.iter().map(|b| BlockLayout {
            rows: b.rows.iter().map(|&i| ri[i]).collect(),
            cols: b.cols.iter().map(|&j| ci[j]).collect(),
        }).collect();
        let d2 = eval::block_deltas(&x.select(&rp, &cp), &moved, &reference.select(&rp, &cp)).unwrap();
        prop_assert_eq!(d, d2);
    }
}
