use kyfan_core::recovery::{
    constants, heterogeneity_params, hypothesis_check, recovery_constants, theta_range, Block,
    BlockModel, HeterogeneityParams, Verdict,
};
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = HeterogeneityParams> {
    (
        1usize..12,
        (0.05f64..=1.0, 0.05f64..=1.0),
        (0.05f64..=1.0, 0.05f64..=1.0),
        (1.0f64..4.0, 1.0f64..4.0),
        (1.0f64..5.0, 1.0f64..5.0, 1.0f64..5.0),
    )
        .prop_map(|(k, (du, fu), (dv, fv), (pu, pv), (rm, rn, rs))| HeterogeneityParams {
            k,
            delta_u: du,
            delta_v: dv,
            xi_u: du * fu,
            xi_v: dv * fv,
            pi_u: pu,
            pi_v: pv,
            rho_m: rm,
            rho_n: rn,
            rho_sigma: rs,
        })
}

#[test]
fn single_block_params() {
    let p = heterogeneity_params(&BlockModel::single_block(7, 3)).unwrap();
    assert_eq!((p.rho_m, p.rho_n, p.rho_sigma), (1.0, 1.0, 1.0));
    assert_eq!(p.k, 1);
}

#[test]
fn biclique_theta_interval() {
    let c = recovery_constants(&BlockModel::biclique(50, 50, 0.0).unwrap(), true).unwrap();
    assert!((c.scalars.c_thetarange - 25.0 / 94.0).abs() < 1e-14);
    assert!((c.theta_lo * 50.0 - 0.376).abs() < 5e-4);
    assert!((c.theta_hi * 50.0 - 0.752).abs() < 5e-4);
    assert!((c.scalars.c_mubd - 0.047).abs() < 5e-4);
}

#[test]
fn theta_range_homogeneity() {
    let (lo, hi) = theta_range(0.3, &[(4, 5), (6, 2)]);
    let (lo2, hi2) = theta_range(0.3, &[(8, 5), (12, 2)]);
    assert!((lo2 - lo / 2f64.sqrt()).abs() < 1e-15);
    assert!((hi2 - hi / 2f64.sqrt()).abs() < 1e-15);
    let (single, _) = theta_range(0.3, &[(9, 4)]);
    assert!((single - 0.05).abs() < 1e-15);
}

#[test]
fn relaxation_needs_constant_vectors() {
    let mut model = BlockModel::single_block(2, 2);
    model.blocks[0].u_bar = vec![0.6, 0.8];
    assert!(recovery_constants(&model, true).is_err());
    assert!(recovery_constants(&model, false).is_ok());
}

#[test]
fn hypothesis_examples() {
    let clean = BlockModel::biclique(20, 20, 0.0).unwrap();
    let consts = recovery_constants(&clean, true).unwrap();
    let report = hypothesis_check(&clean, &consts).unwrap();
    assert!(report.all_pass());
    for name in ["sigma_noise", "noise_phi", "noise_size"] {
        assert_eq!(report.row(name).unwrap().verdict, Verdict::Pass);
    }
    assert_eq!(report.row("squareness_m").unwrap().verdict, Verdict::Info);

    let noisy = BlockModel::biclique(20, 20, 0.1).unwrap();
    let report = hypothesis_check(&noisy, &consts).unwrap();
    assert_eq!(report.row("mu").unwrap().verdict, Verdict::Fail);

    // A third block exactly at the singular-value boundary.
    let mut model = BlockModel::biclique(20, 20, 0.0).unwrap();
    model.blocks.push(Block::ones(1, 1));
    model.blocks[2].sigma_bar = 0.23 * model.blocks[1].sigma_bar / 3.0;
    model.mu = vec![vec![0.0; 3]; 3];
    model.c_noisephi = 10.0;
    let consts = recovery_constants(&model, true).unwrap();
    let report = hypothesis_check(&model, &consts).unwrap();
    assert_eq!(report.row("sigma_noise").unwrap().verdict, Verdict::Pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn internal_identity(p in arb_params()) {
        let c = constants(&p, 0.0, 1.0, false).unwrap();
        let rr = p.rho_m * p.rho_n;
        let k = p.k as f64;
        let rebuilt = 25.0 / 36.0
            * ((k + rr - 1.0) / (k * rr)).sqrt()
            * (c.c_thetarange.powi(-2) / 4.0 - 1.0).sqrt();
        prop_assert!((rebuilt - c.c_tauellbd).abs() <= 1e-10 * c.c_tauellbd);
    }

    #[test]
    fn tau_ell_below_tau_u(p in arb_params(), relaxed in any::<bool>()) {
        let c = constants(&p, 0.5, 1.0, relaxed).unwrap();
        prop_assert!(c.c_tauellbd < c.c_tauubd);
        prop_assert!(c.c_mubd < 0.08);
    }

    #[test]
    fn c_tauellbd_monotone(p in arb_params(), bump in 1.0f64..2.0, which in 0usize..6) {
        let base = constants(&p, 0.0, 1.0, false).unwrap().c_tauellbd;
        let mut q = p;
        // Growing k or a ρ, or shrinking ξ or δ, must not lower the constant.
        match which {
            0 => q.k += 1,
            1 => q.rho_m *= bump,
            2 => q.rho_n *= bump,
            3 => q.rho_sigma *= bump,
            4 => q.xi_u /= bump,
            _ => q.delta_u = (q.delta_u / bump).max(q.xi_u),
        }
        let moved = constants(&q, 0.0, 1.0, false).unwrap().c_tauellbd;
        prop_assert!(moved >= base * (1.0 - 1e-12));
    }
}
