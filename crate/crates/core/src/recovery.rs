//! Planted block models, their heterogeneity parameters, and the constants of
//! the exact-recovery guarantee: the admissible θ interval, the noise-mean
//! bound and the hypothesis checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One rank-one block `σ̄ ū v̄ᵀ` of size `m × n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub m: usize,
    pub n: usize,
    pub sigma_bar: f64,
    pub u_bar: Vec<f64>,
    pub v_bar: Vec<f64>,
}

impl Block {
    /// All-ones block: `σ̄ = √(mn)` with constant unit vectors.
    pub fn ones(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            sigma_bar: ((m * n) as f64).sqrt(),
            u_bar: vec![1.0 / (m as f64).sqrt(); m],
            v_bar: vec![1.0 / (n as f64).sqrt(); n],
        }
    }

    /// `φ = σ̄ / √(mn)`.
    pub fn phi(&self) -> f64 {
        self.sigma_bar / ((self.m * self.n) as f64).sqrt()
    }

    fn has_constant_vectors(&self) -> bool {
        let constant = |x: &[f64]| x.iter().all(|&v| (v - x[0]).abs() <= 1e-12 * x[0].abs());
        constant(&self.u_bar) && constant(&self.v_bar)
    }
}

/// Block-diagonal signal plus noise: `k` signal blocks followed by
/// `k0 − k` noise blocks, noise means `μ` and subgaussian parameter `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockModel {
    pub k: usize,
    pub blocks: Vec<Block>,
    /// `k0 × k0` noise means.
    pub mu: Vec<Vec<f64>>,
    pub b: f64,
    /// Bound `c₀` on `φ_i / φ_j` for noise blocks `i` against signal blocks `j`.
    pub c_noisephi: f64,
}

impl BlockModel {
    pub fn k0(&self) -> usize {
        self.blocks.len()
    }

    pub fn phi(&self) -> Vec<f64> {
        self.blocks.iter().map(Block::phi).collect()
    }

    pub fn signal(&self) -> &[Block] {
        &self.blocks[..self.k]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let k0 = self.k0();
        if self.k == 0 || self.k > k0 {
            return bad(format!("need 1 <= k <= k0, got k = {} and k0 = {k0}", self.k));
        }
        if self.mu.len() != k0 || self.mu.iter().any(|r| r.len() != k0) {
            return bad("mu must be k0 x k0".into());
        }
        if self.mu.iter().flatten().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return bad("mu entries must be finite and nonnegative".into());
        }
        if !(self.b >= 0.0) || !(self.c_noisephi >= 0.0) {
            return bad("b and c_noisephi must be nonnegative".into());
        }
        for (i, blk) in self.blocks.iter().enumerate() {
            if blk.m == 0 || blk.n == 0 || blk.u_bar.len() != blk.m || blk.v_bar.len() != blk.n {
                return bad(format!("block {}: vector lengths must match m and n", i + 1));
            }
            if !(blk.sigma_bar > 0.0) || !blk.sigma_bar.is_finite() {
                return bad(format!("block {}: sigma_bar must be positive", i + 1));
            }
            for (name, x) in [("u_bar", &blk.u_bar), ("v_bar", &blk.v_bar)] {
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 {
                    return bad(format!("block {}: {name} must have unit norm", i + 1));
                }
                if i < self.k && x.iter().any(|&v| v <= 0.0) {
                    return bad(format!("block {}: {name} must be entrywise positive", i + 1));
                }
            }
        }
        if self.blocks.windows(2).any(|w| w[1].sigma_bar > w[0].sigma_bar) {
            return bad("sigma_bar must be nonincreasing".into());
        }
        Ok(())
    }

    /// Two equal all-ones bicliques of an `m × n` bipartite graph with
    /// cross-edge probability `p`.
    pub fn biclique(m: usize, n: usize, p: f64) -> Result<Self> {
        if m % 2 != 0 || n % 2 != 0 || m == 0 || n == 0 {
            return Err(Error::InvalidArgument("biclique sizes must be even and positive".into()));
        }
        let blk = Block::ones(m / 2, n / 2);
        Ok(Self {
            k: 2,
            blocks: vec![blk.clone(), blk],
            mu: vec![vec![0.0, p], vec![p, 0.0]],
            b: 1.0,
            c_noisephi: 0.0,
        })
    }

    /// A single all-ones `m × n` block.
    pub fn single_block(m: usize, n: usize) -> Self {
        Self {
            k: 1,
            blocks: vec![Block::ones(m, n)],
            mu: vec![vec![0.0]],
            b: 1.0,
            c_noisephi: 0.0,
        }
    }

    /// True when every signal block has constant `ū` and `v̄`.
    pub fn has_constant_signal_vectors(&self) -> bool {
        self.signal().iter().all(Block::has_constant_vectors)
    }
}

/// Heterogeneity of the signal blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityParams {
    pub k: usize,
    pub delta_u: f64,
    pub delta_v: f64,
    pub xi_u: f64,
    pub xi_v: f64,
    pub pi_u: f64,
    pub pi_v: f64,
    pub rho_m: f64,
    pub rho_n: f64,
    pub rho_sigma: f64,
}

impl HeterogeneityParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.k >= 1
            && 0.0 < self.xi_u
            && self.xi_u <= self.delta_u + 1e-12
            && self.delta_u <= 1.0 + 1e-12
            && self.pi_u >= 1.0 - 1e-12
            && 0.0 < self.xi_v
            && self.xi_v <= self.delta_v + 1e-12
            && self.delta_v <= 1.0 + 1e-12
            && self.pi_v >= 1.0 - 1e-12
            && self.rho_m >= 1.0
            && self.rho_n >= 1.0
            && self.rho_sigma >= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("inadmissible heterogeneity parameters {self:?}")))
        }
    }
}

/// Tightest parameters for the signal blocks of `model`.
pub fn heterogeneity_params(model: &BlockModel) -> Result<HeterogeneityParams> {
    model.validate()?;
    let sig = model.signal();
    let sqrt = |x: usize| (x as f64).sqrt();
    let fold = |f: &dyn Fn(&Block) -> f64, min: bool| {
        sig.iter()
            .map(f)
            .fold(if min { f64::INFINITY } else { f64::NEG_INFINITY }, |a, b| {
                if min {
                    a.min(b)
                } else {
                    a.max(b)
                }
            })
    };
    let l1 = |x: &[f64]| x.iter().sum::<f64>();
    let min_of = |x: &[f64]| x.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_of = |x: &[f64]| x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ratio = |f: &dyn Fn(&Block) -> f64| fold(f, false) / fold(f, true);
    Ok(HeterogeneityParams {
        k: model.k,
        delta_u: fold(&|b| l1(&b.u_bar) / sqrt(b.m), true),
        delta_v: fold(&|b| l1(&b.v_bar) / sqrt(b.n), true),
        xi_u: fold(&|b| min_of(&b.u_bar) * sqrt(b.m), true),
        xi_v: fold(&|b| min_of(&b.v_bar) * sqrt(b.n), true),
        pi_u: fold(&|b| max_of(&b.u_bar) * sqrt(b.m), false),
        pi_v: fold(&|b| max_of(&b.v_bar) * sqrt(b.n), false),
        rho_m: ratio(&|b| b.m as f64),
        rho_n: ratio(&|b| b.n as f64),
        rho_sigma: sig[0].sigma_bar / sig[model.k - 1].sigma_bar,
    })
}

/// Scalars of the recovery guarantee that depend only on the heterogeneity
/// parameters, `c₀` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarConstants {
    pub c_tauellbd: f64,
    pub c_thetarange: f64,
    pub c_tauubd: f64,
    pub c_mubd: f64,
    pub c_cdelta: f64,
    pub c_qkponej: f64,
    pub c_mininoise: f64,
    pub c_probdenom: f64,
    pub c_probdenomtwo: f64,
    /// Whether the rank-one-constant-block relaxation was applied.
    pub relaxed: bool,
}

/// Evaluates the constants. With `relaxed_rank_one_blocks` the lower bound on
/// `τ_ℓ` only keeps `c_tauellbd = 2ρ_σ√(ρ_mρ_n)`, valid when all signal
/// vectors are constant, and `c_thetarange = ½(36/25·c_tauellbd − 1)⁻¹`.
pub fn constants(
    p: &HeterogeneityParams,
    c_noisephi: f64,
    b: f64,
    relaxed_rank_one_blocks: bool,
) -> Result<ScalarConstants> {
    p.validate()?;
    let k = p.k as f64;
    let rr = p.rho_m * p.rho_n;
    let srr = rr.sqrt();
    let rs = p.rho_sigma;

    let (c_tauellbd, c_thetarange) = if relaxed_rank_one_blocks {
        let c = 2.0 * rs * srr;
        (c, 0.5 / (36.0 / 25.0 * c - 1.0))
    } else {
        let c = rs
            * srr
            * [
                6.0 * (k + 1.0) * srr,
                4.0 / p.xi_u,
                4.0 / p.xi_v,
                2.0 + 2.0 / p.delta_u,
                2.0 + 2.0 / p.delta_v,
            ]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let kappa = k * rr / (k + rr - 1.0);
        (c, 0.5 / (1.2f64.powi(4) * c * c * kappa + 1.0).sqrt())
    };

    let denom = 1.0 + (k - 1.0) / (rs * rs);
    let a = (1.0 + (k - 1.0) * srr) / denom;
    let c_tauubd = 4.0 / 3.0
        * (a + (a * a + (1.0 + (k - 1.0) * rr) * (c_thetarange.powi(-2) - 1.0) / denom).sqrt());

    let inf_if_zero = |x: f64, v: f64| if x == 0.0 { f64::INFINITY } else { v };
    let c_mubd = [
        0.3 / (rs * srr),
        inf_if_zero(c_noisephi, 0.9 / (c_noisephi * rs * srr).sqrt()),
        inf_if_zero(c_noisephi, 0.9 / c_noisephi.sqrt()),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
        / c_tauubd;

    let c_cdelta = [
        0.5 + 1.0 / (0.3 * p.delta_u),
        0.5 + 1.0 / (0.3 * p.delta_v),
        1.0 / (0.09 * p.delta_u * p.delta_v),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let c_qkponej = 0.47 / (rs * (c_cdelta + 0.5) * (k + 1.0));
    let ln7 = 7f64.ln();
    let noise_denom = 81.0 * b * b * c_noisephi * ln7;
    let c_mininoise = if noise_denom == 0.0 {
        f64::INFINITY
    } else {
        (4.0 * c_qkponej * c_qkponej / noise_denom)
            .min(8.0 * 0.23 * 0.23 / (noise_denom * (k + 1.0)))
    };
    Ok(ScalarConstants {
        c_tauellbd,
        c_thetarange,
        c_tauubd,
        c_mubd,
        c_cdelta,
        c_qkponej,
        c_mininoise,
        c_probdenom: c_tauubd * c_tauubd * rs * rs * rr,
        c_probdenomtwo: c_tauubd * c_tauubd * c_noisephi * rs * srr,
        relaxed: relaxed_rank_one_blocks,
    })
}

/// `[c·(Σ m_i n_i)^(−1/2), 2c·(Σ m_i n_i)^(−1/2)]` over the signal blocks.
pub fn theta_range(c_thetarange: f64, sizes: &[(usize, usize)]) -> (f64, f64) {
    let area: usize = sizes.iter().map(|(m, n)| m * n).sum();
    let lo = c_thetarange / (area as f64).sqrt();
    (lo, 2.0 * lo)
}

/// All constants for a model, including `τ_ℓ`, `τ_u` and the θ interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConstants {
    pub params: HeterogeneityParams,
    pub scalars: ScalarConstants,
    pub tau_ell: f64,
    pub tau_u: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

/// Constants for `model`. The relaxation is only accepted when every signal
/// block has constant singular vectors.
pub fn recovery_constants(model: &BlockModel, relaxed_rank_one_blocks: bool) -> Result<RecoveryConstants> {
    let params = heterogeneity_params(model)?;
    if relaxed_rank_one_blocks && !model.has_constant_signal_vectors() {
        return Err(Error::InvalidArgument(
            "the rank-one relaxation needs constant signal vectors".into(),
        ));
    }
    let scalars = constants(&params, model.c_noisephi, model.b, relaxed_rank_one_blocks)?;
    let phi1 = model.blocks[0].phi();
    let sizes: Vec<(usize, usize)> = model.signal().iter().map(|b| (b.m, b.n)).collect();
    let (theta_lo, theta_hi) = theta_range(scalars.c_thetarange, &sizes);
    Ok(RecoveryConstants {
        params,
        scalars,
        tau_ell: scalars.c_tauellbd / phi1,
        tau_u: scalars.c_tauubd / phi1,
        theta_lo,
        theta_hi,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported without a threshold.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub rows: Vec<HypothesisRow>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn row(&self, name: &str) -> Option<&HypothesisRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// Evaluates the hypotheses of the recovery guarantee for `model`. Size
/// ratios `m_i / n_j²` and `n_i / m_j²` are reported as information only.
pub fn hypothesis_check(model: &BlockModel, consts: &RecoveryConstants) -> Result<HypothesisReport> {
    model.validate()?;
    let k = model.k;
    let k0 = model.k0();
    let phi = model.phi();
    let blocks = &model.blocks;
    let le = |lhs: f64, rhs: f64| if lhs <= rhs * (1.0 + 1e-12) { Verdict::Pass } else { Verdict::Fail };
    let mut rows = Vec::new();

    let (lhs, rhs, note) = if k0 > k {
        (
            blocks[k].sigma_bar,
            0.23 * blocks[k - 1].sigma_bar / (k as f64 + 1.0),
            String::new(),
        )
    } else {
        (0.0, 0.0, "no noise blocks".to_string())
    };
    rows.push(HypothesisRow {
        name: "sigma_noise".into(),
        lhs,
        rhs,
        verdict: le(lhs, rhs),
        note,
    });

    let mut worst_phi: f64 = 0.0;
    for i in k..k0 {
        for j in 0..k {
            worst_phi = worst_phi.max(phi[i] / phi[j]);
        }
    }
    rows.push(HypothesisRow {
        name: "noise_phi".into(),
        lhs: worst_phi,
        rhs: model.c_noisephi,
        verdict: if k0 > k { le(worst_phi, model.c_noisephi) } else { Verdict::Pass },
        note: if k0 > k { String::new() } else { "no noise blocks".into() },
    });

    let noise_size: usize = blocks[k..].iter().map(|b| b.m + b.n).sum();
    let min_area = model.signal().iter().map(|b| b.m * b.n).min().unwrap_or(0) as f64;
    let rhs = consts.scalars.c_mininoise * min_area;
    rows.push(HypothesisRow {
        name: "noise_size".into(),
        lhs: noise_size as f64,
        rhs,
        verdict: if k0 > k { le(noise_size as f64, rhs) } else { Verdict::Pass },
        note: if k0 > k { String::new() } else { "no noise blocks".into() },
    });

    let mu_max = model.mu.iter().flatten().cloned().fold(0.0, f64::max);
    rows.push(HypothesisRow {
        name: "mu".into(),
        lhs: mu_max,
        rhs: consts.scalars.c_mubd,
        verdict: le(mu_max, consts.scalars.c_mubd),
        note: String::new(),
    });

    let sig = model.signal();
    let mut rm: f64 = 0.0;
    let mut rn: f64 = 0.0;
    for bi in sig {
        for bj in sig {
            rm = rm.max(bi.m as f64 / (bj.n as f64).powi(2));
            rn = rn.max(bi.n as f64 / (bj.m as f64).powi(2));
        }
    }
    for (name, v) in [("squareness_m", rm), ("squareness_n", rn)] {
        rows.push(HypothesisRow {
            name: name.into(),
            lhs: v,
            rhs: f64::NAN,
            verdict: Verdict::Info,
            note: "asymptotic condition, ratio only".into(),
        });
    }
    Ok(HypothesisReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biclique_params_are_all_one() {
        let p = heterogeneity_params(&BlockModel::biclique(50, 50, 0.1).unwrap()).unwrap();
        for v in [p.delta_u, p.delta_v, p.xi_u, p.xi_v, p.pi_u, p.pi_v, p.rho_m, p.rho_n, p.rho_sigma] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn biclique_constants() {
        let model = BlockModel::biclique(50, 50, 0.01).unwrap();
        let c = recovery_constants(&model, true).unwrap();
        assert!((c.scalars.c_thetarange - 25.0 / 94.0).abs() < 1e-14);
        assert!((c.scalars.c_mubd - 0.047).abs() < 5e-4);
        assert!((c.theta_lo * 50.0 - 0.376).abs() < 5e-4);
        assert!((c.theta_hi * 50.0 - 0.752).abs() < 5e-4);
        assert!(hypothesis_check(&model, &c).unwrap().all_pass());
    }

    #[test]
    fn relaxation_needs_constant_vectors() {
        let mut model = BlockModel::single_block(2, 2);
        model.blocks[0].u_bar = vec![0.8f64.sqrt(), 0.2f64.sqrt()];
        assert!(recovery_constants(&model, true).is_err());
        let p = heterogeneity_params(&model).unwrap();
        let r2 = 2f64.sqrt();
        assert!((p.delta_u - (0.8f64.sqrt() + 0.2f64.sqrt()) / r2).abs() < 1e-14);
        assert!((p.xi_u - 0.2f64.sqrt() * r2).abs() < 1e-14);
        assert!((p.pi_u - 0.8f64.sqrt() * r2).abs() < 1e-14);
    }

    #[test]
    fn mu_violation_fails() {
        let model = BlockModel::biclique(20, 20, 0.1).unwrap();
        let c = recovery_constants(&model, true).unwrap();
        let r = hypothesis_check(&model, &c).unwrap();
        assert_eq!(r.row("mu").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn theta_range_scaling() {
        let (lo, hi) = theta_range(0.3, &[(4, 4)]);
        assert!((lo - 0.075).abs() < 1e-15 && (hi - 0.15).abs() < 1e-15);
        let (lo2, _) = theta_range(0.3, &[(8, 4)]);
        assert!((lo2 - lo / 2f64.sqrt()).abs() < 1e-15);
    }
}
