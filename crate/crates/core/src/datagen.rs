//! Seeded generators for planted block instances: random bicliques,
//! synthetic gene-expression matrices, and general block models with
//! subgaussian noise.
//!
//! All generators draw from ChaCha8 seeded with a `u64`, so an instance is
//! reproducible across platforms from its configuration alone.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::recovery::BlockModel;

/// Identifies the generator and its RNG in instance sidecars.
pub const GENERATOR_ID: &str = "kyfan-core datagen 1 / ChaCha8";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicliqueConfig {
    pub m: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    #[serde(default)]
    pub shuffle: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneExprConfig {
    pub genes: usize,
    pub conditions: usize,
    pub modules: usize,
    pub genes_per_module: usize,
    pub conds_per_module: usize,
    /// Noise standard deviation as a fraction of 50.
    pub sigma: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for GeneExprConfig {
    fn default() -> Self {
        Self {
            genes: 100,
            conditions: 50,
            modules: 10,
            genes_per_module: 10,
            conds_per_module: 5,
            sigma: 0.0,
            seed: 0,
            shuffle: false,
        }
    }
}

/// Noise family for [`gen_planted_with`]; all have zero mean and unit variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Normal,
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    Uniform,
}

/// Row and column index sets of one planted block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// A generated instance. `signal` and `noise` are in planted (unpermuted)
/// order; `a[i][j] = (signal + noise)[row_perm[i]][col_perm[j]]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub a: Matrix,
    pub signal: Matrix,
    pub noise: Matrix,
    /// Planted blocks in unpermuted coordinates.
    pub layout: Vec<BlockLayout>,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub model: Option<BlockModel>,
    pub generator: String,
    pub config: serde_json::Value,
}

impl PlantedInstance {
    fn assemble(
        signal: Matrix,
        noise: Matrix,
        layout: Vec<BlockLayout>,
        model: Option<BlockModel>,
        config: serde_json::Value,
        shuffle: Option<&mut ChaCha8Rng>,
    ) -> Result<Self> {
        let (m, n) = signal.shape();
        let mut row_perm: Vec<usize> = (0..m).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        if let Some(rng) = shuffle {
            row_perm.shuffle(rng);
            col_perm.shuffle(rng);
        }
        let full = signal.add(&noise)?;
        let a = full.select(&row_perm, &col_perm);
        Ok(Self {
            a,
            signal,
            noise,
            layout,
            row_perm,
            col_perm,
            model,
            generator: GENERATOR_ID.to_string(),
            config,
        })
    }

    /// Planted blocks in the coordinates of `a`, indices sorted.
    pub fn observed_layout(&self) -> Vec<BlockLayout> {
        let inv = |perm: &[usize]| {
            let mut out = vec![0; perm.len()];
            for (i, &p) in perm.iter().enumerate() {
                out[p] = i;
            }
            out
        };
        let (ri, ci) = (inv(&self.row_perm), inv(&self.col_perm));
        self.layout
            .iter()
            .map(|b| {
                let mut rows: Vec<usize> = b.rows.iter().map(|&r| ri[r]).collect();
                let mut cols: Vec<usize> = b.cols.iter().map(|&c| ci[c]).collect();
                rows.sort_unstable();
                cols.sort_unstable();
                BlockLayout { rows, cols }
            })
            .collect()
    }

    /// `signal` in the coordinates of `a`.
    pub fn observed_signal(&self) -> Matrix {
        self.signal.select(&self.row_perm, &self.col_perm)
    }

    /// Undoes the row and column shuffle of `x`.
    pub fn unpermute(&self, x: &Matrix) -> Result<Matrix> {
        if x.shape() != self.a.shape() {
            return Err(Error::ShapeMismatch("unpermute".into()));
        }
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for (i, &pi) in self.row_perm.iter().enumerate() {
            for (j, &pj) in self.col_perm.iter().enumerate() {
                out[(pi, pj)] = x[(i, j)];
            }
        }
        Ok(out)
    }

    /// Writes `<stem>.mat` (matrix text format) and `<stem>.json` (metadata).
    pub fn write_bundle(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let mat = dir.join(format!("{stem}.mat"));
        let meta = dir.join(format!("{stem}.json"));
        self.a.write_text(std::fs::File::create(&mat)?)?;
        let sidecar = serde_json::json!({
            "generator": self.generator,
            "config": self.config,
            "layout": self.layout,
            "row_perm": self.row_perm,
            "col_perm": self.col_perm,
            "model": self.model,
        });
        let text = serde_json::to_string_pretty(&sidecar)
            .map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(&meta, text)?;
        Ok((mat, meta))
    }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")))
    }
}

fn to_json<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

/// Two all-ones diagonal blocks of size `m/2 × n/2`; every other entry is an
/// independent Bernoulli(`p`) edge.
pub fn gen_biclique(cfg: &BicliqueConfig) -> Result<PlantedInstance> {
    check_prob(cfg.p)?;
    let model = BlockModel::biclique(cfg.m, cfg.n, cfg.p)?;
    let (hm, hn) = (cfg.m / 2, cfg.n / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let on_block = |i: usize, j: usize| (i < hm) == (j < hn);
    let signal = Matrix::from_fn(cfg.m, cfg.n, |i, j| if on_block(i, j) { 1.0 } else { 0.0 });
    let noise = Matrix::from_fn(cfg.m, cfg.n, |i, j| {
        if !on_block(i, j) && rng.gen::<f64>() < cfg.p {
            1.0
        } else {
            0.0
        }
    });
    let layout = vec![
        BlockLayout {
            rows: (0..hm).collect(),
            cols: (0..hn).collect(),
        },
        BlockLayout {
            rows: (hm..cfg.m).collect(),
            cols: (hn..cfg.n).collect(),
        },
    ];
    PlantedInstance::assemble(
        signal,
        noise,
        layout,
        Some(model),
        to_json(cfg),
        cfg.shuffle.then_some(&mut rng),
    )
}

/// Module `i` (1-based) has base level `55 + 4i`; an entry is base plus a
/// per-gene and a per-condition offset in `{0, …, 3}`, capped at 100. The
/// background is uniform on the integers `0..=45`. Gaussian noise of standard
/// deviation `50σ` is added and the result clamped at zero.
pub fn gen_gene_expression(cfg: &GeneExprConfig) -> Result<PlantedInstance> {
    if cfg.modules == 0 || cfg.genes_per_module == 0 || cfg.conds_per_module == 0 {
        return Err(Error::InvalidArgument("modules and module sizes must be positive".into()));
    }
    if cfg.modules * cfg.genes_per_module > cfg.genes
        || cfg.modules * cfg.conds_per_module > cfg.conditions
    {
        return Err(Error::InvalidArgument("modules do not fit in the matrix".into()));
    }
    if !(0.0..=0.5).contains(&cfg.sigma) {
        return Err(Error::InvalidArgument(format!("sigma must lie in [0, 0.5], got {}", cfg.sigma)));
    }
    let (m, n) = (cfg.genes, cfg.conditions);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let module_of_row = |i: usize| {
        let b = i / cfg.genes_per_module;
        (b < cfg.modules).then_some(b)
    };
    let module_of_col = |j: usize| {
        let b = j / cfg.conds_per_module;
        (b < cfg.modules).then_some(b)
    };
    let row_off: Vec<f64> = (0..m).map(|_| rng.gen_range(0..=3) as f64).collect();
    let col_off: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=3) as f64).collect();
    let mut signal = Matrix::zeros(m, n);
    let mut clean = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            match (module_of_row(i), module_of_col(j)) {
                (Some(a), Some(b)) if a == b => {
                    let level = 55.0 + 4.0 * (a + 1) as f64;
                    let v = (level + row_off[i] + col_off[j]).min(100.0);
                    signal[(i, j)] = v;
                    clean[(i, j)] = v;
                }
                _ => clean[(i, j)] = rng.gen_range(0..=45) as f64,
            }
        }
    }
    let sd = 50.0 * cfg.sigma;
    let noisy = if sd > 0.0 {
        clean.zip_with(
            &Matrix::from_fn(m, n, |_, _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            }),
            |v, r| (v + r).max(0.0),
        )?
    } else {
        clean
    };
    let noise = noisy.sub(&signal)?;
    let layout = (0..cfg.modules)
        .map(|b| BlockLayout {
            rows: (b * cfg.genes_per_module..(b + 1) * cfg.genes_per_module).collect(),
            cols: (b * cfg.conds_per_module..(b + 1) * cfg.conds_per_module).collect(),
        })
        .collect();
    PlantedInstance::assemble(signal, noise, layout, None, to_json(cfg), cfg.shuffle.then_some(&mut rng))
}

/// Instance of `model` with Gaussian noise and no shuffling.
pub fn gen_planted(model: &BlockModel, seed: u64) -> Result<PlantedInstance> {
    gen_planted_with(model, seed, NoiseKind::Normal, false)
}

/// `B = diag(σ̄_i ū_i v̄_iᵀ)` plus `R_ij = √(φ_iφ_j)(μ_ij + b·ξ)` entrywise on
/// block `(i, j)`, with `ξ` drawn from `noise`.
pub fn gen_planted_with(
    model: &BlockModel,
    seed: u64,
    noise: NoiseKind,
    shuffle: bool,
) -> Result<PlantedInstance> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row_start: Vec<usize> = model
        .blocks
        .iter()
        .scan(0, |acc, b| {
            let s = *acc;
            *acc += b.m;
            Some(s)
        })
        .collect();
    let col_start: Vec<usize> = model
        .blocks
        .iter()
        .scan(0, |acc, b| {
            let s = *acc;
            *acc += b.n;
            Some(s)
        })
        .collect();
    let m: usize = model.blocks.iter().map(|b| b.m).sum();
    let n: usize = model.blocks.iter().map(|b| b.n).sum();
    let phi = model.phi();
    let mut signal = Matrix::zeros(m, n);
    let mut r = Matrix::zeros(m, n);
    for (bi, blk) in model.blocks.iter().enumerate() {
        for a in 0..blk.m {
            for c in 0..blk.n {
                signal[(row_start[bi] + a, col_start[bi] + c)] =
                    blk.sigma_bar * blk.u_bar[a] * blk.v_bar[c];
            }
        }
    }
    for (bi, bl) in model.blocks.iter().enumerate() {
        for (bj, bk) in model.blocks.iter().enumerate() {
            let scale = (phi[bi] * phi[bj]).sqrt();
            for a in 0..bl.m {
                for c in 0..bk.n {
                    let xi = match noise {
                        NoiseKind::Normal => StandardNormal.sample(&mut rng),
                        NoiseKind::Rademacher => {
                            if rng.gen::<bool>() {
                                1.0
                            } else {
                                -1.0
                            }
                        }
                        NoiseKind::Uniform => rng.gen_range(-3f64.sqrt()..=3f64.sqrt()),
                    };
                    r[(row_start[bi] + a, col_start[bj] + c)] =
                        scale * (model.mu[bi][bj] + model.b * xi);
                }
            }
        }
    }
    let layout = model
        .signal()
        .iter()
        .enumerate()
        .map(|(i, b)| BlockLayout {
            rows: (row_start[i]..row_start[i] + b.m).collect(),
            cols: (col_start[i]..col_start[i] + b.n).collect(),
        })
        .collect();
    let config = serde_json::json!({ "seed": seed, "noise": noise, "shuffle": shuffle });
    PlantedInstance::assemble(
        signal,
        r,
        layout,
        Some(model.clone()),
        config,
        shuffle.then_some(&mut rng),
    )
}
