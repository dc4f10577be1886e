//! Run configuration: one TOML document with a section per command, plus
//! `section.key=value` overrides from the command line.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kyfan_core::datagen::{BicliqueConfig, GeneExprConfig};
use kyfan_core::solver::SolverOptions;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Output bundle directory.
    pub out: PathBuf,
    pub solver: SolverOptions,
    pub solve: SolveConfig,
    pub biclique: BicliqueSweepConfig,
    pub genes: GenesConfig,
    pub constants: ConstantsConfig,
    pub export_sdpa: ExportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            solver: SolverOptions::default(),
            solve: SolveConfig::default(),
            biclique: BicliqueSweepConfig::default(),
            genes: GenesConfig::default(),
            constants: ConstantsConfig::default(),
            export_sdpa: ExportConfig::default(),
        }
    }
}

/// Where a single problem instance comes from. Exactly one of `input`,
/// `demo` and `generate` must be set.
#[derive(Clone, Copy, Debug)]
pub struct InstanceSource<'a> {
    /// Matrix in the plain text format (`rows cols` header, then rows).
    pub input: Option<&'a Path>,
    /// Use the built-in 4x4 two-block matrix.
    pub demo: bool,
    pub generate: Option<&'a Generator>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Biclique(BicliqueConfig),
    Genes(GeneExprConfig),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub input: Option<PathBuf>,
    pub demo: bool,
    pub generate: Option<Generator>,
    pub k: usize,
    pub theta: f64,
    /// Solve with the Ky Fan k-norm penalty instead.
    pub baseline: bool,
    /// Relative tolerance for the optimality certificate.
    pub cert_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            input: None,
            demo: false,
            generate: None,
            k: 2,
            theta: 0.2,
            baseline: false,
            cert_tol: 1e-5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThetaGrid {
    /// Explicit values; when non-empty the geometric fields are ignored.
    pub values: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self { values: Vec::new(), lo: 0.005, hi: 1.0, count: 20 }
    }
}

impl ThetaGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = if self.values.is_empty() {
            kyfan_core::eval::geometric_grid(self.lo, self.hi, self.count)?
        } else {
            self.values.clone()
        };
        if pts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            bail!("theta values must be finite and nonnegative");
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BicliqueSweepConfig {
    pub m: usize,
    pub n: usize,
    pub ps: Vec<f64>,
    pub theta: ThetaGrid,
    pub k: usize,
    /// Seed for the first `p`; the i-th value of `ps` uses `seed + i`.
    pub seed: u64,
    pub shuffle: bool,
    /// Largest block error that still counts as recovery.
    pub recovery_tol: f64,
    /// Noise level for the error-vs-θ and model comparison plots.
    pub detail_p: f64,
    pub detail_seed: u64,
    /// Also sweep the Ky Fan k-norm model at `detail_p`.
    pub baseline: bool,
}

impl Default for BicliqueSweepConfig {
    fn default() -> Self {
        Self {
            m: 50,
            n: 50,
            ps: (0..10).map(|i| round6(0.05 + 0.1 * i as f64)).collect(),
            theta: ThetaGrid::default(),
            k: 2,
            seed: 1,
            shuffle: false,
            recovery_tol: kyfan_core::eval::DEFAULT_RECOVERY_TOL,
            detail_p: 0.3,
            detail_seed: 1,
            baseline: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenesConfig {
    pub sigmas: Vec<f64>,
    /// Matrices per noise level, seeded `seed, seed + 1, ...`.
    pub runs: usize,
    pub seed: u64,
    pub k: usize,
    pub theta: f64,
    pub shuffle: bool,
    /// Noise level shown in the heatmaps (first seed).
    pub heatmap_sigma: f64,
    /// Rerun these noise levels with `k` and with `reduced_k`.
    pub reduced_k: Option<usize>,
    pub reduced_sigmas: Vec<f64>,
    /// Overrides the default instance shape; `sigma`, `seed` and `shuffle`
    /// are taken from the fields above.
    pub instance: GeneExprConfig,
}

impl Default for GenesConfig {
    fn default() -> Self {
        Self {
            sigmas: (0..=10).map(|i| round6(0.01 * i as f64)).collect(),
            runs: 10,
            seed: 0,
            k: 10,
            theta: 0.07,
            shuffle: true,
            heatmap_sigma: 0.0,
            reduced_k: None,
            reduced_sigmas: vec![0.3],
            instance: GeneExprConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    /// `biclique`, `single-block`, or a path to a JSON or TOML block model.
    pub model: String,
    pub m: usize,
    pub n: usize,
    /// Off-block noise level of the built-in biclique.
    pub p: f64,
    /// Use the rank-one-block relaxation; unset means "when the model allows it".
    pub relaxed: Option<bool>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self { model: "biclique".into(), m: 50, n: 50, p: 0.0, relaxed: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportConfig {
    pub input: Option<PathBuf>,
    pub demo: bool,
    pub generate: Option<Generator>,
    pub k: usize,
    pub theta: f64,
    /// File name inside the bundle directory.
    pub file: String,
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self { input: None, demo: false, generate: None, k: 2, theta: 0.2, file: "problem.dat-s".into() }
    }
}

impl SolveConfig {
    pub fn source(&self) -> InstanceSource<'_> {
        InstanceSource { input: self.input.as_deref(), demo: self.demo, generate: self.generate.as_ref() }
    }
}

impl ExportConfig {
    pub fn source(&self) -> InstanceSource<'_> {
        InstanceSource { input: self.input.as_deref(), demo: self.demo, generate: self.generate.as_ref() }
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl RunConfig {
    /// Reads `path` (if any), applies `sets` in order and validates the result.
    pub fn load(path: Option<&Path>, sets: &[(String, toml::Value)]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                text.parse::<toml::Table>()
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for (key, value) in sets {
            set_path(&mut doc, key, value.clone())?;
        }
        RunConfig::deserialize(toml::Value::Table(doc)).context("invalid configuration")
    }

    /// The snapshot written into every bundle.
    pub fn snapshot(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.snapshot()?.as_bytes());
        Ok(format!("{digest:x}"))
    }
}

/// Parses `a.b.c=value`. The value is read as a TOML value, falling back
/// to a bare string.
pub fn parse_override(spec: &str) -> Result<(String, toml::Value)> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!("override {spec:?} is not of the form key=value");
    };
    Ok((key.trim().to_string(), parse_value(raw.trim())))
}

/// Sets a dotted key, creating sections as needed.
pub fn set_path(doc: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let path: Vec<&str> = key.split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("bad config key {key:?}");
    }
    let (last, parents) = path.split_last().expect("split yields one part");
    let mut table = doc;
    for p in parents {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => bail!("config key {key:?}: {p:?} is not a section"),
        };
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
