//! Evaluation of recovered matrices: rescaling, gap thresholding, bicluster
//! extraction, match scores and θ sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::BlockLayout;
use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix};
use crate::norms::NormParams;
use crate::solver::{self, ProblemSpec, SolverOptions};

/// Default minimum ratio between consecutive sorted magnitudes that counts
/// as a gap.
pub const DEFAULT_MIN_RATIO: f64 = 1e3;
/// Recovery cutoff on `max(δ0, δ1)` used to define the smallest good θ.
pub const DEFAULT_RECOVERY_TOL: f64 = 1e-4;
/// Allowed relative variation of magnitude and residual inside a plateau.
pub const DEFAULT_PLATEAU_TOL: f64 = 0.1;

pub type Bicluster = BlockLayout;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Biclustering {
    pub clusters: Vec<Bicluster>,
}

impl Biclustering {
    pub fn new(clusters: Vec<Bicluster>) -> Self {
        Self { clusters }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

/// Mean over clusters of `b` of the best Jaccard index of its row set
/// against the row sets of `bp`. Relevance is `match_score(found, truth)`,
/// recovery is `match_score(truth, found)`.
pub fn match_score(b: &Biclustering, bp: &Biclustering) -> Result<f64> {
    if b.is_empty() {
        return Err(Error::InvalidArgument("match score of an empty biclustering".into()));
    }
    let total: f64 = b
        .clusters
        .iter()
        .map(|g| {
            bp.clusters
                .iter()
                .map(|h| jaccard(&g.rows, &h.rows))
                .fold(0.0, f64::max)
        })
        .sum();
    Ok(total / b.len() as f64)
}

/// Least-squares rescaling `α = ⟨X, E⟩/‖X‖²_F`; returns `(α, αX)`.
pub fn scale_to_fit(x: &Matrix, e: &Matrix) -> Result<(f64, Matrix)> {
    let nx = x.inner(x)?;
    if nx == 0.0 {
        return Err(Error::InvalidArgument("cannot rescale a zero matrix".into()));
    }
    let alpha = x.inner(e)? / nx;
    Ok((alpha, x.scale(alpha)))
}

/// Divides by the largest entry.
pub fn normalize_max(x: &Matrix) -> Result<Matrix> {
    let top = x.max_entry();
    if !(top > 0.0) {
        return Err(Error::InvalidArgument("matrix has no positive entry".into()));
    }
    Ok(x.scale(1.0 / top))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Entries with magnitude strictly above this value are kept.
    pub value: f64,
    /// Ratio across the chosen gap; infinite when the gap ends at zero.
    pub ratio: f64,
    pub gap_found: bool,
}

/// Sorts magnitudes in decreasing order and cuts at the largest ratio between
/// consecutive nonzero-led pairs, placing the threshold at their geometric
/// mean. A zero successor counts as an infinite ratio.
pub fn threshold_detect(x: &Matrix, min_ratio: f64) -> Threshold {
    let mut mags: Vec<f64> = x.as_slice().iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut best = Threshold {
        value: 0.0,
        ratio: 1.0,
        gap_found: false,
    };
    for w in mags.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        if hi == 0.0 {
            break;
        }
        let ratio = if lo == 0.0 { f64::INFINITY } else { hi / lo };
        if ratio > best.ratio {
            best = Threshold {
                value: (hi * lo).sqrt(),
                ratio,
                gap_found: false,
            };
        }
    }
    best.gap_found = best.ratio >= min_ratio;
    best
}

/// Zeroes every entry with magnitude at most `t`.
pub fn apply_threshold(x: &Matrix, t: f64) -> Matrix {
    x.map(|v| if v.abs() > t { v } else { 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDeltas {
    /// Largest deviation from the reference on planted blocks.
    pub delta1: f64,
    /// Largest deviation from the reference elsewhere.
    pub delta0: f64,
}

impl BlockDeltas {
    pub fn max(&self) -> f64 {
        self.delta1.max(self.delta0)
    }
}

pub fn block_deltas(x: &Matrix, layout: &[BlockLayout], reference: &Matrix) -> Result<BlockDeltas> {
    if x.shape() != reference.shape() {
        return Err(Error::ShapeMismatch("block_deltas".into()));
    }
    let (m, n) = x.shape();
    let mut on = vec![false; m * n];
    for b in layout {
        for &r in &b.rows {
            for &c in &b.cols {
                if r >= m || c >= n {
                    return Err(Error::InvalidArgument("layout index out of range".into()));
                }
                on[r * n + c] = true;
            }
        }
    }
    let (mut delta1, mut delta0) = (0.0f64, 0.0f64);
    for i in 0..m {
        for j in 0..n {
            let d = (x[(i, j)] - reference[(i, j)]).abs();
            if on[i * n + j] {
                delta1 = delta1.max(d);
            } else {
                delta0 = delta0.max(d);
            }
        }
    }
    Ok(BlockDeltas { delta1, delta0 })
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Connected components of the bipartite support graph of `x`. Rows and
/// columns without a nonzero entry are dropped; clusters are ordered by
/// their smallest row.
pub fn extract_biclusters(x: &Matrix) -> Biclustering {
    let (m, n) = x.shape();
    let mut parent: Vec<usize> = (0..m + n).collect();
    let mut touched = vec![false; m + n];
    for i in 0..m {
        for j in 0..n {
            if x[(i, j)] != 0.0 {
                touched[i] = true;
                touched[m + j] = true;
                let (a, b) = (find(&mut parent, i), find(&mut parent, m + j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Bicluster> = Default::default();
    let mut order = Vec::new();
    for v in 0..m + n {
        if !touched[v] {
            continue;
        }
        let root = find(&mut parent, v);
        let entry = by_root.entry(root).or_insert_with(|| {
            order.push(root);
            Bicluster {
                rows: Vec::new(),
                cols: Vec::new(),
            }
        });
        if v < m {
            entry.rows.push(v);
        } else {
            entry.cols.push(v - m);
        }
    }
    Biclustering::new(order.into_iter().filter_map(|r| by_root.remove(&r)).collect())
}

/// How a raw solution is put on the scale of the reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Divide by the largest entry (0/1 references).
    MaxEntry,
    /// Least-squares fit to the data matrix.
    LeastSquares,
}

/// Ground truth for evaluation, in the coordinates of the data matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Truth {
    pub layout: Vec<BlockLayout>,
    pub reference: Matrix,
    pub scaling: Scaling,
}

impl Truth {
    pub fn biclustering(&self) -> Biclustering {
        Biclustering::new(self.layout.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub alpha: f64,
    pub deltas: BlockDeltas,
    pub threshold: Threshold,
    pub relevance: f64,
    pub recovery: f64,
    pub found: Biclustering,
}

/// Rescales `x`, compares it with the reference, thresholds it and scores
/// the extracted biclusters against the planted ones.
pub fn evaluate(x: &Matrix, a: &Matrix, truth: &Truth, min_ratio: f64) -> Result<EvalReport> {
    let (alpha, scaled) = match truth.scaling {
        Scaling::MaxEntry => {
            let top = x.max_entry();
            (1.0 / top, normalize_max(x)?)
        }
        Scaling::LeastSquares => scale_to_fit(x, a)?,
    };
    let deltas = block_deltas(&scaled, &truth.layout, &truth.reference)?;
    let threshold = threshold_detect(&scaled, min_ratio);
    let found = extract_biclusters(&apply_threshold(&scaled, threshold.value));
    let planted = truth.biclustering();
    let relevance = if found.is_empty() { 0.0 } else { match_score(&found, &planted)? };
    let recovery = match_score(&planted, &found)?;
    Ok(EvalReport {
        alpha,
        deltas,
        threshold,
        relevance,
        recovery,
        found,
    })
}

/// `‖X‖_{k,2}` and `‖X − X_k‖_F`, where `X_k` is the best rank-`k` approximation.
pub fn magnitude_residual(x: &Matrix, k: usize) -> Result<(f64, f64)> {
    let f = svd(x)?;
    let k = k.min(f.s.len());
    let magnitude = f.s[..k].iter().map(|s| s * s).sum::<f64>().sqrt();
    let residual = f.s[k..].iter().map(|s| s * s).sum::<f64>().sqrt();
    Ok((magnitude, residual))
}

/// Which objective a sweep solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    #[default]
    KyFan2k,
    KyFanK,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub objective: f64,
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub alpha: f64,
    pub delta1: f64,
    pub delta0: f64,
    pub relevance: f64,
    pub recovery: f64,
    pub magnitude: f64,
    pub residual: f64,
    pub gap_found: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn failed(theta: f64, err: Error) -> Self {
        Self {
            theta,
            objective: f64::NAN,
            lower_bound: f64::NAN,
            iterations: 0,
            converged: false,
            alpha: f64::NAN,
            delta1: f64::NAN,
            delta0: f64::NAN,
            relevance: f64::NAN,
            recovery: f64::NAN,
            magnitude: f64::NAN,
            residual: f64::NAN,
            gap_found: false,
            error: Some(err.to_string()),
        }
    }

    pub fn max_delta(&self) -> f64 {
        self.delta1.max(self.delta0)
    }
}

/// Solves and evaluates one θ.
pub fn sweep_point(
    a: &Matrix,
    k: usize,
    theta: f64,
    truth: &Truth,
    opts: &SolverOptions,
    penalty: Penalty,
) -> Result<(SweepRow, Matrix)> {
    let spec = ProblemSpec::new(a.clone(), NormParams::new(k, theta))?;
    let out = match penalty {
        Penalty::KyFan2k => solver::solve(&spec, opts)?,
        Penalty::KyFanK => solver::solve_kyfan_k_baseline(&spec, opts)?,
    };
    let ev = evaluate(&out.x, a, truth, DEFAULT_MIN_RATIO)?;
    let (magnitude, residual) = magnitude_residual(&out.x.scale(ev.alpha), k)?;
    let row = SweepRow {
        theta,
        objective: out.objective,
        lower_bound: out.lower_bound,
        iterations: out.iterations,
        converged: out.converged,
        alpha: ev.alpha,
        delta1: ev.deltas.delta1,
        delta0: ev.deltas.delta0,
        relevance: ev.relevance,
        recovery: ev.recovery,
        magnitude,
        residual,
        gap_found: ev.threshold.gap_found,
        error: None,
    };
    Ok((row, out.x))
}

/// Evaluates every θ in parallel. A failing θ yields a row carrying the
/// error instead of aborting the sweep. Rows come back in input order.
pub fn theta_sweep(
    a: &Matrix,
    k: usize,
    thetas: &[f64],
    truth: &Truth,
    opts: &SolverOptions,
    penalty: Penalty,
) -> Vec<SweepRow> {
    thetas
        .par_iter()
        .map(|&theta| match sweep_point(a, k, theta, truth, opts, penalty) {
            Ok((row, _)) => row,
            Err(e) => SweepRow::failed(theta, e),
        })
        .collect()
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument("need 0 < lo <= hi and n >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (r * i as f64).exp() })
        .collect())
}

/// Smallest θ whose largest block error is at most `tol`.
pub fn theta_min(rows: &[SweepRow], tol: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.error.is_none() && r.max_delta() <= tol)
        .map(|r| r.theta)
        .min_by(f64::total_cmp)
}

/// Longest run of consecutive rows (sorted by θ) over which both magnitude
/// and residual vary by at most `tol` relative to their largest value in the
/// run. Residuals below a millionth of the largest magnitude count as zero.
/// Returns the θ interval, or `None` if no run has two or more rows.
pub fn plateau(rows: &[SweepRow], tol: f64) -> Option<(f64, f64)> {
    let mut ok: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    ok.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let floor = 1e-6 * ok.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    let flat = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        hi - lo <= tol * hi.abs().max(floor)
    };
    let mut best: Option<(usize, usize)> = None;
    for i in 0..ok.len() {
        let mut j = i;
        while j + 1 < ok.len() {
            let w = &ok[i..=j + 1];
            if flat(&mut w.iter().map(|r| r.magnitude)) && flat(&mut w.iter().map(|r| r.residual)) {
                j += 1;
            } else {
                break;
            }
        }
        if j > i && best.map_or(true, |(a, b)| j - i > b - a) {
            best = Some((i, j));
        }
    }
    best.map(|(i, j)| (ok[i].theta, ok[j].theta))
}
