//! Vector gauges acting on singular values, and the Euclidean projections
//! onto their unit balls and epigraphs.
//!
//! All routines are sign and permutation invariant: they sort `|x|`, work
//! on the sorted magnitudes and scatter the result back with the original
//! signs.

use crate::error::{check_k, Result};

/// `(Σ of the k largest x_i²)^(1/2)`.
pub fn gauge_2k(x: &[f64], k: usize) -> Result<f64> {
    check_k(k, x.len())?;
    let z = sorted_abs(x);
    Ok(z[..k].iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Dual of [`gauge_2k`] (the k-support norm).
///
/// With `z = |x|` sorted nonincreasing, the top `k − r − 1` entries are kept
/// and the remaining tail is averaged, where `r ∈ {0, …, k−1}` is the unique
/// index with `z[k−r−2] > T_r/(r+1) ≥ z[k−r−1]`, `T_r` being the tail sum.
pub fn dual_gauge_2k(x: &[f64], k: usize) -> Result<f64> {
    check_k(k, x.len())?;
    let z = sorted_abs(x);
    Ok(dual_gauge_sorted(&z, k))
}

pub(crate) fn dual_gauge_sorted(z: &[f64], k: usize) -> f64 {
    let n = z.len();
    // suffix[i] = Σ_{j ≥ i} z[j]
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + z[i];
    }
    let mut head_sq = z[..k - 1].iter().map(|v| v * v).sum::<f64>();
    for r in 0..k {
        let split = k - r - 1;
        let tail = suffix[split];
        let avg = tail / (r + 1) as f64;
        let above = split == 0 || z[split - 1] > avg;
        if above && avg >= z[split] * (1.0 - 1e-15) {
            return (head_sq + tail * tail / (r + 1) as f64).sqrt();
        }
        if split > 0 {
            head_sq -= z[split - 1] * z[split - 1];
        }
    }
    // Only reachable through rounding; full averaging is the r = k−1 regime.
    suffix[0] / (k as f64).sqrt()
}

/// Sum of the k largest `|x_i|`.
pub fn topk_sum(x: &[f64], k: usize) -> Result<f64> {
    check_k(k, x.len())?;
    Ok(sorted_abs(x)[..k].iter().sum())
}

/// Dual of [`topk_sum`]: `max(‖x‖∞, ‖x‖₁ / k)`.
pub fn dual_topk_sum(x: &[f64], k: usize) -> Result<f64> {
    check_k(k, x.len())?;
    let inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    Ok(inf.max(l1 / k as f64))
}

/// Euclidean projection onto `{y : gauge_2k(y, k) ≤ 1}`.
pub fn project_gauge2k_ball(x: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k, x.len())?;
    Ok(with_sorted_magnitudes(x, |z| project_gauge2k_sorted(z, k, 1.0)))
}

/// Euclidean projection onto `{y : topk_sum(y, k) ≤ 1}`.
pub fn project_topk_ball(x: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k, x.len())?;
    Ok(with_sorted_magnitudes(x, |z| project_topk_sorted(z, k, 1.0)))
}

/// Euclidean projection of `(x, s)` onto the epigraph
/// `{(y, r) : gauge_2k(y, k) ≤ r}`.
pub fn project_gauge2k_epigraph(x: &[f64], s: f64, k: usize) -> Result<(Vec<f64>, f64)> {
    check_k(k, x.len())?;
    let mut r_out = 0.0;
    let y = with_sorted_magnitudes(x, |z| {
        let (y, r) = project_gauge2k_epigraph_sorted(z, s, k);
        r_out = r;
        y
    });
    Ok((y, r_out))
}

/// `argmin_y ½‖y − z‖² + (μ/2)·gauge_2k(y, k)²` for sorted nonnegative `z`.
///
/// The minimiser scales entries above `η(1+μ)` by `1/(1+μ)`, clips entries
/// in `[η, η(1+μ)]` to `η`, and leaves the rest alone; `η` is fixed by
/// requiring the clipped weights `clamp((z_i/η − 1)/μ, 0, 1)` to sum to `k`.
pub(crate) fn prox_sq_gauge2k_sorted(z: &[f64], k: usize, mu: f64) -> Vec<f64> {
    let n = z.len();
    if mu <= 0.0 {
        return z.to_vec();
    }
    let shrink = 1.0 / (1.0 + mu);
    if n <= k || z[k] <= z[k - 1] * shrink {
        return z
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < k { v * shrink } else { v })
            .collect();
    }
    // In terms of ζ = 1/η each weight is clamp((z_i ζ − 1)/μ, 0, 1): increasing
    // and piecewise linear in ζ.
    let pieces: Vec<(f64, f64)> = z
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| (v / mu, -1.0 / mu))
        .collect();
    let zeta = solve_clamp_sum(&pieces, k as f64);
    let eta = 1.0 / zeta;
    z.iter()
        .map(|&v| {
            if v >= eta * (1.0 + mu) {
                v * shrink
            } else if v >= eta {
                eta
            } else {
                v
            }
        })
        .collect()
}

/// `argmin_y ½‖y − z‖² + μ·topk_sum(y, k)` for sorted nonnegative `z`,
/// computed as `z − proj_{μ·B°}(z)` with `B° = {‖w‖∞ ≤ 1, ‖w‖₁ ≤ k}`.
pub(crate) fn prox_topk_sorted(z: &[f64], k: usize, mu: f64) -> Vec<f64> {
    if mu <= 0.0 {
        return z.to_vec();
    }
    let capped: f64 = z.iter().map(|&v| v.min(mu)).sum();
    let shift = if capped <= k as f64 * mu {
        0.0
    } else {
        // Σ clamp((z_i − ν)/μ, 0, 1) = k, increasing in ζ = −ν.
        let pieces: Vec<(f64, f64)> = z.iter().map(|&v| (1.0 / mu, v / mu)).collect();
        -solve_clamp_sum(&pieces, k as f64)
    };
    z.iter()
        .map(|&v| v - (v - shift).clamp(0.0, mu))
        .collect()
}

pub(crate) fn project_gauge2k_sorted(z: &[f64], k: usize, radius: f64) -> Vec<f64> {
    let g = z[..k.min(z.len())].iter().map(|v| v * v).sum::<f64>().sqrt();
    if g <= radius {
        return z.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; z.len()];
    }
    let norm_at = |mu: f64| {
        let y = prox_sq_gauge2k_sorted(z, k, mu);
        y[..k.min(y.len())].iter().map(|v| v * v).sum::<f64>().sqrt()
    };
    // The top-k block alone needs 1+μ = g/radius; ties can only push μ higher.
    let mu = decreasing_root(norm_at, radius, (g / radius - 1.0).max(0.0));
    prox_sq_gauge2k_sorted(z, k, mu)
}

pub(crate) fn project_topk_sorted(z: &[f64], k: usize, radius: f64) -> Vec<f64> {
    let total: f64 = z[..k.min(z.len())].iter().sum();
    if total <= radius {
        return z.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; z.len()];
    }
    let sum_at = |mu: f64| {
        let y = prox_topk_sorted(z, k, mu);
        y[..k.min(y.len())].iter().sum::<f64>()
    };
    let mu = decreasing_root(sum_at, radius, 0.0);
    prox_topk_sorted(z, k, mu)
}

fn project_gauge2k_epigraph_sorted(z: &[f64], s: f64, k: usize) -> (Vec<f64>, f64) {
    let g = z[..k].iter().map(|v| v * v).sum::<f64>().sqrt();
    if g <= s {
        return (z.to_vec(), s);
    }
    if s <= 0.0 && dual_gauge_sorted(z, k) <= -s {
        return (vec![0.0; z.len()], 0.0);
    }
    // With y = prox of (μ/2)·gauge², stationarity in r reads gauge(y)(1 − μ) = s,
    // and the left side is strictly decreasing in μ.
    let h = |mu: f64| {
        let y = prox_sq_gauge2k_sorted(z, k, mu);
        y[..k].iter().map(|v| v * v).sum::<f64>().sqrt() * (1.0 - mu)
    };
    let mu = decreasing_root(h, s, 0.0);
    let y = prox_sq_gauge2k_sorted(z, k, mu);
    let r = y[..k].iter().map(|v| v * v).sum::<f64>().sqrt();
    (y, r)
}

/// Finds `μ ≥ lo` with `f(μ) = target` for a nonincreasing `f` with
/// `f(lo) ≥ target`, by bracketing and bisection to machine precision.
fn decreasing_root(f: impl Fn(f64) -> f64, target: f64, lo: f64) -> f64 {
    let mut lo = lo;
    if f(lo) <= target {
        return lo;
    }
    let mut hi = if lo > 0.0 { 2.0 * lo } else { 1.0 };
    let mut guard = 0;
    while f(hi) > target {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `Σ clamp(a_i ζ + c_i, 0, 1) = target` for ζ, with every `a_i > 0`.
///
/// The sum is continuous, nondecreasing and piecewise linear in ζ; the
/// breakpoints are swept in order and the crossing interval solved exactly.
fn solve_clamp_sum(pieces: &[(f64, f64)], target: f64) -> f64 {
    // (ζ, Δslope) events: slope gains a_i at ζ = −c_i/a_i, loses it at (1 − c_i)/a_i.
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * pieces.len());
    for &(a, c) in pieces {
        events.push((-c / a, a));
        events.push(((1.0 - c) / a, -a));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut value = 0.0;
    let mut slope = 0.0;
    let mut at = events.first().map_or(0.0, |e| e.0);
    for &(zeta, ds) in &events {
        let next = value + slope * (zeta - at);
        if next >= target && slope > 0.0 {
            return at + (target - value) / slope;
        }
        value = next;
        at = zeta;
        slope += ds;
    }
    at
}

pub(crate) fn sorted_abs(x: &[f64]) -> Vec<f64> {
    let mut z: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    z.sort_by(|a, b| b.total_cmp(a));
    z
}

/// Applies `f` to `|x|` sorted nonincreasing and maps the result back to the
/// original positions and signs.
pub(crate) fn with_sorted_magnitudes(x: &[f64], f: impl FnOnce(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    let z: Vec<f64> = order.iter().map(|&i| x[i].abs()).collect();
    let y = f(&z);
    let mut out = vec![0.0; x.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = y[pos].copysign(if x[i] < 0.0 { -1.0 } else { 1.0 });
    }
    out
}
