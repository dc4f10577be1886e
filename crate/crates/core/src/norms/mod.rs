//! Unitarily invariant norms built on singular values: the Ky Fan 2-k-norm,
//! its dual, the θ-combined norm `‖X‖*_{k,2} + θ‖X‖₁` and its dual, and the
//! classical Ky Fan k-norm used as a baseline.

pub mod gauge;

use serde::{Deserialize, Serialize};

use crate::error::{check_k, Error, Result};
use crate::linalg::{singular_values, svd, Matrix};

pub use gauge::{
    dual_gauge_2k, dual_topk_sum, gauge_2k, project_gauge2k_ball, project_gauge2k_epigraph,
    project_topk_ball, topk_sum,
};

/// Number of blocks sought and the ℓ1 weight θ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub k: usize,
    pub theta: f64,
}

impl NormParams {
    pub fn new(k: usize, theta: f64) -> Self {
        Self { k, theta }
    }

    /// Checks `1 ≤ k ≤ min(m, n)` and `θ ≥ 0` for an `m×n` operand.
    pub fn validate_for(&self, a: &Matrix) -> Result<()> {
        check_k(self.k, a.min_dim())?;
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "theta must be finite and nonnegative, got {}",
                self.theta
            )));
        }
        Ok(())
    }
}

/// `(Σ_{i≤k} σ_i(A)²)^(1/2)`.
pub fn kyfan_2k_norm(a: &Matrix, k: usize) -> Result<f64> {
    check_k(k, a.min_dim())?;
    gauge_2k(&singular_values(a)?, k)
}

/// Dual of the Ky Fan 2-k-norm: the k-support norm of the singular values.
pub fn dual_2k_norm(a: &Matrix, k: usize) -> Result<f64> {
    check_k(k, a.min_dim())?;
    dual_gauge_2k(&singular_values(a)?, k)
}

/// `‖X‖*_{k,2} + θ‖X‖₁`, the objective of the recovery program.
pub fn combined_norm(x: &Matrix, params: NormParams) -> Result<f64> {
    params.validate_for(x)?;
    Ok(dual_2k_norm(x, params.k)? + params.theta * x.l1_norm())
}

/// Sum of the k largest singular values.
pub fn kyfan_k_norm(a: &Matrix, k: usize) -> Result<f64> {
    check_k(k, a.min_dim())?;
    topk_sum(&singular_values(a)?, k)
}

/// Dual of the Ky Fan k-norm: `max(σ₁, ‖A‖_* / k)`.
pub fn dual_kyfan_k_norm(a: &Matrix, k: usize) -> Result<f64> {
    check_k(k, a.min_dim())?;
    dual_topk_sum(&singular_values(a)?, k)
}

/// Stopping rule for [`dual_combined_norm`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DualNormOptions {
    /// Relative change of the iterate below which the iteration stops.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for DualNormOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 50_000,
        }
    }
}

/// Optimal split `A = Y + Z` of the combined dual norm.
#[derive(Clone, Debug)]
pub struct DualSplit {
    /// `max(‖Y‖_{k,2}, θ⁻¹‖Z‖∞)` at the returned split.
    pub value: f64,
    pub y: Matrix,
    pub z: Matrix,
    pub iterations: usize,
    /// Relative disagreement between the two projections at exit.
    pub achieved_tol: f64,
    pub converged: bool,
}

/// Dual of the combined norm,
/// `min_{Y+Z=A} max(‖Y‖_{k,2}, θ⁻¹‖Z‖∞)`, for `θ > 0`.
///
/// The min-max is lifted to `min c` over `(Y, c)` with `(Y, c)` in the Ky Fan
/// 2-k epigraph and `‖A − Y‖∞ ≤ θc`, and solved by Douglas-Rachford on the
/// two projections.
pub fn dual_combined_norm(a: &Matrix, params: NormParams) -> Result<DualSplit> {
    dual_combined_norm_with(a, params, DualNormOptions::default())
}

pub fn dual_combined_norm_with(
    a: &Matrix,
    params: NormParams,
    opts: DualNormOptions,
) -> Result<DualSplit> {
    params.validate_for(a)?;
    a.ensure_finite()?;
    let theta = params.theta;
    if theta <= 0.0 {
        return Err(Error::InvalidArgument(
            "the combined dual norm needs theta > 0".into(),
        ));
    }
    let k = params.k;
    let split_value = |y: &Matrix| -> Result<f64> {
        let z = a.sub(y)?;
        Ok(kyfan_2k_norm(y, k)?.max(z.linf_norm() / theta))
    };
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(DualSplit {
            value: 0.0,
            y: a.clone(),
            z: Matrix::zeros(a.rows(), a.cols()),
            iterations: 0,
            achieved_tol: 0.0,
            converged: true,
        });
    }

    // Start from the better one-sided split.
    let zero = Matrix::zeros(a.rows(), a.cols());
    let (mut zy, mut zc) = if split_value(a)? <= split_value(&zero)? {
        (a.clone(), kyfan_2k_norm(a, k)?)
    } else {
        (zero, a.linf_norm() / theta)
    };
    let step = 0.1 * scale;

    let mut best: Option<(f64, Matrix)> = None;
    let mut iterations = 0;
    let mut achieved = f64::INFINITY;
    let mut prev_c = zc;
    let mut stable = 0;
    for it in 0..opts.max_iters {
        iterations = it + 1;
        let (xy, xc) = project_kyfan_epigraph(&zy, zc - step, k)?;
        let ry = xy.scale(2.0).sub(&zy)?;
        let rc = 2.0 * xc - zc;
        let (py, pc) = project_box_epigraph(a, &ry, rc, theta)?;
        let diff_y = py.sub(&xy)?;
        zy.axpy(1.0, &diff_y)?;
        zc += pc - xc;

        let gap = (diff_y.frobenius_norm().powi(2) + (pc - xc).powi(2)).sqrt();
        achieved = gap / scale;
        if it % 10 == 0 || achieved < opts.tol {
            let v = split_value(&py)?;
            if best.as_ref().map_or(true, |(b, _)| v < *b) {
                best = Some((v, py.clone()));
            }
        }
        let change = (xc - prev_c).abs() / xc.abs().max(f64::MIN_POSITIVE);
        prev_c = xc;
        if achieved < opts.tol {
            break;
        }
        stable = if change < opts.tol * 1e-2 { stable + 1 } else { 0 };
        if stable > 50 && achieved < opts.tol * 1e3 {
            break;
        }
    }
    let (value, y) = best.expect("at least one iteration ran");
    let z = a.sub(&y)?;
    Ok(DualSplit {
        value,
        y,
        z,
        iterations,
        achieved_tol: achieved,
        converged: achieved < opts.tol * 1e3,
    })
}

/// Projection of `(Y, c)` onto `{‖Y‖_{k,2} ≤ c}` through the singular values.
fn project_kyfan_epigraph(y: &Matrix, c: f64, k: usize) -> Result<(Matrix, f64)> {
    let f = svd(y)?;
    let (s, r) = project_gauge2k_epigraph(&f.s, c, k)?;
    Ok((f.compose(&s), r))
}

/// Projection of `(Y, c)` onto `{‖A − Y‖∞ ≤ θc}`.
fn project_box_epigraph(a: &Matrix, y: &Matrix, c: f64, theta: f64) -> Result<(Matrix, f64)> {
    let d = y.sub(a)?;
    let mut mags: Vec<f64> = d.as_slice().iter().map(|v| v.abs()).collect();
    mags.sort_by(|p, q| q.total_cmp(p));
    // Stationarity: c' (1 + θ² J) = c + θ S_J, where J counts |d| > θc'.
    let mut c_new = c.max(0.0);
    let mut sum = 0.0;
    let mut found = false;
    for j in 0..=mags.len() {
        let cand = (c + theta * sum) / (1.0 + theta * theta * j as f64);
        let upper_ok = j == 0 || mags[j - 1] > theta * cand;
        let lower_ok = j == mags.len() || mags[j] <= theta * cand;
        if upper_ok && lower_ok {
            c_new = cand;
            found = true;
            break;
        }
        if j < mags.len() {
            sum += mags[j];
        }
    }
    if !found || c_new < 0.0 {
        c_new = c_new.max(0.0);
    }
    let cap = theta * c_new;
    let clipped = d.map(|v| v.clamp(-cap, cap));
    Ok((a.add(&clipped)?, c_new))
}
