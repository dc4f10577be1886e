//! Proximal maps used by the splitting solver.

use crate::error::{check_k, Error, Result};
use crate::linalg::{svd, Matrix};
use crate::norms::gauge::{project_gauge2k_sorted, project_topk_sorted};

pub use crate::norms::gauge::{project_gauge2k_ball, project_topk_ball};

/// Entrywise soft threshold by `step`.
pub fn prox_l1(x: &Matrix, step: f64) -> Result<Matrix> {
    if !(step >= 0.0) {
        return Err(Error::InvalidArgument(format!("step must be nonnegative, got {step}")));
    }
    Ok(x.map(|v| soft(v, step)))
}

#[inline]
pub(crate) fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// `prox_{t‖·‖*_{k,2}}(X) = X − t·proj_{B_{k,2}}(X/t)`, with the projection
/// applied to the singular values.
pub fn prox_dual_2k(x: &Matrix, step: f64, k: usize) -> Result<Matrix> {
    spectral_moreau(x, step, k, project_gauge2k_sorted)
}

/// Same construction for the dual Ky Fan k-norm `max(σ₁, Σσ/k)`.
pub fn prox_dual_kyfan_k(x: &Matrix, step: f64, k: usize) -> Result<Matrix> {
    spectral_moreau(x, step, k, project_topk_sorted)
}

fn spectral_moreau(
    x: &Matrix,
    step: f64,
    k: usize,
    project: fn(&[f64], usize, f64) -> Vec<f64>,
) -> Result<Matrix> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    check_k(k, x.min_dim())?;
    let f = svd(x)?;
    // Singular values are sorted and nonnegative; projecting onto the radius-t
    // ball equals t·proj(σ/t).
    let proj = project(&f.s, k, step);
    let shrunk: Vec<f64> = f.s.iter().zip(&proj).map(|(s, p)| (s - p).max(0.0)).collect();
    Ok(f.compose(&shrunk))
}

/// `argmin ½‖X − V‖² + τ‖X‖₁` subject to `⟨A, X⟩ ≥ 1`.
///
/// The minimiser is `soft(V + νA, τ)` for the smallest `ν ≥ 0` reaching the
/// halfspace; `⟨A, soft(V + νA, τ)⟩` is nondecreasing and piecewise linear in
/// `ν`, so `ν` is found exactly by a breakpoint sweep.
pub fn prox_l1_halfspace(v: &Matrix, a: &Matrix, tau: f64) -> Result<Matrix> {
    let nu = halfspace_multiplier(v, a, tau)?;
    v.zip_with(a, |vi, ai| soft(vi + nu * ai, tau))
}

pub(crate) fn halfspace_multiplier(v: &Matrix, a: &Matrix, tau: f64) -> Result<f64> {
    if v.shape() != a.shape() {
        return Err(Error::ShapeMismatch("prox_l1_halfspace".into()));
    }
    if tau == 0.0 {
        let gap = 1.0 - v.inner(a)?;
        let aa = a.inner(a)?;
        return if gap <= 0.0 {
            Ok(0.0)
        } else if aa > 0.0 {
            Ok(gap / aa)
        } else {
            Err(Error::Infeasible("A is zero".into()))
        };
    }
    let mut value = 0.0;
    let mut slope = 0.0;
    let mut events: Vec<(f64, f64)> = Vec::new();
    for (&vi, &ai) in v.as_slice().iter().zip(a.as_slice()) {
        if ai == 0.0 {
            continue;
        }
        value += ai * soft(vi, tau);
        let leaving_edge = vi.abs() == tau && ((vi >= 0.0 && ai > 0.0) || (vi <= 0.0 && ai < 0.0));
        if vi.abs() > tau || leaving_edge {
            slope += ai * ai;
        }
        // Points where vi + ν ai crosses ±τ, for ν > 0.
        for edge in [tau, -tau] {
            let nu = (edge - vi) / ai;
            if nu > 0.0 {
                // Crossing into |·| > τ adds a², crossing out removes it.
                let entering = (edge > 0.0) == (ai > 0.0);
                events.push((nu, if entering { ai * ai } else { -ai * ai }));
            }
        }
    }
    if value >= 1.0 {
        return Ok(0.0);
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut at = 0.0;
    for &(nu, ds) in &events {
        let next = value + slope * (nu - at);
        if next >= 1.0 && slope > 0.0 {
            return Ok(at + (1.0 - value) / slope);
        }
        value = next;
        at = nu;
        slope += ds;
    }
    if slope > 0.0 {
        Ok(at + (1.0 - value) / slope)
    } else {
        Err(Error::Infeasible("⟨A, X⟩ ≥ 1 cannot be reached".into()))
    }
}

/// Projection onto `⟨A, X⟩ ≥ 1`.
pub fn project_halfspace(v: &Matrix, a: &Matrix) -> Result<Matrix> {
    let gap = 1.0 - v.inner(a)?;
    if gap <= 0.0 {
        return Ok(v.clone());
    }
    let aa = a.inner(a)?;
    if aa == 0.0 {
        return Err(Error::Infeasible("A is zero".into()));
    }
    let mut out = v.clone();
    out.axpy(gap / aa, a)?;
    Ok(out)
}
