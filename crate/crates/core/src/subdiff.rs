//! Subdifferential of the Ky Fan 2-k-norm: membership tests for vectors and
//! matrices, and the differentiability predicate.

use serde::{Deserialize, Serialize};

use crate::error::{check_k, Error, Result};
use crate::linalg::{singular_values, svd, Matrix};
use crate::norms::gauge_2k;

/// Default relative tolerance for deciding that two singular values tie.
pub const DEFAULT_TIE_TOL: f64 = 1e-8;

/// Position of the tie block around `σ_k`: positions `k−t+1 ..= k+s`
/// (1-based) all equal `σ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPartition {
    pub t: usize,
    pub s: usize,
    pub k: usize,
    pub sigma_k: f64,
}

impl SpectrumPartition {
    /// 0-based index range of the tie block.
    pub fn tie_range(&self) -> std::ops::Range<usize> {
        (self.k - self.t)..(self.k + self.s)
    }
}

/// Reads off `(t, s)` for a nonincreasing spectrum. Values within
/// `tie_tol · max(σ_k, 1)` of `σ_k` count as equal.
pub fn partition_spectrum(s: &[f64], k: usize, tie_tol: f64) -> Result<SpectrumPartition> {
    check_k(k, s.len())?;
    let sigma_k = s[k - 1];
    let tol = tie_tol * sigma_k.max(1.0);
    let ties = |v: f64| (v - sigma_k).abs() <= tol;
    let t = s[..k].iter().rev().take_while(|&&v| ties(v)).count();
    let after = s[k..].iter().take_while(|&&v| ties(v)).count();
    Ok(SpectrumPartition {
        t,
        s: after,
        k,
        sigma_k,
    })
}

/// Tests `v ∈ ∂‖σ‖_{k,2}` for a nonincreasing nonnegative `σ ≠ 0`.
pub fn vector_subgrad_check(sigma: &[f64], v: &[f64], k: usize, tol: f64) -> Result<bool> {
    if sigma.len() != v.len() {
        return Err(Error::ShapeMismatch("sigma and v differ in length".into()));
    }
    let norm = gauge_2k(sigma, k)?;
    if norm == 0.0 {
        return Err(Error::InvalidArgument("subdifferential at zero is not handled".into()));
    }
    let part = partition_spectrum(sigma, k, tol)?;
    let tie = part.tie_range();
    for i in 0..tie.start {
        if (v[i] - sigma[i] / norm).abs() > tol {
            return Ok(false);
        }
    }
    for &vi in &v[tie.end..] {
        if vi.abs() > tol {
            return Ok(false);
        }
    }
    if part.sigma_k <= tol {
        return Ok(v[tie].iter().all(|vi| vi.abs() <= tol));
    }
    let scale = norm / part.sigma_k;
    let mut sum = 0.0;
    for &vi in &v[tie] {
        let tau = vi * scale;
        if tau < -tol || tau > 1.0 + tol {
            return Ok(false);
        }
        sum += tau;
    }
    Ok((sum - part.t as f64).abs() <= tol * (part.t + part.s) as f64)
}

/// Residuals of the matrix membership test. `T` is the tie-block matrix
/// `σ_k⁻¹‖A‖_{k,2} U_tieᵀ G V_tie`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgradReport {
    pub partition: SpectrumPartition,
    /// Max deviation of the leading block from `Σ/‖A‖_{k,2}`.
    pub leading: f64,
    /// Max entry coupling leading and tie subspaces.
    pub cross: f64,
    /// `‖G − U_r U_rᵀ G V_r V_rᵀ‖_F` with `r = k + s`.
    pub off_span: f64,
    pub t_asymmetry: f64,
    /// Sum of magnitudes of negative eigenvalues of sym(T).
    pub t_negativity: f64,
    pub t_spectral_norm: f64,
    pub t_trace: f64,
    pub passed: bool,
}

impl SubgradReport {
    /// Largest violation, comparable with the tolerance.
    pub fn max_violation(&self) -> f64 {
        let t = self.partition.t as f64;
        let mut worst = self.leading.max(self.cross).max(self.off_span);
        worst = worst.max(self.t_asymmetry).max(self.t_negativity);
        worst = worst.max(self.t_spectral_norm - 1.0);
        if self.partition.sigma_k > 0.0 {
            worst = worst.max((self.t_trace - t).abs());
        }
        worst
    }
}

/// Tests `G ∈ ∂‖A‖_{k,2}`.
pub fn matrix_subgrad_check(a: &Matrix, g: &Matrix, k: usize, tol: f64) -> Result<bool> {
    Ok(matrix_subgrad_report(a, g, k, tol, tol)?.passed)
}

pub fn matrix_subgrad_report(
    a: &Matrix,
    g: &Matrix,
    k: usize,
    tol: f64,
    tie_tol: f64,
) -> Result<SubgradReport> {
    if a.shape() != g.shape() {
        return Err(Error::ShapeMismatch("A and G differ in shape".into()));
    }
    check_k(k, a.min_dim())?;
    g.ensure_finite()?;
    let f = svd(a)?;
    let norm = gauge_2k(&f.s, k)?;
    if norm == 0.0 {
        return Err(Error::InvalidArgument("subdifferential at zero is not handled".into()));
    }
    let part = partition_spectrum(&f.s, k, tie_tol)?;
    let tie = part.tie_range();
    let r = tie.end;
    let idx: Vec<usize> = (0..r).collect();
    let ur = f.u.columns(&idx);
    let vr = f.v.columns(&idx);
    // C = U_rᵀ G V_r
    let c = ur.t_matmul(&g.matmul(&vr)?)?;

    let lead = tie.start;
    let mut leading: f64 = 0.0;
    let mut cross: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let in_lead = (i < lead, j < lead);
            match in_lead {
                (true, true) => {
                    let expect = if i == j { f.s[i] / norm } else { 0.0 };
                    leading = leading.max((c[(i, j)] - expect).abs());
                }
                (true, false) | (false, true) => cross = cross.max(c[(i, j)].abs()),
                (false, false) => {}
            }
        }
    }
    let inside = ur.matmul(&c)?.matmul(&vr.transpose())?;
    let off_span = g.sub(&inside)?.frobenius_norm();

    let w = tie.len();
    let zero_tie = part.sigma_k <= tie_tol;
    let amplify = if zero_tie { 1.0 } else { norm / part.sigma_k };
    let tm = Matrix::from_fn(w, w, |i, j| c[(lead + i, lead + j)] * amplify);
    let (t_asymmetry, t_negativity, t_spectral_norm, t_trace) = if w == 0 {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let asym = tm.sub(&tm.transpose())?.linf_norm();
        let sym = tm.add(&tm.transpose())?.scale(0.5);
        let sv = singular_values(&sym)?;
        let trace = sym.trace();
        let nuclear: f64 = sv.iter().sum();
        (asym, ((nuclear - trace) / 2.0).max(0.0), sv[0], trace)
    };

    let mut report = SubgradReport {
        partition: part,
        leading,
        cross,
        off_span,
        t_asymmetry,
        t_negativity,
        t_spectral_norm,
        t_trace,
        passed: false,
    };
    report.passed = if zero_tie {
        // The tie block carries the factor σ_k = 0, so G must vanish there.
        leading <= tol && cross <= tol && off_span <= tol && t_spectral_norm <= tol
    } else {
        report.max_violation() <= tol
    };
    Ok(report)
}

/// True when `σ_k > σ_{k+1}` beyond the tie tolerance (with `σ_{p+1} = 0`),
/// or `σ_k` is zero within it.
pub fn is_differentiable(a: &Matrix, k: usize, tie_tol: f64) -> Result<bool> {
    check_k(k, a.min_dim())?;
    let s = singular_values(a)?;
    if s[0] == 0.0 {
        return Err(Error::InvalidArgument("A is zero".into()));
    }
    let part = partition_spectrum(&s, k, tie_tol)?;
    Ok(part.s == 0 || part.sigma_k <= tie_tol)
}

/// The element `U_{k−t} Σ V_{k−t}ᵀ/‖A‖ + (σ_k/‖A‖)(t/(t+s)) U_tie V_tieᵀ` of the
/// subdifferential; the gradient wherever the norm is differentiable.
pub fn kyfan_2k_subgradient(a: &Matrix, k: usize, tie_tol: f64) -> Result<Matrix> {
    check_k(k, a.min_dim())?;
    let f = svd(a)?;
    let norm = gauge_2k(&f.s, k)?;
    if norm == 0.0 {
        return Err(Error::InvalidArgument("A is zero".into()));
    }
    let part = partition_spectrum(&f.s, k, tie_tol)?;
    let tie = part.tie_range();
    let share = part.t as f64 / tie.len() as f64;
    let d: Vec<f64> = (0..f.s.len())
        .map(|i| {
            if i < tie.start {
                f.s[i] / norm
            } else if tie.contains(&i) {
                part.sigma_k * share / norm
            } else {
                0.0
            }
        })
        .collect();
    Ok(f.compose(&d))
}
