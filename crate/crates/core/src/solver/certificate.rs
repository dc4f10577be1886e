//! Optimality certificates `(Y, Z, α, β, λ)` and their numerical check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norms::{self, DualNormOptions};
use crate::subdiff;

use super::{ProblemSpec, SolveOutcome};

/// Dual data certifying optimality of `X`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub y: Matrix,
    /// Always `A − Y`.
    pub z: Matrix,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl Certificate {
    pub fn new(a: &Matrix, y: Matrix, alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !(beta >= 0.0) {
            return Err(Error::InvalidArgument("alpha and beta must be nonnegative".into()));
        }
        let z = a.sub(&y)?;
        Ok(Self {
            y,
            z,
            alpha,
            beta,
            lambda,
        })
    }

    /// Builds the certificate of a solve: `Y` is the spectral subgradient
    /// divided by the objective, `α = ‖X‖*_{k,2}`, `β = ‖X‖₁`, and `λ` is the
    /// reciprocal of the combined dual norm of `A`. At `θ = 0` the split is
    /// `Y = A`, `Z = 0` and `λ = 1/‖A‖_{k,2}`.
    pub fn from_outcome(spec: &ProblemSpec, outcome: &SolveOutcome) -> Result<Self> {
        Self::from_outcome_with(spec, outcome, DualNormOptions::default())
    }

    pub fn from_outcome_with(
        spec: &ProblemSpec,
        outcome: &SolveOutcome,
        dual_opts: DualNormOptions,
    ) -> Result<Self> {
        let (a, k, theta) = (&spec.a, spec.k(), spec.theta());
        let x = &outcome.x;
        let alpha = norms::dual_2k_norm(x, k)?;
        let beta = x.l1_norm();
        if theta == 0.0 {
            let lambda = 1.0 / norms::kyfan_2k_norm(a, k)?;
            return Self::new(a, a.clone(), alpha, beta, lambda);
        }
        let y = outcome.spectral_subgradient.scale(1.0 / outcome.objective);
        let dual = norms::dual_combined_norm_with(a, spec.params, dual_opts)?;
        Self::new(a, y, alpha, beta, 1.0 / dual.value)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    /// Conditions (i) to (iv), in order.
    pub conditions: Vec<ConditionResult>,
    /// Differentiability of `‖·‖_{k,2}` at `Y`; when it holds the solution is unique.
    pub differentiable: bool,
    /// All of (i) to (iv) hold. Failing does not prove `X` suboptimal.
    pub certified: bool,
}

impl CertificateReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Evaluates the sufficient optimality conditions for `X`:
///
/// * (i) `Y + Z = A` and `‖Y‖_{k,2} = θ⁻¹‖Z‖∞`,
/// * (ii) `X ∈ α ∂‖Y‖_{k,2}`,
/// * (iii) `X ∈ β ∂‖Z‖∞`,
/// * (iv) `α + θβ = λ`.
///
/// Residuals are relative; each passes when it is at most `tol`.
pub fn certificate_check(
    spec: &ProblemSpec,
    x: &Matrix,
    cert: &Certificate,
    tol: f64,
) -> Result<CertificateReport> {
    let (a, k, theta) = (&spec.a, spec.k(), spec.theta());
    if x.shape() != a.shape() || cert.y.shape() != a.shape() || cert.z.shape() != a.shape() {
        return Err(Error::ShapeMismatch("certificate and problem differ in shape".into()));
    }
    if !(cert.alpha >= 0.0) || !(cert.beta >= 0.0) {
        return Err(Error::InvalidArgument("alpha and beta must be nonnegative".into()));
    }
    let mut conditions = Vec::with_capacity(4);
    let mut push = |name: &str, residual: f64, detail: String| {
        conditions.push(ConditionResult {
            name: name.to_string(),
            residual,
            passed: residual <= tol,
            detail,
        });
    };

    // (i)
    let split = cert.y.add(&cert.z)?.sub(a)?.frobenius_norm() / a.frobenius_norm();
    let y_norm = norms::kyfan_2k_norm(&cert.y, k)?;
    let z_inf = cert.z.linf_norm();
    let (balance, detail) = if theta > 0.0 {
        let rhs = z_inf / theta;
        (
            (y_norm - rhs).abs() / y_norm.max(rhs).max(f64::MIN_POSITIVE),
            format!("‖Y‖_(k,2) = {y_norm:.10e}, ‖Z‖∞/θ = {rhs:.10e}"),
        )
    } else {
        (
            z_inf / a.linf_norm(),
            format!("θ = 0 needs Z = 0; ‖Z‖∞ = {z_inf:.3e}"),
        )
    };
    push("i", split.max(balance), detail);

    // (ii)
    if cert.alpha > 0.0 && cert.y.frobenius_norm() > 0.0 {
        let g = x.scale(1.0 / cert.alpha);
        let r = subdiff::matrix_subgrad_report(&cert.y, &g, k, tol, tol)?;
        push(
            "ii",
            r.max_violation().max(0.0),
            format!(
                "t = {}, s = {}, leading {:.2e}, cross {:.2e}, off-span {:.2e}, ‖T‖ = {:.6}, tr T = {:.6}",
                r.partition.t, r.partition.s, r.leading, r.cross, r.off_span, r.t_spectral_norm, r.t_trace
            ),
        );
    } else {
        push("ii", f64::INFINITY, "α = 0 or Y = 0".into());
    }

    // (iii)
    let x_l1 = x.l1_norm();
    if theta == 0.0 {
        push("iii", 0.0, "vacuous at θ = 0".into());
    } else if z_inf > 0.0 && x_l1 > 0.0 {
        // ⟨X, Z⟩ = ‖X‖₁‖Z‖∞ exactly when X is supported on the extreme
        // entries of Z with matching signs.
        let holder = 1.0 - x.inner(&cert.z)? / (x_l1 * z_inf);
        let beta_gap = (cert.beta - x_l1).abs() / x_l1;
        push(
            "iii",
            holder.max(beta_gap).max(0.0),
            format!("Hölder gap {holder:.3e}, |β − ‖X‖₁|/‖X‖₁ = {beta_gap:.3e}"),
        );
    } else {
        push("iii", f64::INFINITY, "Z = 0 or X = 0".into());
    }

    // (iv)
    let total = cert.alpha + theta * cert.beta;
    push(
        "iv",
        (total - cert.lambda).abs() / cert.lambda.abs().max(f64::MIN_POSITIVE),
        format!("α + θβ = {total:.10e}, λ = {:.10e}", cert.lambda),
    );

    let differentiable = if cert.y.frobenius_norm() > 0.0 {
        subdiff::is_differentiable(&cert.y, k, tol)?
    } else {
        false
    };
    let certified = conditions.iter().all(|c| c.passed);
    Ok(CertificateReport {
        conditions,
        differentiable,
        certified,
    })
}
