//! Douglas-Rachford solver for
//! `min ‖X‖*_{k,2} + θ‖X‖₁  s.t. ⟨A, X⟩ ≥ 1`,
//! optimality certificates, and the equivalent SDP in SDPA sparse format.

pub mod certificate;
pub mod prox;
pub mod sdp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, svd_warm, Matrix, SvdFactors};
use crate::norms::gauge::{project_gauge2k_sorted, project_topk_sorted};
use crate::norms::{self, NormParams};

pub use certificate::{certificate_check, Certificate, CertificateReport, ConditionResult};
pub use sdp::{build_sdp, export_sdpa, parse_sdpa, SdpProblem, SdpaData, SdpaEntry};
pub use prox::{
    project_gauge2k_ball, project_halfspace, prox_dual_2k, prox_dual_kyfan_k, prox_l1,
    prox_l1_halfspace,
};

/// One instance of the recovery program: data `A` and `(k, θ)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub a: Matrix,
    pub params: NormParams,
}

impl ProblemSpec {
    pub fn new(a: Matrix, params: NormParams) -> Result<Self> {
        a.ensure_finite()?;
        params.validate_for(&a)?;
        if !a.as_slice().iter().any(|&v| v > 0.0) {
            return Err(Error::Infeasible(
                "A needs at least one positive entry for ⟨A, X⟩ ≥ 1".into(),
            ));
        }
        Ok(Self { a, params })
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn theta(&self) -> f64 {
        self.params.theta
    }
}

/// Which unitarily invariant term the objective uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralTerm {
    /// Dual Ky Fan 2-k-norm (the main model).
    DualKyFan2k,
    /// Dual Ky Fan k-norm, `max(σ₁, Σσ/k)` (the baseline).
    DualKyFanK,
}

impl SpectralTerm {
    pub fn value(self, x: &Matrix, k: usize) -> Result<f64> {
        match self {
            SpectralTerm::DualKyFan2k => norms::dual_2k_norm(x, k),
            SpectralTerm::DualKyFanK => norms::dual_kyfan_k_norm(x, k),
        }
    }

    /// Norm dual to the spectral term (the one the certificate's `Y` lives in).
    pub fn dual_value(self, y: &Matrix, k: usize) -> Result<f64> {
        match self {
            SpectralTerm::DualKyFan2k => norms::kyfan_2k_norm(y, k),
            SpectralTerm::DualKyFanK => norms::kyfan_k_norm(y, k),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Prox step; `None` means `1/‖A‖_F`.
    pub step: Option<f64>,
    pub max_iters: usize,
    /// Allowed violation of `⟨A, X⟩ ≥ 1`.
    pub feas_tol: f64,
    /// Stop once the splitting residual, relative to `‖X‖_F`, drops below this.
    pub opt_tol: f64,
    /// Douglas-Rachford relaxation in `(0, 2)`.
    pub relaxation: f64,
    /// Iterations between duality-gap evaluations and step updates.
    pub check_every: usize,
    /// Rescale the step to balance primal and dual residuals.
    pub adaptive_step: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            step: None,
            max_iters: 200_000,
            feas_tol: 1e-7,
            opt_tol: 1e-8,
            relaxation: 1.0,
            check_every: 50,
            adaptive_step: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub x: Matrix,
    pub objective: f64,
    pub iterations: usize,
    /// `‖X_spectral − X_l1‖_F / ‖X‖_F` at exit.
    pub primal_residual: f64,
    /// `⟨A, X⟩`.
    pub constraint_value: f64,
    pub converged: bool,
    /// Subgradient of the spectral term at `X` recovered from the splitting
    /// variable; the certificate's `Y` is this matrix divided by the objective.
    pub spectral_subgradient: Matrix,
    /// Lower bound on the optimal value from the dual split.
    pub lower_bound: f64,
}

impl SolveOutcome {
    pub fn relative_gap(&self) -> f64 {
        (self.objective - self.lower_bound).max(0.0) / self.objective.abs().max(f64::MIN_POSITIVE)
    }
}

const MAX_STEP_CHANGES: usize = 60;
const STEP_BALANCE: f64 = 10.0;

/// Solves the dual Ky Fan 2-k-norm program.
pub fn solve(spec: &ProblemSpec, opts: &SolverOptions) -> Result<SolveOutcome> {
    douglas_rachford(spec, opts, SpectralTerm::DualKyFan2k)
}

/// Same program with the dual Ky Fan k-norm in place of the dual 2-k-norm.
pub fn solve_kyfan_k_baseline(spec: &ProblemSpec, opts: &SolverOptions) -> Result<SolveOutcome> {
    douglas_rachford(spec, opts, SpectralTerm::DualKyFanK)
}

/// Splits the objective as `f(X) = spectral(X)` and
/// `g(X) = θ‖X‖₁ + indicator(⟨A, X⟩ ≥ 1)`; both proxes are exact.
pub fn douglas_rachford(
    spec: &ProblemSpec,
    opts: &SolverOptions,
    term: SpectralTerm,
) -> Result<SolveOutcome> {
    let a = &spec.a;
    let k = spec.k();
    let theta = spec.theta();
    let a_norm = a.frobenius_norm();
    let step = opts.step.unwrap_or(1.0 / a_norm);
    if !(step > 0.0) || !(opts.relaxation > 0.0 && opts.relaxation < 2.0) {
        return Err(Error::InvalidArgument("step must be positive and relaxation in (0, 2)".into()));
    }
    let project: fn(&[f64], usize, f64) -> Vec<f64> = match term {
        SpectralTerm::DualKyFan2k => project_gauge2k_sorted,
        SpectralTerm::DualKyFanK => project_topk_sorted,
    };
    let exact_bound = if theta == 0.0 {
        Some(1.0 / term.dual_value(a, k)?)
    } else {
        None
    };

    let mut z = a.scale(1.0 / (a_norm * a_norm));
    let mut x_l1 = z.clone();
    let mut subgrad = Matrix::zeros(a.rows(), a.cols());
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    let mut step = step;
    let mut step_changes = 0;
    let mut prev: Option<SvdFactors> = None;
    for it in 0..opts.max_iters {
        iterations = it + 1;
        // Warm starts between checkpoints; a cold factorization at each one
        // keeps roundoff in the carried rotations from building up.
        let f = match &prev {
            Some(p) if it % opts.check_every.max(1) != 0 => svd_warm(&z, p)?,
            _ => svd(&z)?,
        };
        let proj = project(&f.s, k, step);
        let shrunk: Vec<f64> = f.s.iter().zip(&proj).map(|(s, p)| (s - p).max(0.0)).collect();
        let x_spec = f.compose(&shrunk);
        // (z − x)/t = U proj(σ/t) Vᵀ ∈ ∂spectral(x).
        let reflected = x_spec.scale(2.0).sub(&z)?;
        let y = prox::prox_l1_halfspace(&reflected, a, step * theta)?;
        let diff = y.sub(&x_spec)?;
        let moved = y.sub(&x_l1)?.frobenius_norm();
        let grad_scale = z.sub(&x_spec)?.frobenius_norm();
        z.axpy(opts.relaxation, &diff)?;
        x_l1 = y;

        let x_norm = x_l1.frobenius_norm().max(f64::MIN_POSITIVE);
        residual = diff.frobenius_norm() / x_norm;
        let dual_change = moved / grad_scale.max(f64::MIN_POSITIVE);
        if residual < opts.opt_tol {
            subgrad = f.compose(&proj.iter().map(|p| p / step).collect::<Vec<_>>());
            converged = true;
            break;
        }
        prev = Some(f);
        if opts.adaptive_step
            && (it + 1) % opts.check_every == 0
            && step_changes < MAX_STEP_CHANGES
        {
            let factor = if residual > STEP_BALANCE * dual_change {
                0.5
            } else if dual_change > STEP_BALANCE * residual {
                2.0
            } else {
                1.0
            };
            if factor != 1.0 {
                // Keep the subgradient (z − y)/t fixed while changing t.
                let mut shifted = z.sub(&x_l1)?.scale(factor);
                shifted.axpy(1.0, &x_l1)?;
                z = shifted;
                step *= factor;
                step_changes += 1;
            }
        }
    }
    let x = x_l1;
    let objective = term.value(&x, k)? + theta * x.l1_norm();
    if subgrad.frobenius_norm() == 0.0 {
        let f = svd(&z)?;
        let proj = project(&f.s, k, step);
        subgrad = f.compose(&proj.iter().map(|p| p / step).collect::<Vec<_>>());
    }
    let lower_bound = match exact_bound {
        Some(lb) => lb,
        None => split_lower_bound(a, &subgrad, objective, theta, k, term)?,
    };
    let constraint_value = a.inner(&x)?;
    converged &= constraint_value >= 1.0 - opts.feas_tol;
    Ok(SolveOutcome {
        x,
        objective,
        iterations,
        primal_residual: residual,
        constraint_value,
        converged,
        spectral_subgradient: subgrad,
        lower_bound,
    })
}

/// `1 / max(‖Y‖, θ⁻¹‖A − Y‖∞)` for `Y = G/ν`, the best over a small set of
/// scalings `ν` around the current objective.
fn split_lower_bound(
    a: &Matrix,
    subgrad: &Matrix,
    objective: f64,
    theta: f64,
    k: usize,
    term: SpectralTerm,
) -> Result<f64> {
    let g_norm = term.dual_value(subgrad, k)?;
    if g_norm == 0.0 || objective <= 0.0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for scale in [1.0, 1.0 - 1e-9, 1.0 + 1e-9, 1.0 - 1e-6, 1.0 + 1e-6] {
        let nu = objective * scale;
        let y = subgrad.scale(1.0 / nu);
        let z = a.sub(&y)?;
        let split = (g_norm / nu).max(z.linf_norm() / theta);
        best = best.max(1.0 / split);
    }
    Ok(best)
}
