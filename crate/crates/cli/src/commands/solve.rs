use std::fmt::Write as _;

use anyhow::Result;
use kyfan_core::eval::{self, DEFAULT_MIN_RATIO};
use kyfan_core::norms::NormParams;
use kyfan_core::solver::{self, certificate_check, Certificate, ProblemSpec};

use super::{kv, load_instance, KeyValue};
use crate::bundle::Bundle;
use crate::config::RunConfig;
use crate::plot;

pub const ZERO_THETA_NOTE: &str = "theta = 0: with no l1 term the program finds a k-approximation of the matrix \
     (its leading k singular directions), not a sparse bicluster";

#[derive(serde::Serialize)]
struct ConditionRow {
    condition: String,
    residual: f64,
    passed: bool,
    detail: String,
}

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let sc = &cfg.solve;
    let loaded = load_instance(sc.source())?;
    let spec = ProblemSpec::new(loaded.a.clone(), NormParams::new(sc.k, sc.theta))?;
    let out = if sc.baseline {
        solver::solve_kyfan_k_baseline(&spec, &cfg.solver)?
    } else {
        solver::solve(&spec, &cfg.solver)?
    };
    let cert = if sc.baseline {
        None
    } else {
        Some(Certificate::from_outcome(&spec, &out).and_then(|c| certificate_check(&spec, &out.x, &c, sc.cert_tol)))
    };

    let bundle = Bundle::create(cfg)?;
    let threshold = eval::threshold_detect(&out.x, DEFAULT_MIN_RATIO);
    let support = out.x.map(|v| if v.abs() > threshold.value { 1.0 } else { 0.0 });
    let found = eval::extract_biclusters(&eval::apply_threshold(&out.x, threshold.value));

    let mut summary: Vec<KeyValue> = vec![
        kv("source", &loaded.origin),
        kv("rows", loaded.a.rows()),
        kv("cols", loaded.a.cols()),
        kv("k", sc.k),
        kv("theta", sc.theta),
        kv("penalty", if sc.baseline { "kyfan_k" } else { "kyfan_2k" }),
        kv("objective", out.objective),
        kv("lower_bound", out.lower_bound),
        kv("relative_gap", out.relative_gap()),
        kv("iterations", out.iterations),
        kv("converged", out.converged),
        kv("primal_residual", out.primal_residual),
        kv("constraint_value", out.constraint_value),
        kv("threshold", threshold.value),
        kv("threshold_gap_found", threshold.gap_found),
        kv("support_size", support.as_slice().iter().filter(|v| **v > 0.0).count()),
        kv("biclusters", found.len()),
    ];
    if let Some(truth) = loaded.truth() {
        match eval::evaluate(&out.x, &loaded.a, &truth, DEFAULT_MIN_RATIO) {
            Ok(ev) => {
                summary.push(kv("relevance", ev.relevance));
                summary.push(kv("recovery", ev.recovery));
                summary.push(kv("delta1", ev.deltas.delta1));
                summary.push(kv("delta0", ev.deltas.delta0));
            }
            Err(e) => summary.push(kv("evaluation_error", e)),
        }
    }
    match &cert {
        Some(Ok(report)) => {
            summary.push(kv("certified", report.certified));
            summary.push(kv("differentiable", report.differentiable));
            let rows: Vec<ConditionRow> = report
                .conditions
                .iter()
                .map(|c| ConditionRow {
                    condition: c.name.clone(),
                    residual: c.residual,
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect();
            bundle.table("certificate", &rows)?;
        }
        Some(Err(e)) => summary.push(kv("certificate_error", e)),
        None => summary.push(kv("certificate", "not available for the Ky Fan k penalty")),
    }
    bundle.table("summary", &summary)?;

    bundle.matrix("input", &loaded.a)?;
    bundle.matrix("solution", &out.x)?;
    bundle.matrix("support", &support)?;
    let svg = plot::heatmaps("data and solution", &[("A", &loaded.a), ("X", &out.x)])?;
    bundle.plot("solution", &svg, "matrices/input.txt matrices/solution.txt")?;

    let mut report = String::new();
    for row in &summary {
        let _ = writeln!(report, "{:<20} {}", row.quantity, row.value);
    }
    for (i, b) in found.clusters.iter().enumerate() {
        let _ = writeln!(report, "bicluster {}: rows {:?} cols {:?}", i + 1, b.rows, b.cols);
    }
    if sc.theta == 0.0 {
        let _ = writeln!(report, "note: {ZERO_THETA_NOTE}");
    }
    if !out.converged {
        let _ = writeln!(report, "warning: iteration limit reached before convergence");
    }
    bundle.text("report.txt", &report)?;
    print!("{report}");
    println!("bundle written to {}", bundle.root().display());
    Ok(out.converged)
}
