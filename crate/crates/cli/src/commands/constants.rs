use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use kyfan_core::recovery::{hypothesis_check, recovery_constants, BlockModel, Verdict};
use serde::Serialize;

use super::{kv, KeyValue};
use crate::bundle::Bundle;
use crate::config::{ConstantsConfig, RunConfig};

#[derive(Serialize)]
struct IntervalRow {
    theta_lo: f64,
    theta_hi: f64,
    sqrt_mn: f64,
    theta_lo_times_sqrt_mn: f64,
    theta_hi_times_sqrt_mn: f64,
}

pub fn load_model(c: &ConstantsConfig) -> Result<BlockModel> {
    let model = match c.model.as_str() {
        "biclique" => BlockModel::biclique(c.m, c.n, c.p)?,
        "single-block" => BlockModel::single_block(c.m, c.n),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read block model {path}"))?;
            if Path::new(path).extension().is_some_and(|e| e == "toml") {
                toml::from_str(&text).with_context(|| format!("parsing {path}"))?
            } else {
                serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?
            }
        }
    };
    model.validate()?;
    Ok(model)
}

/// Flattens a serializable struct of scalars into `quantity,value` rows.
fn rows_of<T: Serialize>(value: &T) -> Result<Vec<KeyValue>> {
    let serde_json::Value::Object(map) = serde_json::to_value(value)? else {
        anyhow::bail!("expected a struct");
    };
    Ok(map.iter().map(|(k, v)| kv(k, v)).collect())
}

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let c = &cfg.constants;
    let model = load_model(c)?;
    let relaxed = c.relaxed.unwrap_or_else(|| model.has_constant_signal_vectors());
    let consts = recovery_constants(&model, relaxed)?;
    let report = hypothesis_check(&model, &consts)?;

    let bundle = Bundle::create(cfg)?;
    bundle.table("params", &rows_of(&consts.params)?)?;
    let mut table = rows_of(&consts.scalars)?;
    for (name, v) in [
        ("tau_ell", consts.tau_ell),
        ("tau_u", consts.tau_u),
        ("theta_lo", consts.theta_lo),
        ("theta_hi", consts.theta_hi),
    ] {
        table.push(kv(name, v));
    }
    bundle.table("constants", &table)?;
    bundle.table("hypotheses", &report.rows)?;
    let m: usize = model.blocks.iter().map(|b| b.m).sum();
    let n: usize = model.blocks.iter().map(|b| b.n).sum();
    let sqrt_mn = ((m * n) as f64).sqrt();
    bundle.table(
        "theta_interval",
        &[IntervalRow {
            theta_lo: consts.theta_lo,
            theta_hi: consts.theta_hi,
            sqrt_mn,
            theta_lo_times_sqrt_mn: consts.theta_lo * sqrt_mn,
            theta_hi_times_sqrt_mn: consts.theta_hi * sqrt_mn,
        }],
    )?;
    bundle.text("model.json", &serde_json::to_string_pretty(&model)?)?;

    let mut text = String::new();
    let _ = writeln!(text, "model: {} ({m}x{n}, k = {}, relaxed = {relaxed})", c.model, model.k);
    for row in &table {
        let _ = writeln!(text, "  {:<16} {}", row.quantity, row.value);
    }
    let _ = writeln!(text, "hypotheses:");
    for h in &report.rows {
        let (mark, verdict) = match h.verdict {
            Verdict::Pass => (" ", "pass"),
            Verdict::Fail => ("!", "FAIL"),
            Verdict::Info => (" ", "info"),
        };
        let _ = writeln!(text, "{mark} {:<16} {:<4} lhs {:<12.6e} rhs {:<12.6e} {}", h.name, verdict, h.lhs, h.rhs, h.note);
    }
    let _ = writeln!(
        text,
        "theta interval: [{:.6}, {:.6}] = [{:.4}, {:.4}] / sqrt(mn)",
        consts.theta_lo, consts.theta_hi, consts.theta_lo * sqrt_mn, consts.theta_hi * sqrt_mn
    );
    if !report.all_pass() {
        let _ = writeln!(text, "some hypotheses fail (marked !); recovery is not guaranteed for this model");
    }
    bundle.text("report.txt", &text)?;
    print!("{text}");
    println!("bundle written to {}", bundle.root().display());
    Ok(true)
}
