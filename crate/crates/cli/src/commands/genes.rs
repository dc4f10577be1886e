use std::fmt::Write as _;

use anyhow::{bail, Result};
use kyfan_core::datagen::{self, GeneExprConfig, PlantedInstance};
use kyfan_core::eval::{self, Penalty, Scaling, SweepRow, Truth, DEFAULT_MIN_RATIO};
use kyfan_core::solver::SolverOptions;
use kyfan_core::Matrix;
use rayon::prelude::*;
use serde::Serialize;

use super::mean;
use crate::bundle::Bundle;
use crate::config::{GenesConfig, RunConfig};
use crate::plot::{self, Axes, Series};

#[derive(Serialize)]
struct RunRow {
    sigma: f64,
    seed: u64,
    k: usize,
    theta: f64,
    relevance: f64,
    recovery: f64,
    biclusters: Option<usize>,
    delta1: f64,
    delta0: f64,
    iterations: usize,
    converged: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct ScoreRow {
    sigma: f64,
    k: usize,
    runs: usize,
    failed: usize,
    mean_relevance: f64,
    mean_recovery: f64,
    min_relevance: f64,
    min_recovery: f64,
    mean_biclusters: f64,
}

struct Cell {
    sigma: f64,
    seed: u64,
    inst: PlantedInstance,
}

fn instance(g: &GenesConfig, sigma: f64, seed: u64) -> kyfan_core::Result<PlantedInstance> {
    datagen::gen_gene_expression(&GeneExprConfig { sigma, seed, shuffle: g.shuffle, ..g.instance.clone() })
}

fn truth(inst: &PlantedInstance) -> Truth {
    Truth { layout: inst.observed_layout(), reference: inst.observed_signal(), scaling: Scaling::LeastSquares }
}

/// Solves one cell; the matrix is `None` when the solve failed.
fn solve_cell(cell: &Cell, k: usize, theta: f64, opts: &SolverOptions) -> (RunRow, Option<Matrix>) {
    let t = truth(&cell.inst);
    let (row, x) = match eval::sweep_point(&cell.inst.a, k, theta, &t, opts, Penalty::KyFan2k) {
        Ok((row, x)) => (row, Some(x)),
        Err(e) => (SweepRow::failed(theta, e), None),
    };
    let biclusters = x
        .as_ref()
        .and_then(|x| eval::evaluate(x, &cell.inst.a, &t, DEFAULT_MIN_RATIO).ok())
        .map(|ev| ev.found.len());
    let run = RunRow {
        sigma: cell.sigma,
        seed: cell.seed,
        k,
        theta,
        relevance: row.relevance,
        recovery: row.recovery,
        biclusters,
        delta1: row.delta1,
        delta0: row.delta0,
        iterations: row.iterations,
        converged: row.converged,
        error: row.error,
    };
    (run, x)
}

fn summarize(rows: &[RunRow], sigmas: &[f64], k: usize) -> Vec<ScoreRow> {
    sigmas
        .iter()
        .map(|&sigma| {
            let group: Vec<&RunRow> = rows.iter().filter(|r| r.sigma == sigma && r.k == k).collect();
            let ok: Vec<&RunRow> = group.iter().copied().filter(|r| r.error.is_none()).collect();
            let rel: Vec<f64> = ok.iter().map(|r| r.relevance).collect();
            let rec: Vec<f64> = ok.iter().map(|r| r.recovery).collect();
            let found: Vec<f64> = ok.iter().filter_map(|r| r.biclusters.map(|b| b as f64)).collect();
            let min = |v: &[f64]| v.iter().copied().fold(f64::NAN, f64::min);
            ScoreRow {
                sigma,
                k,
                runs: group.len(),
                failed: group.len() - ok.len(),
                mean_relevance: mean(&rel),
                mean_recovery: mean(&rec),
                min_relevance: min(&rel),
                min_recovery: min(&rec),
                mean_biclusters: mean(&found),
            }
        })
        .collect()
}

fn cells(g: &GenesConfig, sigmas: &[f64]) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for &sigma in sigmas {
        for r in 0..g.runs as u64 {
            let seed = g.seed + r;
            out.push(Cell { sigma, seed, inst: instance(g, sigma, seed)? });
        }
    }
    Ok(out)
}

fn clean(rows: &[RunRow]) -> bool {
    rows.iter().all(|r| r.error.is_none() && r.converged)
}

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let g = &cfg.genes;
    if g.sigmas.is_empty() || g.runs == 0 {
        bail!("genes grid needs at least one sigma and one run");
    }
    let grid = cells(g, &g.sigmas)?;
    let shown = Cell { sigma: g.heatmap_sigma, seed: g.seed, inst: instance(g, g.heatmap_sigma, g.seed)? };
    let reduced = match g.reduced_k {
        Some(rk) if rk == 0 || rk > g.instance.conditions.min(g.instance.genes) => {
            bail!("reduced_k = {rk} is out of range")
        }
        Some(rk) => Some((rk, cells(g, &g.reduced_sigmas)?)),
        None => None,
    };

    let runs: Vec<RunRow> = grid.par_iter().map(|c| solve_cell(c, g.k, g.theta, &cfg.solver).0).collect();
    let (shown_row, shown_x) = solve_cell(&shown, g.k, g.theta, &cfg.solver);
    let reduced_runs: Option<Vec<RunRow>> = reduced.as_ref().map(|(rk, cs)| {
        let jobs: Vec<(usize, &Cell)> = [g.k, *rk].iter().flat_map(|&k| cs.iter().map(move |c| (k, c))).collect();
        jobs.par_iter().map(|(k, c)| solve_cell(c, *k, g.theta, &cfg.solver).0).collect()
    });

    let bundle = Bundle::create(cfg)?;
    bundle.table("runs", &runs)?;
    let scores = summarize(&runs, &g.sigmas, g.k);
    bundle.table("scores", &scores)?;
    let svg = plot::line_chart(
        Axes {
            title: &format!("match scores, k = {}, theta = {}", g.k, g.theta),
            x_label: "noise level sigma",
            y_label: "mean score",
            log_x: false,
            log_y: false,
        },
        &[
            Series::new("relevance", scores.iter().map(|s| (s.sigma, s.mean_relevance)).collect()),
            Series::new("recovery", scores.iter().map(|s| (s.sigma, s.mean_recovery)).collect()),
        ],
    )?;
    bundle.plot("scores", &svg, "tables/scores.csv")?;

    // Heatmaps in the planted order, where modules show as blocks.
    let original = shown.inst.unpermute(&shown.inst.a)?;
    bundle.matrix("heatmap_original", &original)?;
    bundle.table("heatmap_run", std::slice::from_ref(&shown_row))?;
    if let Some(x) = &shown_x {
        let (_, fitted) = eval::scale_to_fit(x, &shown.inst.a)?;
        let recovered = shown.inst.unpermute(&fitted)?;
        bundle.matrix("heatmap_recovered", &recovered)?;
        let svg = plot::heatmaps(
            &format!("sigma = {}, seed = {} (planted order)", shown.sigma, shown.seed),
            &[("original", &original), ("recovered", &recovered)],
        )?;
        bundle.plot("heatmaps", &svg, "matrices/heatmap_original.txt matrices/heatmap_recovered.txt")?;
    }

    let mut report = String::new();
    let _ = writeln!(report, "{:>6} {:>10} {:>10} {:>7}", "sigma", "relevance", "recovery", "failed");
    for s in &scores {
        let _ = writeln!(report, "{:>6} {:>10.4} {:>10.4} {:>7}", s.sigma, s.mean_relevance, s.mean_recovery, s.failed);
    }
    let mut ok = clean(&runs) && clean(std::slice::from_ref(&shown_row));
    if let (Some((rk, _)), Some(rr)) = (&reduced, &reduced_runs) {
        bundle.table("reduced_runs", rr)?;
        let mut table = summarize(rr, &g.reduced_sigmas, g.k);
        table.extend(summarize(rr, &g.reduced_sigmas, *rk));
        bundle.table("reduced_scores", &table)?;
        let series: Vec<Series> = [g.k, *rk]
            .iter()
            .flat_map(|&k| {
                let of_k: Vec<&ScoreRow> = table.iter().filter(|s| s.k == k).collect();
                [
                    Series::new(format!("relevance, k = {k}"), of_k.iter().map(|s| (s.sigma, s.mean_relevance)).collect()),
                    Series::new(format!("recovery, k = {k}"), of_k.iter().map(|s| (s.sigma, s.mean_recovery)).collect()),
                ]
            })
            .collect();
        let svg = plot::line_chart(
            Axes {
                title: &format!("high-noise rerun, k = {} vs k = {rk}", g.k),
                x_label: "noise level sigma",
                y_label: "mean score",
                log_x: false,
                log_y: false,
            },
            &series,
        )?;
        bundle.plot("reduced", &svg, "tables/reduced_scores.csv")?;
        let _ = writeln!(report, "high-noise rerun:");
        for s in &table {
            let _ = writeln!(
                report,
                "  sigma {} k {:>3}: relevance {:.4} recovery {:.4} biclusters {:.1}",
                s.sigma, s.k, s.mean_relevance, s.mean_recovery, s.mean_biclusters
            );
        }
        ok &= clean(rr);
    }
    if !ok {
        let _ = writeln!(report, "warning: some runs failed or hit the iteration limit; see tables/runs.csv");
    }
    bundle.text("report.txt", &report)?;
    print!("{report}");
    println!("bundle written to {}", bundle.root().display());
    Ok(ok)
}
