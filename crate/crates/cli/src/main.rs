//! `kyfan`: biclustering experiments with the Ky Fan 2-k-norm model.
//!
//! Exit status: 0 on success, 1 when some solve hit its iteration limit or
//! failed (results are still written), 2 on usage or input errors.

mod bundle;
mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{parse_override, RunConfig};

#[derive(Parser)]
#[command(name = "kyfan", version, about = "Ky Fan 2-k-norm biclustering experiments")]
struct Cli {
    /// TOML config with one section per command; a bundle's config.snapshot works too.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output bundle directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override any config key, e.g. `--set biclique.m=30` (repeatable; applied last).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct SourceArgs {
    /// Matrix file: `rows cols` header line, then one line per row.
    input: Option<PathBuf>,
    /// Use the built-in 4x4 two-block matrix.
    #[arg(long)]
    demo: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and check its optimality certificate.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        /// Use the Ky Fan k-norm penalty instead.
        #[arg(long)]
        baseline: bool,
    },
    /// Two-biclique recovery over a grid of noise levels and θ.
    Biclique {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Noise levels, comma separated.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Noise level for the error and comparison plots.
        #[arg(long)]
        detail_p: Option<f64>,
    },
    /// Planted transcription modules over a grid of noise levels.
    Genes {
        /// Matrices per noise level.
        #[arg(long)]
        runs: Option<usize>,
        /// Also rerun the high-noise levels with this smaller k.
        #[arg(long)]
        reduced_k: Option<usize>,
    },
    /// Recovery constants, hypothesis checks and the admissible θ interval.
    Constants {
        /// `biclique`, `single-block`, or a JSON/TOML block model file.
        model: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Write the instance as an SDPA sparse semidefinite program.
    ExportSdpa {
        #[command(flatten)]
        source: SourceArgs,
        /// File name inside the bundle directory.
        #[arg(long)]
        file: Option<String>,
    },
    /// Print the effective configuration and exit.
    Config,
}

type Sets = Vec<(String, toml::Value)>;

fn push<T: Into<toml::Value>>(sets: &mut Sets, key: &str, v: Option<T>) {
    if let Some(v) = v {
        sets.push((key.to_string(), v.into()));
    }
}

fn push_source(sets: &mut Sets, section: &str, s: SourceArgs) {
    push(sets, &format!("{section}.input"), s.input.map(|p| p.to_string_lossy().into_owned()));
    push(sets, &format!("{section}.demo"), s.demo.then_some(true));
    push(sets, &format!("{section}.k"), s.k.map(|k| k as i64));
    push(sets, &format!("{section}.theta"), s.theta);
}

fn run(cli: Cli) -> Result<bool> {
    let mut sets = Sets::new();
    push(&mut sets, "out", cli.out.map(|p| p.to_string_lossy().into_owned()));
    let command = cli.command;
    let run_fn: fn(&RunConfig) -> Result<bool> = match command {
        Command::Solve { source, baseline } => {
            push_source(&mut sets, "solve", source);
            push(&mut sets, "solve.baseline", baseline.then_some(true));
            commands::solve::run
        }
        Command::Biclique { m, n, p, detail_p } => {
            push(&mut sets, "biclique.m", m.map(|v| v as i64));
            push(&mut sets, "biclique.n", n.map(|v| v as i64));
            push(&mut sets, "biclique.ps", p);
            push(&mut sets, "biclique.detail_p", detail_p);
            commands::biclique::run
        }
        Command::Genes { runs, reduced_k } => {
            push(&mut sets, "genes.runs", runs.map(|v| v as i64));
            push(&mut sets, "genes.reduced_k", reduced_k.map(|v| v as i64));
            commands::genes::run
        }
        Command::Constants { model, m, n, p } => {
            push(&mut sets, "constants.model", model);
            push(&mut sets, "constants.m", m.map(|v| v as i64));
            push(&mut sets, "constants.n", n.map(|v| v as i64));
            push(&mut sets, "constants.p", p);
            commands::constants::run
        }
        Command::ExportSdpa { source, file } => {
            push_source(&mut sets, "export_sdpa", source);
            push(&mut sets, "export_sdpa.file", file);
            commands::export::run
        }
        Command::Config => |cfg| {
            print!("{}", cfg.snapshot()?);
            Ok(true)
        },
    };
    for s in &cli.sets {
        sets.push(parse_override(s)?);
    }
    let cfg = RunConfig::load(cli.config.as_deref(), &sets)?;
    run_fn(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
