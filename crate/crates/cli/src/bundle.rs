//! Output bundle layout:
//!
//! ```text
//! <out>/config.snapshot   full configuration, re-runnable with --config
//! <out>/tables/*.csv      every number behind every plot
//! <out>/plots/*.svg       derived views, tagged with the config hash
//! <out>/matrices/*.txt    matrices in the plain text format
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kyfan_core::Matrix;
use serde::Serialize;

use crate::config::RunConfig;

pub struct Bundle {
    root: PathBuf,
    hash: String,
}

impl Bundle {
    pub fn create(cfg: &RunConfig) -> Result<Self> {
        let root = cfg.out.clone();
        for sub in ["tables", "plots", "matrices"] {
            fs::create_dir_all(root.join(sub))
                .with_context(|| format!("creating {}", root.join(sub).display()))?;
        }
        fs::write(root.join("config.snapshot"), cfg.snapshot()?)?;
        Ok(Self { root, hash: cfg.hash()? })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn table<R: Serialize>(&self, name: &str, rows: &[R]) -> Result<PathBuf> {
        let path = self.root.join("tables").join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn matrix(&self, name: &str, m: &Matrix) -> Result<PathBuf> {
        let path = self.root.join("matrices").join(format!("{name}.txt"));
        fs::write(&path, m.to_text())?;
        Ok(path)
    }

    /// Writes an SVG rendered by [`crate::plot`], adding a comment that names
    /// the config hash and the twin table.
    pub fn plot(&self, name: &str, svg: &str, data: &str) -> Result<PathBuf> {
        let path = self.root.join("plots").join(format!("{name}.svg"));
        let tag = format!("<!-- config-sha256: {} data: {} -->\n", self.hash, data);
        let body = match svg.find("<svg") {
            Some(i) => format!("{}{}{}", &svg[..i], tag, &svg[i..]),
            None => format!("{tag}{svg}"),
        };
        fs::write(&path, body)?;
        Ok(path)
    }

    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, body)?;
        Ok(path)
    }
}
