use anyhow::{bail, Result};
use kyfan_core::norms::NormParams;
use kyfan_core::solver::{build_sdp, export_sdpa, ProblemSpec};

use super::load_instance;
use crate::bundle::Bundle;
use crate::config::RunConfig;

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let e = &cfg.export_sdpa;
    if e.file.is_empty() || e.file.contains(['/', '\\']) {
        bail!("export file name must be a plain file name, got {:?}", e.file);
    }
    let loaded = load_instance(e.source())?;
    let spec = ProblemSpec::new(loaded.a.clone(), NormParams::new(e.k, e.theta))?;
    let sdp = build_sdp(&spec)?;

    let bundle = Bundle::create(cfg)?;
    let path = bundle.root().join(&e.file);
    export_sdpa(&sdp, &path)?;
    let stem = e.file.strip_suffix(".dat-s").unwrap_or(&e.file);
    let mapping = bundle.text(&format!("{stem}.mapping.txt"), &sdp.mapping())?;
    bundle.matrix("input", &loaded.a)?;
    if sdp.transposed {
        println!("A has fewer rows than columns; exported the program for its transpose (see mapping)");
    }
    println!(
        "wrote {} ({} variables, {} blocks) and {}",
        path.display(),
        sdp.data.c.len(),
        sdp.data.block_struct.len(),
        mapping.display()
    );
    Ok(true)
}
