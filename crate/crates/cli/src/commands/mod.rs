pub mod biclique;
pub mod constants;
pub mod export;
pub mod genes;
pub mod solve;

use anyhow::{bail, Context, Result};
use kyfan_core::datagen::{self, PlantedInstance};
use kyfan_core::eval::{Scaling, Truth};
use kyfan_core::Matrix;

use crate::config::{Generator, InstanceSource};

/// The built-in demo: two noisy 2x2 blocks.
pub const DEMO: &str = include_str!("../../data/demo_4x4.txt");

/// Data matrix plus ground truth when it was generated.
pub struct Loaded {
    pub a: Matrix,
    pub planted: Option<(PlantedInstance, Scaling)>,
    pub origin: String,
}

impl Loaded {
    pub fn truth(&self) -> Option<Truth> {
        self.planted.as_ref().map(|(inst, scaling)| Truth {
            layout: inst.observed_layout(),
            reference: inst.observed_signal(),
            scaling: *scaling,
        })
    }
}

pub fn load_instance(src: InstanceSource) -> Result<Loaded> {
    let chosen = usize::from(src.input.is_some()) + usize::from(src.demo) + usize::from(src.generate.is_some());
    if chosen != 1 {
        bail!("give exactly one of an input matrix file, --demo, or a [generate] section");
    }
    if let Some(path) = src.input {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read input matrix {}", path.display()))?;
        let a = Matrix::from_text(&text).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Loaded { a, planted: None, origin: path.display().to_string() });
    }
    if src.demo {
        return Ok(Loaded { a: Matrix::from_text(DEMO)?, planted: None, origin: "built-in 4x4 demo".into() });
    }
    let (inst, scaling, origin) = match src.generate.expect("counted above") {
        Generator::Biclique(c) => (datagen::gen_biclique(c)?, Scaling::MaxEntry, "generated biclique"),
        Generator::Genes(c) => (datagen::gen_gene_expression(c)?, Scaling::LeastSquares, "generated gene expression"),
    };
    Ok(Loaded { a: inst.a.clone(), planted: Some((inst, scaling)), origin: origin.into() })
}

/// A `quantity,value` row for summary tables.
#[derive(serde::Serialize)]
pub struct KeyValue {
    pub quantity: String,
    pub value: String,
}

pub fn kv(quantity: &str, value: impl std::fmt::Display) -> KeyValue {
    KeyValue { quantity: quantity.into(), value: value.to_string() }
}

/// `0` for an empty list, otherwise the mean.
pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}
