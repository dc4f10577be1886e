//! Writes the SDP cross-check instances as `.dat-s` files plus a manifest.
//! Solve them with `tools/sdp_oracle.py` to refresh
//! `tests/fixtures/sdp_oracle.json`.
//!
//! Usage: cargo run -p kyfan-core --example sdp_fixtures -- <out-dir>

use std::path::PathBuf;

use kyfan_core::norms::NormParams;
use kyfan_core::solver::{build_sdp, ProblemSpec};
use kyfan_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).expect("output directory"));
    std::fs::create_dir_all(&out).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut instances = Vec::new();

    let mut cases: Vec<(String, Matrix, usize, f64)> = vec![
        ("scalar".into(), Matrix::filled(1, 1, 2.5), 1, 0.0),
        ("diag3".into(), Matrix::from_diag(&[3.0, 2.0, 1.0]), 2, 0.1),
    ];
    let combos = [(1, 0.0), (1, 0.1), (1, 1.0), (2, 0.0), (2, 0.1), (2, 1.0)];
    for idx in 0..30 {
        let (k, theta) = combos[idx % combos.len()];
        let m = rng.gen_range(2..=8);
        let n = rng.gen_range(2..=8);
        let a = if idx % 2 == 0 {
            Matrix::from_fn(m, n, |_, _| rng.gen::<f64>())
        } else {
            // Two planted blocks plus sparse noise.
            let (hm, hn) = (m / 2, n / 2);
            Matrix::from_fn(m, n, |i, j| {
                let on = (i < hm) == (j < hn);
                let base = if on { 1.0 } else { 0.0 };
                base + if rng.gen::<f64>() < 0.3 { rng.gen::<f64>() * 0.5 } else { 0.0 }
            })
        };
        cases.push((format!("r{idx:02}"), a, k, theta));
    }

    for (name, a, k, theta) in cases {
        let spec = ProblemSpec::new(a.clone(), NormParams::new(k, theta)).unwrap();
        let text = build_sdp(&spec).unwrap().to_sdpa_string();
        let file = out.join(format!("{name}.dat-s"));
        std::fs::write(&file, &text).unwrap();
        let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
        instances.push(serde_json::json!({
            "name": name,
            "k": k,
            "theta": theta,
            "a": a,
            "file": file.file_name().unwrap().to_string_lossy(),
            "sha256": hash,
        }));
    }
    let manifest = serde_json::json!({ "instances": instances });
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap())
        .unwrap();
}
