//! Semidefinite reformulation of the recovery program and its SDPA sparse
//! (`.dat-s`) encoding.
//!
//! For `A ∈ ℝ^{m×n}` with `m ≥ n` the program is
//!
//! ```text
//! min  p + tr R + θ⟨E, Q⟩
//! s.t. kp − tr P = 0,   pI − P ⪰ 0,   [[P, −½Xᵀ], [−½X, R]] ⪰ 0,
//!      Q ≥ X,  Q ≥ −X,  ⟨A, X⟩ ≥ 1,
//! ```
//!
//! with `P` of size `n×n` and `R` of size `m×m`. Wide inputs are transposed
//! first; the flag is recorded. In SDPA form (`min cᵀx` subject to
//! `Σ F_i x_i − F_0 ⪰ 0`) the free variables are ordered `p`, the upper
//! triangle of `P` row by row, the upper triangle of `R`, then `Q` and `X`
//! row-major. Block 1 is `pI − P`, block 2 the coupling matrix, and block 3 is
//! diagonal with rows `Q − X`, `Q + X`, `⟨A, X⟩ − 1`, `kp − tr P` and
//! `tr P − kp`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::ProblemSpec;

/// One nonzero `F_matno[block](i, j) = value`, 1-based, with `i ≤ j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpaEntry {
    pub matno: usize,
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Raw SDPA data: `c`, the block structure (negative sizes are diagonal
/// blocks), and the coefficient entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaData {
    pub c: Vec<f64>,
    pub block_struct: Vec<i64>,
    pub entries: Vec<SdpaEntry>,
}

impl SdpaData {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// Writes the data in SDPA sparse format, preceded by `*` comment lines.
    pub fn to_sdpa_string(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for line in comments {
            let _ = writeln!(out, "* {line}");
        }
        let _ = writeln!(out, "{} =mDIM", self.c.len());
        let _ = writeln!(out, "{} =nBLOCK", self.block_struct.len());
        let blocks: Vec<String> = self.block_struct.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(out, "{} =bLOCKsTRUCT", blocks.join(" "));
        let c: Vec<String> = self.c.iter().map(|v| fmt_num(*v)).collect();
        let _ = writeln!(out, "{}", c.join(" "));
        for e in &self.entries {
            let _ = writeln!(out, "{} {} {} {} {}", e.matno, e.block, e.i, e.j, fmt_num(e.value));
        }
        out
    }
}

fn fmt_num(v: f64) -> String {
    // Shortest representation that parses back to the same f64.
    format!("{v:?}")
}

/// Parses SDPA sparse text. Comment lines start with `*` or `"`; separators
/// `,(){}` are treated as whitespace as the format allows.
pub fn parse_sdpa(text: &str) -> Result<SdpaData> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .skip_while(|l| l.starts_with('*') || l.starts_with('"'))
        .filter(|l| !l.is_empty());
    let clean = |l: &str| -> Vec<String> {
        l.split(|ch: char| ch.is_whitespace() || ",(){}".contains(ch))
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    };
    let bad = |what: &str| Error::Parse(format!("SDPA: {what}"));
    let first_int = |l: Option<&str>, what: &str| -> Result<i64> {
        let l = l.ok_or_else(|| bad(what))?;
        clean(l)
            .first()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(what))
    };
    let m_dim = first_int(lines.next(), "mDIM")?;
    let n_block = first_int(lines.next(), "nBLOCK")?;
    if m_dim < 0 || n_block <= 0 {
        return Err(bad("negative dimension"));
    }
    let block_struct: Vec<i64> = clean(lines.next().ok_or_else(|| bad("bLOCKsTRUCT"))?)
        .iter()
        .take(n_block as usize)
        .map(|t| t.parse().map_err(|_| bad("bLOCKsTRUCT entry")))
        .collect::<Result<_>>()?;
    if block_struct.len() != n_block as usize || block_struct.contains(&0) {
        return Err(bad("bLOCKsTRUCT length"));
    }
    let c: Vec<f64> = clean(lines.next().ok_or_else(|| bad("c vector"))?)
        .iter()
        .take(m_dim as usize)
        .map(|t| t.parse().map_err(|_| bad("c entry")))
        .collect::<Result<_>>()?;
    if c.len() != m_dim as usize {
        return Err(bad("c vector length"));
    }
    let mut entries = Vec::new();
    for l in lines {
        let t = clean(l);
        if t.len() < 5 {
            return Err(bad("entry line needs 5 fields"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad("entry index"));
        let e = SdpaEntry {
            matno: int(&t[0])?,
            block: int(&t[1])?,
            i: int(&t[2])?,
            j: int(&t[3])?,
            value: t[4].parse().map_err(|_| bad("entry value"))?,
        };
        let size = *block_struct
            .get(e.block.wrapping_sub(1))
            .ok_or_else(|| bad("block index"))?;
        let size = size.unsigned_abs() as usize;
        if e.matno > c.len() || e.i == 0 || e.j == 0 || e.i > size || e.j > size {
            return Err(bad("entry out of range"));
        }
        entries.push(e);
    }
    Ok(SdpaData {
        c,
        block_struct,
        entries,
    })
}

/// The semidefinite program together with the meaning of its variables.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub data: SdpaData,
    /// Name of each variable, e.g. `p`, `P[1,2]`, `X[3,1]` (1-based).
    pub labels: Vec<String>,
    /// Whether `A` was transposed to get `m ≥ n`.
    pub transposed: bool,
    /// Dimensions after the optional transpose.
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub theta: f64,
}

impl SdpProblem {
    /// Human-readable description of variables and blocks.
    pub fn mapping(&self) -> String {
        let (m, n) = (self.m, self.n);
        let np = n * (n + 1) / 2;
        let nr = m * (m + 1) / 2;
        let mn = m * n;
        let mut s = String::new();
        let _ = writeln!(s, "k = {}, theta = {:?}", self.k, self.theta);
        let _ = writeln!(
            s,
            "A is {m}x{n}{}",
            if self.transposed { " (input transposed so that m >= n)" } else { "" }
        );
        let _ = writeln!(s, "variables (1-based):");
        let _ = writeln!(s, "  1: p");
        let _ = writeln!(s, "  {}..={}: P, upper triangle, row by row ({n}x{n})", 2, 1 + np);
        let _ = writeln!(s, "  {}..={}: R, upper triangle, row by row ({m}x{m})", 2 + np, 1 + np + nr);
        let _ = writeln!(s, "  {}..={}: Q, row-major ({m}x{n})", 2 + np + nr, 1 + np + nr + mn);
        let _ = writeln!(s, "  {}..={}: X, row-major ({m}x{n})", 2 + np + nr + mn, 1 + np + nr + 2 * mn);
        let _ = writeln!(s, "blocks:");
        let _ = writeln!(s, "  1: pI - P >= 0 ({n}x{n})");
        let _ = writeln!(s, "  2: [[P, -X^T/2], [-X/2, R]] >= 0 ({}x{})", n + m, n + m);
        let _ = writeln!(s, "  3: diagonal, {} rows:", 2 * mn + 3);
        let _ = writeln!(s, "     1..={mn}: Q - X >= 0");
        let _ = writeln!(s, "     {}..={}: Q + X >= 0", mn + 1, 2 * mn);
        let _ = writeln!(s, "     {}: <A, X> - 1 >= 0", 2 * mn + 1);
        let _ = writeln!(s, "     {}: k p - tr P >= 0", 2 * mn + 2);
        let _ = writeln!(s, "     {}: tr P - k p >= 0", 2 * mn + 3);
        let _ = writeln!(s, "objective: p + tr R + theta * sum(Q)");
        s
    }

    pub fn to_sdpa_string(&self) -> String {
        let comments = vec![
            format!(
                "recovery program, k = {}, theta = {:?}, A {}x{}{}",
                self.k,
                self.theta,
                self.m,
                self.n,
                if self.transposed { " (transposed)" } else { "" }
            ),
        ];
        self.data.to_sdpa_string(&comments)
    }

    /// Position of `X[i, j]` (0-based, in the possibly transposed frame)
    /// among the variables (0-based).
    pub fn x_var(&self, i: usize, j: usize) -> usize {
        let (m, n) = (self.m, self.n);
        1 + n * (n + 1) / 2 + m * (m + 1) / 2 + m * n + i * n + j
    }
}

/// Assembles the semidefinite program for `spec`.
pub fn build_sdp(spec: &ProblemSpec) -> Result<SdpProblem> {
    let transposed = spec.a.rows() < spec.a.cols();
    let a: Matrix = if transposed { spec.a.transpose() } else { spec.a.clone() };
    let (m, n) = a.shape();
    let (k, theta) = (spec.k(), spec.theta());

    let mut labels = vec!["p".to_string()];
    let mut p_idx = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i..n {
            p_idx[i][j] = labels.len();
            labels.push(format!("P[{},{}]", i + 1, j + 1));
        }
    }
    let mut r_idx = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in i..m {
            r_idx[i][j] = labels.len();
            labels.push(format!("R[{},{}]", i + 1, j + 1));
        }
    }
    let q0 = labels.len();
    for i in 0..m {
        for j in 0..n {
            labels.push(format!("Q[{},{}]", i + 1, j + 1));
        }
    }
    let x0 = labels.len();
    for i in 0..m {
        for j in 0..n {
            labels.push(format!("X[{},{}]", i + 1, j + 1));
        }
    }

    let mut c = vec![0.0; labels.len()];
    c[0] = 1.0;
    for i in 0..m {
        c[r_idx[i][i]] = 1.0;
    }
    if theta != 0.0 {
        for v in &mut c[q0..x0] {
            *v = theta;
        }
    }

    let mn = m * n;
    let mut entries = Vec::new();
    let mut push = |var: Option<usize>, block: usize, i: usize, j: usize, value: f64| {
        entries.push(SdpaEntry {
            matno: var.map_or(0, |v| v + 1),
            block,
            i,
            j,
            value,
        });
    };
    // Block 1: pI − P.
    for i in 0..n {
        push(Some(0), 1, i + 1, i + 1, 1.0);
    }
    for i in 0..n {
        for j in i..n {
            push(Some(p_idx[i][j]), 1, i + 1, j + 1, -1.0);
        }
    }
    // Block 2: [[P, −½Xᵀ], [−½X, R]].
    for i in 0..n {
        for j in i..n {
            push(Some(p_idx[i][j]), 2, i + 1, j + 1, 1.0);
        }
    }
    for i in 0..m {
        for j in i..m {
            push(Some(r_idx[i][j]), 2, n + i + 1, n + j + 1, 1.0);
        }
    }
    for i in 0..m {
        for j in 0..n {
            // −½X_ij sits at (n+i, j); upper triangle stores it at (j, n+i).
            push(Some(x0 + i * n + j), 2, j + 1, n + i + 1, -0.5);
        }
    }
    // Block 3: linear rows.
    for l in 0..mn {
        push(Some(q0 + l), 3, l + 1, l + 1, 1.0);
        push(Some(x0 + l), 3, l + 1, l + 1, -1.0);
    }
    for l in 0..mn {
        push(Some(q0 + l), 3, mn + l + 1, mn + l + 1, 1.0);
        push(Some(x0 + l), 3, mn + l + 1, mn + l + 1, 1.0);
    }
    let row = 2 * mn + 1;
    push(None, 3, row, row, 1.0);
    for (l, &av) in a.as_slice().iter().enumerate() {
        if av != 0.0 {
            push(Some(x0 + l), 3, row, row, av);
        }
    }
    for (row, sign) in [(2 * mn + 2, 1.0), (2 * mn + 3, -1.0)] {
        push(Some(0), 3, row, row, sign * k as f64);
        for i in 0..n {
            push(Some(p_idx[i][i]), 3, row, row, -sign);
        }
    }

    Ok(SdpProblem {
        data: SdpaData {
            c,
            block_struct: vec![n as i64, (n + m) as i64, -((2 * mn + 3) as i64)],
            entries,
        },
        labels,
        transposed,
        m,
        n,
        k,
        theta,
    })
}

/// Writes `sdp` to `path` in SDPA sparse format.
pub fn export_sdpa(sdp: &SdpProblem, path: &Path) -> Result<()> {
    std::fs::write(path, sdp.to_sdpa_string())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::NormParams;

    #[test]
    fn scalar_problem_shape() {
        let spec = ProblemSpec::new(Matrix::filled(1, 1, 2.0), NormParams::new(1, 0.0)).unwrap();
        let sdp = build_sdp(&spec).unwrap();
        assert_eq!(sdp.data.num_vars(), 5);
        assert_eq!(sdp.data.block_struct, vec![1, 2, -5]);
        assert_eq!(sdp.labels, vec!["p", "P[1,1]", "R[1,1]", "Q[1,1]", "X[1,1]"]);
        assert_eq!(sdp.data.c, vec![1.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn wide_input_is_transposed() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let sdp = build_sdp(&ProblemSpec::new(a, NormParams::new(1, 0.5)).unwrap()).unwrap();
        assert!(sdp.transposed);
        assert_eq!((sdp.m, sdp.n), (3, 2));
        assert_eq!(sdp.labels[sdp.x_var(2, 0)], "X[3,1]");
        assert!(sdp.mapping().contains("transposed"));
    }

    #[test]
    fn round_trip() {
        let a = Matrix::from_rows(&[vec![1.0, 0.25], vec![0.1, 3.0], vec![0.0, 0.7]]).unwrap();
        let sdp = build_sdp(&ProblemSpec::new(a, NormParams::new(2, 0.1)).unwrap()).unwrap();
        let text = sdp.to_sdpa_string();
        let back = parse_sdpa(&text).unwrap();
        assert_eq!(back, sdp.data);
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_sdpa("").is_err());
        assert!(parse_sdpa("2\n1\n2\n1 2\n0 1 3 1 1.0\n").is_err());
        assert!(parse_sdpa("1\n1\n2\n1\n0 1 1 x 1.0\n").is_err());
    }
}
