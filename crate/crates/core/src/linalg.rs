//! Dense row-major matrices and a one-sided Jacobi SVD.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn min_dim(&self) -> usize {
        self.rows.min(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Matrix) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other`.
    pub fn t_matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let b_row = other.row(l);
            for (i, &a) in self.row(l).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Submatrix made of the given rows and columns, in order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Keeps the listed columns.
    pub fn columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sum of absolute values of all entries.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Largest absolute entry.
    pub fn linf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.min_dim()).map(|i| self[(i, i)]).sum()
    }

    /// `trace(selfᵀ other)`.
    pub fn inner(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Writes the plain text format: a `rows cols` header line followed by
    /// one whitespace-separated line per row.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = String::new();
        writeln!(buf, "{} {}", self.rows, self.cols).unwrap();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v:e}")).collect();
            buf.push_str(&line.join(" "));
            buf.push('\n');
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        self.write_text(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("ascii output")
    }

    pub fn read_text<R: Read>(r: R) -> Result<Matrix> {
        let mut lines = BufReader::new(r).lines();
        let header = loop {
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Parse("empty matrix file".into())),
            }
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad header {header:?}: {e}")))?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("header must be `rows cols`, got {header:?}")));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for line in lines {
            let line = line?;
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e}")))?;
                data.push(v);
            }
        }
        Matrix::from_vec(rows, cols, data)
    }

    pub fn from_text(s: &str) -> Result<Matrix> {
        Self::read_text(s.as_bytes())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.frobenius_norm()
}

pub fn l1_norm(a: &Matrix) -> f64 {
    a.l1_norm()
}

pub fn linf_norm(a: &Matrix) -> f64 {
    a.linf_norm()
}

pub fn inner(a: &Matrix, b: &Matrix) -> Result<f64> {
    a.inner(b)
}

/// Thin SVD `A = U diag(S) Vᵀ` with `p = min(m, n)` columns in `U` and `V`.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl SvdFactors {
    /// `U · diag(d) · Vᵀ` for an arbitrary spectrum `d` of length `p`.
    pub fn compose(&self, d: &[f64]) -> Matrix {
        debug_assert_eq!(d.len(), self.s.len());
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = Matrix::zeros(m, n);
        for (l, &dl) in d.iter().enumerate() {
            if dl == 0.0 {
                continue;
            }
            for i in 0..m {
                let ui = self.u[(i, l)] * dl;
                if ui == 0.0 {
                    continue;
                }
                let row = &mut out.as_mut_slice()[i * n..(i + 1) * n];
                for (j, o) in row.iter_mut().enumerate() {
                    *o += ui * self.v[(j, l)];
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.compose(&self.s)
    }
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// Full thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Singular values come out nonincreasing; each column of `U` has its first
/// nonzero entry nonnegative.
pub fn svd(a: &Matrix) -> Result<SvdFactors> {
    a.ensure_finite()?;
    if a.rows() >= a.cols() {
        Ok(jacobi_tall(a))
    } else {
        let f = jacobi_tall(&a.transpose());
        let mut out = SvdFactors {
            u: f.v,
            s: f.s,
            v: f.u,
        };
        fix_signs(&mut out);
        Ok(out)
    }
}

/// Same factorization as [`svd`], started from the right singular vectors of
/// a nearby matrix. Jacobi then needs only a sweep or two when `a` is close
/// to the matrix `prev` came from. Falls back to [`svd`] on a shape mismatch.
pub fn svd_warm(a: &Matrix, prev: &SvdFactors) -> Result<SvdFactors> {
    a.ensure_finite()?;
    let (m, n) = a.shape();
    if m >= n && prev.v.shape() == (n, n) && prev.u.rows() == m {
        Ok(jacobi_tall_from(a, Some(&prev.v)))
    } else if m < n && prev.u.shape() == (m, m) && prev.v.rows() == n {
        let f = jacobi_tall_from(&a.transpose(), Some(&prev.u));
        let mut out = SvdFactors { u: f.v, s: f.s, v: f.u };
        fix_signs(&mut out);
        Ok(out)
    } else {
        svd(a)
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

fn jacobi_tall(a: &Matrix) -> SvdFactors {
    jacobi_tall_from(a, None)
}

/// One-sided Jacobi on `A·V₀`, accumulating rotations into `V₀` (identity
/// when absent). `V₀` must be orthogonal.
fn jacobi_tall_from(a: &Matrix, v0: Option<&Matrix>) -> SvdFactors {
    let (m, n) = a.shape();
    // Column-major working copies so column pairs are contiguous.
    let (mut w, mut v): (Vec<Vec<f64>>, Vec<Vec<f64>>) = match v0 {
        None => (
            (0..n).map(|j| a.col(j)).collect(),
            (0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    e
                })
                .collect(),
        ),
        Some(v0) => {
            let av = a.matmul(v0).expect("shapes checked by caller");
            ((0..n).map(|j| av.col(j)).collect(), (0..n).map(|j| v0.col(j)).collect())
        }
    };
    let mut norms: Vec<f64> = w.iter().map(|c| dot(c, c)).collect();
    let eps = f64::EPSILON;
    // Columns below this squared norm are roundoff and are not rotated.
    let negligible = eps * eps * norms.iter().sum::<f64>();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (wp, wq) = pair_mut(&mut w, p, q);
                rotate(wp, wq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
                norms[p] = dot(&w[p], &w[p]);
                norms[q] = dot(&w[q], &w[q]);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<f64> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]).then(i.cmp(&j)));

    let smax = sig[order[0]];
    let null_tol = smax * (m.max(n) as f64) * eps;
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sv = sig[src];
        s.push(sv);
        for j in 0..n {
            vm[(j, dst)] = v[src][j];
        }
        if sv > null_tol && sv > 0.0 {
            for i in 0..m {
                u[(i, dst)] = w[src][i] / sv;
            }
        } else {
            deficient.push(dst);
        }
    }
    complete_orthonormal(&mut u, &deficient);
    let mut out = SvdFactors { u, s, v: vm };
    fix_signs(&mut out);
    out
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every
/// other column, by Gram-Schmidt against the standard basis.
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let (m, p) = u.shape();
    let mut filled: Vec<usize> = (0..p).filter(|c| !missing.contains(c)).collect();
    let mut candidate = 0;
    for &col in missing {
        loop {
            assert!(candidate < m, "ran out of basis vectors");
            let mut x = vec![0.0; m];
            x[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &f in &filled {
                    let d: f64 = (0..m).map(|i| u[(i, f)] * x[i]).sum();
                    for (i, xi) in x.iter_mut().enumerate() {
                        *xi -= d * u[(i, f)];
                    }
                }
            }
            let nrm = dot(&x, &x).sqrt();
            if nrm > 1e-6 {
                for (i, xi) in x.iter().enumerate() {
                    u[(i, col)] = xi / nrm;
                }
                filled.push(col);
                break;
            }
        }
    }
}

fn fix_signs(f: &mut SvdFactors) {
    let (m, p) = f.u.shape();
    let n = f.v.rows();
    for l in 0..p {
        let first = (0..m).map(|i| f.u[(i, l)]).find(|&x| x.abs() > 1e-14);
        if matches!(first, Some(x) if x < 0.0) {
            for i in 0..m {
                f.u[(i, l)] = -f.u[(i, l)];
            }
            for j in 0..n {
                f.v[(j, l)] = -f.v[(j, l)];
            }
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ortho_err(q: &Matrix) -> f64 {
        let g = q.t_matmul(q).unwrap();
        let p = g.rows();
        let mut e: f64 = 0.0;
        for i in 0..p {
            for j in 0..p {
                let target = if i == j { 1.0 } else { 0.0 };
                e = e.max((g[(i, j)] - target).abs());
            }
        }
        e
    }

    #[test]
    fn warm_start_matches_cold() {
        for (m, n) in [(7, 5), (5, 7), (6, 6)] {
            let a = Matrix::from_fn(m, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 + 0.1 * u8::from(i == j) as f64);
            let b = a.map(|v| v * 1.01 + 1e-3);
            let cold = svd(&b).unwrap();
            let warm = svd_warm(&b, &svd(&a).unwrap()).unwrap();
            for (x, y) in cold.s.iter().zip(&warm.s) {
                assert!((x - y).abs() < 1e-12, "{x} {y}");
            }
            let back = warm.reconstruct().sub(&b).unwrap().frobenius_norm();
            assert!(back < 1e-12, "{back}");
            assert!(ortho_err(&warm.u) < 1e-12 && ortho_err(&warm.v) < 1e-12);
            // A stale factorization of the wrong shape is ignored.
            let other = svd(&Matrix::identity(2)).unwrap();
            assert_eq!(svd_warm(&b, &other).unwrap().s, cold.s);
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let f = svd(&Matrix::identity(3)).unwrap();
        assert_eq!(f.s, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_its_own_svd() {
        let f = svd(&Matrix::from_diag(&[3.0, 2.0, 1.0])).unwrap();
        assert_eq!(f.s, vec![3.0, 2.0, 1.0]);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((f.u[(i, j)] - e).abs() < 1e-15);
                assert!((f.v[(i, j)] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unsorted_diagonal_is_sorted() {
        let f = svd(&Matrix::from_diag(&[1.0, 3.0, 2.0])).unwrap();
        assert_eq!(f.s, vec![3.0, 2.0, 1.0]);
        assert!(f.reconstruct().sub(&Matrix::from_diag(&[1.0, 3.0, 2.0])).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn rank_deficient_and_wide() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 4.0, 6.0, 8.0]]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.u.shape(), (2, 2));
        assert_eq!(f.v.shape(), (4, 2));
        assert!(f.s[1].abs() < 1e-12);
        assert!(ortho_err(&f.u) < 1e-12);
        assert!(ortho_err(&f.v) < 1e-12);
        assert!(f.reconstruct().sub(&a).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let f = svd(&Matrix::zeros(3, 2)).unwrap();
        assert_eq!(f.s, vec![0.0, 0.0]);
        assert!(ortho_err(&f.u) < 1e-12);
        assert!(ortho_err(&f.v) < 1e-12);
    }

    #[test]
    fn sign_convention() {
        let a = Matrix::from_rows(&[vec![-1.0, 0.5], vec![0.3, -2.0], vec![0.0, 1.0]]).unwrap();
        let f = svd(&a).unwrap();
        for l in 0..2 {
            let first = (0..3).map(|i| f.u[(i, l)]).find(|x| x.abs() > 1e-14).unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = Matrix::zeros(2, 2);
        a[(0, 1)] = f64::NAN;
        assert!(matches!(svd(&a), Err(Error::NonFinite)));
        assert!(Matrix::from_vec(1, 2, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn elementary_norms() {
        assert_eq!(Matrix::filled(2, 2, 1.0).l1_norm(), 4.0);
        assert_eq!(inner(&Matrix::identity(2), &Matrix::identity(2)).unwrap(), 2.0);
        let a = Matrix::from_rows(&[vec![1.0, -3.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(a.linf_norm(), 3.0);
        assert!(inner(&a, &Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let a = Matrix::from_rows(&[vec![0.1, -1.0 / 3.0], vec![1e-300, 6.02e23]]).unwrap();
        let b = Matrix::from_text(&a.to_text()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_reader_errors() {
        assert!(Matrix::from_text("").is_err());
        assert!(Matrix::from_text("2 2\n1 2\n3\n").is_err());
        assert!(Matrix::from_text("2\n1 2\n").is_err());
        assert!(Matrix::from_text("1 2\n1 x\n").is_err());
    }
}
