#![allow(dead_code)]

use kyfan_core::Matrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_nonneg(rng: &mut impl Rng, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| rng.gen_range(0.0..1.0))
}

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

/// Singular values from nalgebra, sorted nonincreasing.
pub fn na_singular_values(a: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Ky Fan 2-k-norm through nalgebra's SVD.
pub fn na_kyfan_2k(a: &Matrix, k: usize) -> f64 {
    na_singular_values(a)[..k].iter().map(|s| s * s).sum::<f64>().sqrt()
}

/// Pool-adjacent-violators projection onto nonincreasing sequences.
pub fn isotonic_decreasing(c: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &v in c {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a >= b {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().unwrap();
            *last = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat(v).take(n))
        .collect()
}

/// `max ⟨x, y⟩` over `{y : sum of the k largest y_i² ≤ 1}` by projected
/// gradient ascent.
///
/// After sorting `|x|`, an optimal `y` is nonincreasing and nonnegative with
/// its tail equal to `y_k`, so the problem becomes a linear objective `c`
/// over `K ∩ B`, where `K` is the monotone cone in `R^k` and `B` the unit
/// ball. Projection onto `K ∩ B` is isotonic regression followed by radial
/// scaling. The iteration `y ← P(y + c)` reaches the maximizer.
pub fn dual_gauge_oracle(x: &[f64], k: usize) -> f64 {
    let mut z: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    z.sort_by(|a, b| b.total_cmp(a));
    let mut c = z[..k - 1].to_vec();
    c.push(z[k - 1..].iter().sum());
    let project = |v: &[f64]| {
        let mut p: Vec<f64> = isotonic_decreasing(v).into_iter().map(|t| t.max(0.0)).collect();
        let nrm = p.iter().map(|t| t * t).sum::<f64>().sqrt();
        if nrm > 1.0 {
            p.iter_mut().for_each(|t| *t /= nrm);
        }
        p
    };
    let mut y = vec![0.0; k];
    for _ in 0..200 {
        let step: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a + b).collect();
        let next = project(&step);
        let moved = next.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        y = next;
        if moved < 1e-15 {
            break;
        }
    }
    y.iter().zip(&c).map(|(a, b)| a * b).sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Euclidean projection onto `{y : Σ_{i∈S} y_i² ≤ 1 for every |S| = k}`,
/// the intersection of cylinders, by Dykstra's alternating projections.
pub fn gauge_ball_projection_oracle(x: &[f64], k: usize) -> Vec<f64> {
    let sets = subsets(x.len(), k);
    let mut y = x.to_vec();
    let mut incr = vec![vec![0.0; x.len()]; sets.len()];
    for _ in 0..50_000 {
        let before = y.clone();
        for (s, p) in sets.iter().zip(incr.iter_mut()) {
            let w: Vec<f64> = y.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
            let nrm = s.iter().map(|&i| w[i] * w[i]).sum::<f64>().sqrt();
            y = w.clone();
            if nrm > 1.0 {
                for &i in s {
                    y[i] /= nrm;
                }
            }
            for i in 0..x.len() {
                p[i] = w[i] - y[i];
            }
        }
        let moved = y.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < 1e-13 {
            break;
        }
    }
    y
}

/// Central finite-difference gradient of the Ky Fan 2-k-norm, evaluated
/// with nalgebra's SVD.
pub fn fd_gradient(a: &Matrix, k: usize, h: f64) -> Matrix {
    let mut g = Matrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let mut p = a.clone();
            let mut q = a.clone();
            p[(i, j)] += h;
            q[(i, j)] -= h;
            g[(i, j)] = (na_kyfan_2k(&p, k) - na_kyfan_2k(&q, k)) / (2.0 * h);
        }
    }
    g
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
