//! Test-side oracles written directly from the model definitions, without
//! the crate's regressor builder, partition lookup or QR solver.
#![allow(dead_code)]

use msetarx::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Cell of `x` among sorted breakpoints, 1-based, half-open `[r_{j-1}, r_j)`.
pub fn cell(breaks: &[f64], x: f64) -> usize {
    1 + breaks.iter().filter(|&&r| r <= x).count()
}

/// Mixed-radix linear index, first dimension most significant.
pub fn linear_regime(partition: &[Vec<f64>], x: &[f64]) -> usize {
    partition.iter().zip(x).fold(0, |acc, (b, &v)| acc * (b.len() + 1) + cell(b, v) - 1)
}

/// `[1, y_t, …, y_{t-p+1}, f_t, …, f_{t-q+1}]`.
pub fn regressor(y: &Matrix, f: &Matrix, t: usize, p: usize, q: usize) -> Vec<f64> {
    let mut phi = vec![1.0];
    for i in 0..p {
        phi.extend_from_slice(y.row(t - i));
    }
    for tau in 0..q {
        phi.extend_from_slice(f.row(t - tau));
    }
    phi
}

/// Solves `A X = B` by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan(a: &[Vec<f64>], b: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let k = b[0].len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(ra, rb)| [ra.clone(), rb.clone()].concat()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        let piv = m[c][c];
        m[c].iter_mut().for_each(|v| *v /= piv);
        for r in 0..n {
            if r != c && m[r][c] != 0.0 {
                let f = m[r][c];
                for j in 0..n + k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Per-regime normal-equations estimates `(ΣΦΦᵀ)⁻¹ ΣΦyᵀ` over targets
/// `s = p*..T-1` with regressor `Φ_{s-1}` and regime of `y_{s-d}`.
pub fn normal_equations(
    y: &Matrix,
    f: &Matrix,
    partition: &[Vec<f64>],
    delay: usize,
    p: usize,
    q: usize,
) -> Vec<Option<Matrix>> {
    let n_reg: usize = partition.iter().map(|b| b.len() + 1).product();
    let m = 1 + y.cols() * p + if q > 0 { f.cols() * q } else { 0 };
    let dim = y.cols();
    let mut xtx = vec![vec![vec![0.0; m]; m]; n_reg];
    let mut xty = vec![vec![vec![0.0; dim]; m]; n_reg];
    let mut counts = vec![0usize; n_reg];
    let p_star = p.max(delay).max(q);
    for s in p_star..y.rows() {
        let j = linear_regime(partition, y.row(s - delay));
        let phi = regressor(y, f, s - 1, p, q);
        counts[j] += 1;
        for a in 0..m {
            for b in 0..m {
                xtx[j][a][b] += phi[a] * phi[b];
            }
            for c in 0..dim {
                xty[j][a][c] += phi[a] * y[(s, c)];
            }
        }
    }
    (0..n_reg)
        .map(|j| {
            if counts[j] < m {
                return None;
            }
            gauss_jordan(&xtx[j], &xty[j]).map(|rows| Matrix::from_rows(&rows).unwrap())
        })
        .collect()
}

/// Random single-regime VARX data: `y_t = a0 + A y_{t-1} + B f_{t-1} + e_t`
/// with i.i.d. normal `f` and `e`, coefficients small enough to stay stable.
pub fn random_varx(seed: u64, dim: usize, kappa: usize, t_len: usize) -> (Matrix, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 0.4 / dim as f64;
    let a0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a = Matrix::from_fn(dim, dim, |_, _| rng.gen_range(-scale..scale));
    let b = Matrix::from_fn(dim, kappa, |_, _| rng.gen_range(-1.0..1.0));
    let f = Matrix::from_fn(t_len, kappa, |_, _| rng.sample(StandardNormal));
    let mut y = Matrix::zeros(t_len, dim);
    for t in 1..t_len {
        for i in 0..dim {
            let mut v = a0[i] + rng.sample::<f64, _>(StandardNormal);
            for k in 0..dim {
                v += a[(i, k)] * y[(t - 1, k)];
            }
            for k in 0..kappa {
                v += b[(i, k)] * f[(t - 1, k)];
            }
            y[(t, i)] = v;
        }
    }
    (y, f)
}
