//! Small dense linear-algebra kernel.
//!
//! Everything here works on [`Matrix`], a row-major real matrix. The sizes in
//! this crate are tiny (tens of rows and columns for coefficient problems, a
//! few thousand rows for regression designs), so the routines favour
//! robustness and readability over blocking or SIMD.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
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
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
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

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest elementwise absolute difference; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Copies `block` into `self` with its top-left corner at (`row`, `col`).
    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
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

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares solution of `X Θ ≈ B` (minimises the Frobenius norm of the
/// residual) by Householder QR with column pivoting.
///
/// Rank deficiency is reported as [`Error::RankDeficient`] carrying the
/// numerical rank; no pseudo-inverse is attempted.
pub fn least_squares_solve(x: &Matrix, b: &Matrix) -> Result<Matrix> {
    let (n, m) = x.shape();
    if b.rows() != n {
        return Err(Error::Shape(format!(
            "design has {} rows but right-hand side has {}",
            n,
            b.rows()
        )));
    }
    if m == 0 || n < m {
        return Err(Error::Shape(format!(
            "least squares needs rows >= cols > 0, got {}x{}",
            n, m
        )));
    }
    if !x.is_finite() || !b.is_finite() {
        return Err(Error::Domain("non-finite entry in least-squares input".into()));
    }

    let k = b.cols();
    let mut a = x.clone();
    let mut rhs = b.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut col_norms: Vec<f64> = (0..m)
        .map(|j| (0..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>())
        .collect();

    let mut rank_tol = 0.0;
    let mut rank = m;
    for j in 0..m {
        // Pivot the remaining column with the largest norm into position j.
        let (piv, _) = col_norms[j..]
            .iter()
            .enumerate()
            .fold((j, -1.0), |(bi, bv), (off, &v)| {
                if v > bv {
                    (j + off, v)
                } else {
                    (bi, bv)
                }
            });
        if piv != j {
            for i in 0..n {
                let tmp = a[(i, j)];
                a[(i, j)] = a[(i, piv)];
                a[(i, piv)] = tmp;
            }
            col_norms.swap(j, piv);
            perm.swap(j, piv);
        }

        let norm = (j..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt();
        if j == 0 {
            rank_tol = norm * (n.max(m) as f64) * f64::EPSILON * 10.0;
        }
        if norm <= rank_tol || norm == 0.0 {
            rank = j;
            break;
        }

        let alpha = if a[(j, j)] > 0.0 { -norm } else { norm };
        // Householder vector v = x - alpha e1, stored in column j below the diagonal.
        let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for c in j + 1..m {
                let s: f64 = (j..n).map(|i| v[i - j] * a[(i, c)]).sum::<f64>() * 2.0 / vnorm2;
                for i in j..n {
                    a[(i, c)] -= s * v[i - j];
                }
            }
            for c in 0..k {
                let s: f64 =
                    (j..n).map(|i| v[i - j] * rhs[(i, c)]).sum::<f64>() * 2.0 / vnorm2;
                for i in j..n {
                    rhs[(i, c)] -= s * v[i - j];
                }
            }
        }
        a[(j, j)] = alpha;
        for i in j + 1..n {
            a[(i, j)] = 0.0;
        }
        // Downdate the trailing column norms, recomputing when cancellation bites.
        for c in j + 1..m {
            let r = a[(j, c)];
            col_norms[c] -= r * r;
            if col_norms[c] < 1e-10 * (rank_tol * rank_tol + 1.0) {
                col_norms[c] = (j + 1..n).map(|i| a[(i, c)] * a[(i, c)]).sum();
            }
        }
    }
    if rank < m {
        return Err(Error::RankDeficient { rank, cols: m });
    }

    // Back substitution R z = Q^T B, then undo the column permutation.
    let mut z = Matrix::zeros(m, k);
    for c in 0..k {
        for i in (0..m).rev() {
            let mut s = rhs[(i, c)];
            for jj in i + 1..m {
                s -= a[(i, jj)] * z[(jj, c)];
            }
            z[(i, c)] = s / a[(i, i)];
        }
    }
    let mut theta = Matrix::zeros(m, k);
    for (pos, &orig) in perm.iter().enumerate() {
        theta.row_mut(orig).copy_from_slice(z.row(pos));
    }
    Ok(theta)
}

/// Cholesky factor `L` (lower triangular, `L Lᵀ = M`) of a symmetric
/// positive definite matrix.
pub fn cholesky(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "cholesky of non-square {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Numeric(format!(
                "matrix not positive definite at pivot {}",
                j
            )));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ X = B` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = l.rows();
    if b.rows() != n {
        return Err(Error::Shape(format!(
            "factor is {}x{} but right-hand side has {} rows",
            n,
            n,
            b.rows()
        )));
    }
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    Ok(x)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (ascending) and the matrix whose columns are the
/// corresponding orthonormal eigenvectors.
pub fn symmetric_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !m.is_square() {
        return Err(Error::Shape("symmetric_eigen needs a square matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::Domain("non-finite entry in symmetric_eigen".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= f64::EPSILON * scale * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Tolerance used when deciding whether a symmetric matrix is positive
/// semidefinite: eigenvalues down to `-PSD_TOL * max(1, |M|_max)` are
/// accepted as rounding noise.
pub const PSD_TOL: f64 = 1e-10;

/// Smallest eigenvalue of a symmetric matrix, or `None` if it is not symmetric.
pub fn min_symmetric_eigenvalue(m: &Matrix) -> Result<Option<f64>> {
    if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
        return Ok(None);
    }
    let (vals, _) = symmetric_eigen(m)?;
    Ok(Some(vals.first().copied().unwrap_or(0.0)))
}

/// A square-root factor `S` with `S Sᵀ = M` for a symmetric positive
/// semidefinite `M`. Built from the eigen-decomposition so singular
/// covariances are handled; tiny negative eigenvalues are clamped to zero.
pub fn psd_sqrt(m: &Matrix) -> Result<Matrix> {
    match min_symmetric_eigenvalue(m)? {
        None => return Err(Error::Config("covariance matrix not symmetric".into())),
        Some(lmin) if lmin < -PSD_TOL * m.max_abs().max(1.0) => {
            return Err(Error::Config(format!(
                "covariance not PSD (eigenvalue {})",
                lmin
            )))
        }
        _ => {}
    }
    let (vals, vecs) = symmetric_eigen(m)?;
    let n = m.rows();
    Ok(Matrix::from_fn(n, n, |i, j| vecs[(i, j)] * vals[j].max(0.0).sqrt()))
}

/// A complex eigenvalue as (real, imaginary) parts.
pub type Eigenvalue = (f64, f64);

/// Balances `a` in place (Parlett–Reinsch scaling by powers of two).
fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Reduces `a` in place to upper-Hessenberg form by stabilised elementary
/// similarity transforms, zeroing everything below the subdiagonal.
fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for j in 0..n {
                let t = a[(j, piv)];
                a[(j, piv)] = a[(j, m)];
                a[(j, m)] = t;
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        a[(i, j)] -= y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] += y * a[(j, i)];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[(i, j)] = 0.0;
        }
    }
}

/// Eigenvalues of an upper-Hessenberg matrix by the Francis double-shift QR
/// iteration. Uses 1-based indexing internally to mirror the classic EISPACK
/// formulation.
fn hessenberg_qr(h: &Matrix, max_iter: usize) -> Result<Vec<Eigenvalue>> {
    let n = h.rows();
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[(i, j)];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }

    let mut total_iter = 0usize;
    let mut nn = n as isize;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= f64::EPSILON * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[nu - 1][nu - 1];
                let mut w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nu - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if total_iter >= max_iter {
                        return Err(Error::Numeric(format!(
                            "shifted QR did not converge within {} iterations",
                            max_iter
                        )));
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 1..=nu {
                            a[i][i] -= x;
                        }
                        let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    total_iter += 1;

                    let mut m = nu - 2;
                    let (mut p, mut q, mut r);
                    loop {
                        let z = a[m][m];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - rr - ss;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u <= f64::EPSILON * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nu {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                let mut pp = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    pp += r * a[k + 2][j];
                                    a[k + 2][j] -= pp * z;
                                }
                                a[k + 1][j] -= pp * y;
                                a[k][j] -= pp * x;
                            }
                            let mmin = nu.min(k + 3);
                            for i in l..=mmin {
                                let mut pp = x * a[i][k] + y * a[i][k + 1];
                                if k != nu - 1 {
                                    pp += z * a[i][k + 2];
                                    a[i][k + 2] -= pp * r;
                                }
                                a[i][k + 1] -= pp * q;
                                a[i][k] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l as isize >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// All eigenvalues of a real square matrix: balancing, reduction to
/// upper-Hessenberg form, then shifted QR with at most `100·n` iterations.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Eigenvalue>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigenvalues of non-square {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Domain("non-finite entry in eigenvalue input".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_qr(&a, 100 * n.max(1))
}

/// Moduli of all eigenvalues of `m`, sorted descending.
///
/// `tol` is the relative tolerance of the power-iteration fallback used when
/// the QR iteration fails to converge.
pub fn eigen_moduli(m: &Matrix, tol: f64) -> Result<Vec<f64>> {
    let _ = validate_tol(tol)?;
    let mut moduli: Vec<f64> = eigenvalues(m)?
        .into_iter()
        .map(|(re, im)| re.hypot(im))
        .collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(moduli)
}

fn validate_tol(tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", tol)));
    }
    Ok(tol)
}

/// Spectral radius (largest eigenvalue modulus) of a square matrix.
///
/// The QR route is tried first; if it does not converge, a power iteration
/// is run and its estimate returned when it settles to within `tol`. If both
/// fail, the error names the fallback that was attempted.
pub fn spectral_radius(m: &Matrix, tol: f64) -> Result<f64> {
    validate_tol(tol)?;
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "spectral radius of non-square {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Ok(0.0);
    }
    match eigen_moduli(m, tol) {
        Ok(moduli) => Ok(moduli[0]),
        Err(Error::Numeric(qr_msg)) => {
            let start: Vec<f64> = (0..m.rows()).map(|i| 1.0 + 0.1 * i as f64).collect();
            power_iteration_radius(m, &start, 100_000, tol).map_err(|e| {
                Error::Numeric(format!(
                    "{}; power-iteration fallback also failed: {}",
                    qr_msg, e
                ))
            })
        }
        Err(e) => Err(e),
    }
}

/// Spectral-radius estimate by power iteration from `start`.
///
/// Uses the two-step growth ratio `sqrt(|M^{k+2}x| / |M^k x|)` so that a
/// dominant complex-conjugate or `±λ` pair is handled. Returns an error if the
/// estimate has not settled to within relative `tol` after `max_iter` steps.
pub fn power_iteration_radius(
    m: &Matrix,
    start: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<f64> {
    if !m.is_square() || start.len() != m.rows() {
        return Err(Error::Shape("power iteration needs square matrix and matching start".into()));
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut x = start.to_vec();
    let n0 = norm(&x);
    if n0 == 0.0 {
        return Err(Error::Domain("power iteration start vector is zero".into()));
    }
    x.iter_mut().for_each(|v| *v /= n0);
    let mut prev = f64::NAN;
    let mut estimate = 0.0;
    let mut settled = 0;
    for _ in 0..max_iter {
        let y = m.mul_vec(&x)?;
        let z = m.mul_vec(&y)?;
        let nz = norm(&z);
        if nz == 0.0 {
            return Ok(0.0);
        }
        estimate = nz.sqrt();
        x = z.into_iter().map(|v| v / nz).collect();
        if (estimate - prev).abs() <= tol * estimate.max(1e-300) {
            settled += 1;
            if settled >= 3 {
                return Ok(estimate);
            }
        } else {
            settled = 0;
        }
        prev = estimate;
    }
    if max_iter > 0 && (estimate - prev).abs() <= tol * estimate.max(1e-300) {
        return Ok(estimate);
    }
    Err(Error::Numeric(format!(
        "power iteration did not settle within {} steps (last estimate {})",
        max_iter, estimate
    )))
}
