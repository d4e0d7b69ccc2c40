//! Dense numerical kernel shared by every solver.
//!
//! Row-major matrices over `f64`, matrix-vector products, Cholesky solves
//! for symmetric positive definite systems, and rank-tolerant minimum-norm
//! least squares via a Golub-Reinsch SVD. Library sizes stay small (at most
//! a few thousand spectra by a few hundred bands), so there is no sparse
//! storage and no attempt at blocking.
//!
//! All functions are pure; shared read-only inputs can be used from many
//! threads at once.

use thiserror::Error;

/// Singular values below `rcond * sigma_max` are treated as zero when no
/// explicit cutoff is supplied.
pub const DEFAULT_RCOND: f64 = 1e-10;

/// A Cholesky pivot at or below this fraction of the largest diagonal entry
/// means the matrix is not positive definite within working precision.
const SPD_PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },
    #[error("matrix is not positive definite: pivot {pivot:e} at column {col}")]
    NotPositiveDefinite { col: usize, pivot: f64 },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    /// # Panics
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must match dimensions");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row slices; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix::new(r, c, data)
    }

    /// Builds a matrix from column slices (each column a vector of length `rows`).
    pub fn from_cols(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for i in 0..r {
                m.set(i, j, col[i]);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// New matrix keeping only the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    /// Euclidean norm of each column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut norms = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            for (j, &v) in row.iter().enumerate() {
                norms[j] += v * v;
            }
        }
        norms.iter().map(|s| s.sqrt()).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `A * x`.
pub fn mat_vec(a: &Matrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if a.cols != x.len() {
        return Err(LinalgError::DimensionMismatch {
            context: "mat_vec",
            left: a.cols,
            right: x.len(),
        });
    }
    Ok((0..a.rows).map(|i| dot(a.row(i), x)).collect())
}

/// `A^T * x`.
pub fn mat_t_vec(a: &Matrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if a.rows != x.len() {
        return Err(LinalgError::DimensionMismatch {
            context: "mat_t_vec",
            left: a.rows,
            right: x.len(),
        });
    }
    let mut out = vec![0.0; a.cols];
    for i in 0..a.rows {
        let xi = x[i];
        let row = a.row(i);
        for (j, &v) in row.iter().enumerate() {
            out[j] += v * xi;
        }
    }
    Ok(out)
}

/// `A^T A`. The result is exactly symmetric: each off-diagonal entry is
/// computed once and mirrored.
pub fn gram(a: &Matrix) -> Matrix {
    let n = a.cols;
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for r in 0..a.rows {
                s += a.get(r, i) * a.get(r, j);
            }
            g.set(i, j, s);
            g.set(j, i, s);
        }
    }
    g
}

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
///
/// Only the lower triangle of `A` is read. Fails when a pivot falls at or
/// below `SPD_PIVOT_TOL` times the largest diagonal entry.
pub fn cholesky(a: &Matrix) -> Result<Matrix, LinalgError> {
    let n = a.rows;
    if a.cols != n {
        return Err(LinalgError::DimensionMismatch {
            context: "cholesky",
            left: a.rows,
            right: a.cols,
        });
    }
    let max_diag = (0..n).fold(0.0_f64, |m, i| m.max(a.get(i, i).abs()));
    let tol = SPD_PIVOT_TOL * max_diag;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            pivot -= v * v;
        }
        if pivot <= tol {
            return Err(LinalgError::NotPositiveDefinite { col: j, pivot });
        }
        let ljj = pivot.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(l)
}

fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    y
}

fn back_substitute_t(l: &Matrix, y: &[f64]) -> Vec<f64> {
    // Solves L^T x = y with L lower triangular.
    let n = l.rows;
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Solves `A x = b` for symmetric positive definite `A` via Cholesky.
pub fn spd_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if a.rows != b.len() {
        return Err(LinalgError::DimensionMismatch {
            context: "spd_solve",
            left: a.rows,
            right: b.len(),
        });
    }
    let l = cholesky(a)?;
    let y = forward_substitute(&l, b);
    Ok(back_substitute_t(&l, &y))
}

/// Inverse of a symmetric positive definite matrix, column by column from
/// its Cholesky factor. Used for coefficient standard errors.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    let n = a.rows;
    let l = cholesky(a)?;
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let y = forward_substitute(&l, &e);
        let x = back_substitute_t(&l, &y);
        for i in 0..n {
            inv.set(i, j, x[i]);
        }
        e[j] = 0.0;
    }
    Ok(inv)
}

/// Minimum-Euclidean-norm solution of `min ||A x - b||_2`.
///
/// Computed from the SVD of `A`; singular values below `rcond * sigma_max`
/// are treated as zero, which makes the solve well defined on
/// rank-deficient and overcomplete systems.
pub fn lstsq_min_norm(a: &Matrix, b: &[f64], rcond: f64) -> Result<Vec<f64>, LinalgError> {
    if a.rows != b.len() {
        return Err(LinalgError::DimensionMismatch {
            context: "lstsq_min_norm",
            left: a.rows,
            right: b.len(),
        });
    }
    let (u, s, v) = svd_thin(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let thresh = rcond * smax;
    let mut x = vec![0.0; a.cols];
    for (k, &sk) in s.iter().enumerate() {
        if sk <= 0.0 || sk < thresh {
            continue;
        }
        let mut utb = 0.0;
        for i in 0..a.rows {
            utb += u.get(i, k) * b[i];
        }
        let c = utb / sk;
        for j in 0..a.cols {
            x[j] += c * v.get(j, k);
        }
    }
    Ok(x)
}

/// Thin SVD `A = U diag(s) V^T` with `k = min(rows, cols)` columns in `U`
/// and `V` and singular values sorted in descending order.
pub fn svd_thin(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    if a.rows >= a.cols {
        svd_core(a)
    } else {
        let (u, s, v) = svd_core(&a.transpose());
        (v, s, u)
    }
}

#[inline]
fn same_sign_as(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Golub-Reinsch SVD for `rows >= cols`: Householder bidiagonalization
/// followed by implicit-shift QR on the bidiagonal form.
fn svd_core(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let m = a.rows;
    let n = a.cols;
    debug_assert!(m >= n);
    if n == 0 {
        return (Matrix::zeros(m, 0), Vec::new(), Matrix::zeros(0, 0));
    }

    let mut u = a.clone();
    let mut v = Matrix::zeros(n, n);
    let mut w = vec![0.0; n];
    let mut rv1 = vec![0.0; n];

    // Householder reduction to bidiagonal form.
    let mut g = 0.0;
    let mut scale = 0.0;
    let mut anorm: f64 = 0.0;
    let mut l = 0;
    for i in 0..n {
        l = i + 1;
        rv1[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        if i < m {
            for k in i..m {
                scale += u.get(k, i).abs();
            }
            if scale != 0.0 {
                let mut s = 0.0;
                for k in i..m {
                    let val = u.get(k, i) / scale;
                    u.set(k, i, val);
                    s += val * val;
                }
                let f = u.get(i, i);
                g = -same_sign_as(s.sqrt(), f);
                let h = f * g - s;
                u.set(i, i, f - g);
                for j in l..n {
                    let mut s2 = 0.0;
                    for k in i..m {
                        s2 += u.get(k, i) * u.get(k, j);
                    }
                    let f2 = s2 / h;
                    for k in i..m {
                        let val = u.get(k, j) + f2 * u.get(k, i);
                        u.set(k, j, val);
                    }
                }
                for k in i..m {
                    let val = u.get(k, i) * scale;
                    u.set(k, i, val);
                }
            }
        }
        w[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        if i < m && i + 1 != n {
            for k in l..n {
                scale += u.get(i, k).abs();
            }
            if scale != 0.0 {
                let mut s = 0.0;
                for k in l..n {
                    let val = u.get(i, k) / scale;
                    u.set(i, k, val);
                    s += val * val;
                }
                let f = u.get(i, l);
                g = -same_sign_as(s.sqrt(), f);
                let h = f * g - s;
                u.set(i, l, f - g);
                for k in l..n {
                    rv1[k] = u.get(i, k) / h;
                }
                for j in l..m {
                    let mut s2 = 0.0;
                    for k in l..n {
                        s2 += u.get(j, k) * u.get(i, k);
                    }
                    for k in l..n {
                        let val = u.get(j, k) + s2 * rv1[k];
                        u.set(j, k, val);
                    }
                }
                for k in l..n {
                    let val = u.get(i, k) * scale;
                    u.set(i, k, val);
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    for i in (0..n).rev() {
        if i < n - 1 {
            if g != 0.0 {
                for j in l..n {
                    v.set(j, i, (u.get(i, j) / u.get(i, l)) / g);
                }
                for j in l..n {
                    let mut s = 0.0;
                    for k in l..n {
                        s += u.get(i, k) * v.get(k, j);
                    }
                    for k in l..n {
                        let val = v.get(k, j) + s * v.get(k, i);
                        v.set(k, j, val);
                    }
                }
            }
            for j in l..n {
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        }
        v.set(i, i, 1.0);
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for i in (0..n.min(m)).rev() {
        let l2 = i + 1;
        g = w[i];
        for j in l2..n {
            u.set(i, j, 0.0);
        }
        if g != 0.0 {
            g = 1.0 / g;
            for j in l2..n {
                let mut s = 0.0;
                for k in l2..m {
                    s += u.get(k, i) * u.get(k, j);
                }
                let f = (s / u.get(i, i)) * g;
                for k in i..m {
                    let val = u.get(k, j) + f * u.get(k, i);
                    u.set(k, j, val);
                }
            }
            for j in i..m {
                let val = u.get(j, i) * g;
                u.set(j, i, val);
            }
        } else {
            for j in i..m {
                u.set(j, i, 0.0);
            }
        }
        let val = u.get(i, i) + 1.0;
        u.set(i, i, val);
    }

    // Diagonalize the bidiagonal form by implicit-shift QR with deflation.
    let eps = f64::EPSILON;
    const MAX_SWEEPS: usize = 75;
    for k in (0..n).rev() {
        for _its in 0..MAX_SWEEPS {
            // Test for splitting; rv1[0] is structurally zero.
            let mut flag = true;
            let mut lo = k;
            loop {
                if lo == 0 || rv1[lo].abs() <= eps * anorm {
                    flag = false;
                    break;
                }
                if w[lo - 1].abs() <= eps * anorm {
                    break;
                }
                lo -= 1;
            }
            if flag {
                // Cancel rv1[lo..=k] when w[lo-1] is negligible.
                let mut c = 0.0;
                let mut s = 1.0;
                for i in lo..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if f.abs() <= eps * anorm {
                        break;
                    }
                    let gg = w[i];
                    let h = f.hypot(gg);
                    w[i] = h;
                    let h_inv = 1.0 / h;
                    c = gg * h_inv;
                    s = -f * h_inv;
                    for j in 0..m {
                        let y = u.get(j, lo - 1);
                        let z = u.get(j, i);
                        u.set(j, lo - 1, y * c + z * s);
                        u.set(j, i, z * c - y * s);
                    }
                }
            }
            let z = w[k];
            if lo == k {
                // Converged; enforce a nonnegative singular value.
                if z < 0.0 {
                    w[k] = -z;
                    for j in 0..n {
                        let val = -v.get(j, k);
                        v.set(j, k, val);
                    }
                }
                break;
            }
            // One implicit-shift QR sweep.
            let mut x = w[lo];
            let nm = k - 1;
            let y0 = w[nm];
            let g0 = rv1[nm];
            let h0 = rv1[k];
            let mut f = ((y0 - z) * (y0 + z) + (g0 - h0) * (g0 + h0)) / (2.0 * h0 * y0);
            let gg = f.hypot(1.0);
            f = ((x - z) * (x + z) + h0 * ((y0 / (f + same_sign_as(gg, f))) - h0)) / x;
            let mut c = 1.0;
            let mut s = 1.0;
            for j in lo..=nm {
                let i = j + 1;
                let mut gq = rv1[i];
                let mut yq = w[i];
                let mut hq = s * gq;
                gq *= c;
                let mut zq = f.hypot(hq);
                rv1[j] = zq;
                c = f / zq;
                s = hq / zq;
                f = x * c + gq * s;
                gq = gq * c - x * s;
                hq = yq * s;
                yq *= c;
                for jj in 0..n {
                    let xv = v.get(jj, j);
                    let zv = v.get(jj, i);
                    v.set(jj, j, xv * c + zv * s);
                    v.set(jj, i, zv * c - xv * s);
                }
                zq = f.hypot(hq);
                w[j] = zq;
                if zq != 0.0 {
                    let zi = 1.0 / zq;
                    c = f * zi;
                    s = hq * zi;
                }
                f = c * gq + s * yq;
                x = c * yq - s * gq;
                for jj in 0..m {
                    let yu = u.get(jj, j);
                    let zu = u.get(jj, i);
                    u.set(jj, j, yu * c + zu * s);
                    u.set(jj, i, zu * c - yu * s);
                }
            }
            rv1[lo] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }

    // Sort singular values in descending order, permuting U and V columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[j].partial_cmp(&w[i]).unwrap());
    let mut u_sorted = Matrix::zeros(m, n);
    let mut v_sorted = Matrix::zeros(n, n);
    let mut s_sorted = vec![0.0; n];
    for (new, &old) in order.iter().enumerate() {
        s_sorted[new] = w[old];
        for i in 0..m {
            u_sorted.set(i, new, u.get(i, old));
        }
        for i in 0..n {
            v_sorted.set(i, new, v.get(i, old));
        }
    }
    (u_sorted, s_sorted, v_sorted)
}
