//! Independent oracles shared by the integration and acceptance suites.
//!
//! Everything here deliberately avoids the library's own solver paths: the
//! SVD is a one-sided Jacobi instead of Golub-Reinsch, least squares goes
//! through that Jacobi pseudo-inverse, NNLS is exhaustive support
//! enumeration, and the lasso reference is plain proximal/projected
//! gradient descent.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use unmix::linalg::Matrix;

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD and the pseudo-inverse built on it
// ---------------------------------------------------------------------------

/// One-sided (Hestenes) Jacobi SVD. Rotates column pairs until all are
/// mutually orthogonal; singular values are the column norms.
pub fn jacobi_svd(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    if a.rows >= a.cols {
        jacobi_svd_tall(a)
    } else {
        let (u, s, v) = jacobi_svd_tall(&a.transpose());
        (v, s, u)
    }
}

fn jacobi_svd_tall(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let m = a.rows;
    let n = a.cols;
    let mut b = a.clone();
    let mut v = Matrix::identity(n);
    let tol = 1e-15;
    for _sweep in 0..120 {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    app += bp * bp;
                    aqq += bq * bq;
                    apq += bp * bq;
                }
                if apq.abs() <= tol * (app * aqq).sqrt() || app == 0.0 || aqq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b.set(i, p, c * bp - s * bq);
                    b.set(i, q, s * bp + c * bq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<f64> = (0..n)
        .map(|j| {
            let mut s = 0.0;
            for i in 0..m {
                let x = b.get(i, j);
                s += x * x;
            }
            s.sqrt()
        })
        .collect();
    let mut u = Matrix::zeros(m, n);
    for j in 0..n {
        if sigma[j] > 0.0 {
            for i in 0..m {
                u.set(i, j, b.get(i, j) / sigma[j]);
            }
        }
    }
    // Descending order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let mut u_s = Matrix::zeros(m, n);
    let mut v_s = Matrix::zeros(n, n);
    let mut s_s = vec![0.0; n];
    for (new, &old) in order.iter().enumerate() {
        s_s[new] = sigma[old];
        for i in 0..m {
            u_s.set(i, new, u.get(i, old));
        }
        for i in 0..n {
            v_s.set(i, new, v.get(i, old));
        }
    }
    sigma = s_s;
    (u_s, sigma, v_s)
}

/// Minimum-norm least squares through the Jacobi pseudo-inverse.
pub fn pinv_apply(a: &Matrix, b: &[f64], rcond: f64) -> Vec<f64> {
    let (u, s, v) = jacobi_svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let thresh = rcond * smax;
    let k = s.len();
    let mut x = vec![0.0; a.cols];
    for t in 0..k {
        if s[t] <= 0.0 || s[t] < thresh {
            continue;
        }
        let mut utb = 0.0;
        for i in 0..a.rows {
            utb += u.get(i, t) * b[i];
        }
        let c = utb / s[t];
        for j in 0..a.cols {
            x[j] += c * v.get(j, t);
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Exhaustive NNLS oracle
// ---------------------------------------------------------------------------

/// Global NNLS optimum by enumerating every support set, solving
/// unconstrained least squares on it, and keeping the feasible minimizer.
pub fn nnls_enumerate(s: &Matrix, y: &[f64]) -> Vec<f64> {
    let n = s.cols;
    assert!(n <= 20, "enumeration oracle is exponential in columns");
    let mut best_rss: f64 = y.iter().map(|v| v * v).sum();
    let mut best = vec![0.0; n];
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) != 0).collect();
        let sub = s.select_columns(&subset);
        let x_sub = pinv_apply(&sub, y, 1e-12);
        if x_sub.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut rss = 0.0;
        for i in 0..s.rows {
            let mut pred = 0.0;
            for (k, &j) in subset.iter().enumerate() {
                pred += s.get(i, j) * x_sub[k];
            }
            let d = y[i] - pred;
            rss += d * d;
        }
        if rss < best_rss - 1e-15 {
            best_rss = rss;
            best = vec![0.0; n];
            for (k, &j) in subset.iter().enumerate() {
                best[j] = x_sub[k].max(0.0);
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Proximal / projected gradient lasso oracle
// ---------------------------------------------------------------------------

/// Largest eigenvalue of the Gram matrix by power iteration.
pub fn gram_spectral_norm(s: &Matrix) -> f64 {
    let g = unmix::linalg::gram(s);
    let n = g.rows;
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 1e-3).collect();
    let mut lambda = 0.0;
    for _ in 0..200 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let row = g.row(i);
            w[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    lambda
}

/// Projected (nonnegative) or proximal (signed) gradient descent on the
/// lasso objective with step `1 / ||S^T S||`, run for a fixed number of
/// iterations with an early stop once the objective stalls.
pub fn pg_lasso(
    s: &Matrix,
    y: &[f64],
    lambda: f64,
    positive: bool,
    max_iters: usize,
) -> Vec<f64> {
    let n = s.cols;
    let g = unmix::linalg::gram(s);
    let sty = unmix::linalg::mat_t_vec(s, y).unwrap();
    let lip = gram_spectral_norm(s).max(1e-12) * 1.000001;
    let eta = 1.0 / lip;
    let mut x = vec![0.0; n];
    let mut last_obj = f64::INFINITY;
    for it in 0..max_iters {
        let mut grad = vec![0.0; n];
        for i in 0..n {
            let row = g.row(i);
            grad[i] = row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - sty[i];
        }
        for j in 0..n {
            if positive {
                x[j] = (x[j] - eta * (grad[j] + lambda)).max(0.0);
            } else {
                let z = x[j] - eta * grad[j];
                let t = eta * lambda;
                x[j] = if z > t {
                    z - t
                } else if z < -t {
                    z + t
                } else {
                    0.0
                };
            }
        }
        if it % 200 == 199 {
            let obj = unmix::solvers::lasso_objective(s, y, &x, lambda);
            if last_obj - obj < 1e-14 * obj.abs().max(1.0) {
                break;
            }
            last_obj = obj;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

/// Random design with entries in `lo..hi`.
pub fn random_design(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect();
    Matrix::new(rows, cols, data)
}

/// Rank-deficient matrix as a product of random factors.
pub fn random_rank_deficient(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    rank: usize,
) -> Matrix {
    let b = random_design(rng, rows, rank, -1.0, 1.0);
    let c = random_design(rng, rank, cols, -1.0, 1.0);
    let mut a = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut s = 0.0;
            for t in 0..rank {
                s += b.get(i, t) * c.get(t, j);
            }
            a.set(i, j, s);
        }
    }
    a
}

/// A vector in the null space of a rank-deficient `A = B C`: a random
/// vector with the row space of `C` projected out (Gram-Schmidt against an
/// orthonormalized copy of C's rows).
pub fn null_space_vector(c_rows: &Matrix, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = c_rows.cols;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..c_rows.rows {
        let mut w: Vec<f64> = c_rows.row(i).to_vec();
        for b in &basis {
            let d: f64 = w.iter().zip(b).map(|(a, b)| a * b).sum();
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk -= d * bk;
            }
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for wk in w.iter_mut() {
                *wk /= norm;
            }
            basis.push(w);
        }
    }
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= d * bk;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for vk in v.iter_mut() {
                *vk /= norm;
            }
            return v;
        }
    }
}

/// Dirichlet(1,...,1) draw by normalized unit exponentials, resampled
/// until every component reaches `min_component`.
pub fn dirichlet_min(rng: &mut ChaCha8Rng, k: usize, min_component: f64) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..k)
            .map(|_| {
                let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                -u.ln()
            })
            .collect();
        let total: f64 = draws.iter().sum();
        let a: Vec<f64> = draws.iter().map(|d| d / total).collect();
        if a.iter().all(|&v| v >= min_component) {
            return a;
        }
    }
}

/// `k` distinct indices below `n`.
pub fn distinct_indices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(k);
    while out.len() < k {
        let j = rng.random_range(0..n);
        if !out.contains(&j) {
            out.push(j);
        }
    }
    out.sort_unstable();
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
