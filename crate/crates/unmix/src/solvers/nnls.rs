//! Non-negative least squares by the Lawson-Hanson active-set method.
//!
//! Minimizes `||y - S a||_2` subject to `a >= 0`. Passive-set subproblems
//! are solved through the normal equations; a singular passive set falls
//! back to the SVD minimum-norm path. At convergence the KKT conditions
//! hold: the gradient vanishes on the passive set and is bounded by
//! `1e-8 * ||S^T y||_inf` on the active (zero) set.

use super::SolverError;
use crate::linalg::{cholesky, lstsq_min_norm, mat_t_vec, spd_solve, Matrix, DEFAULT_RCOND};

/// Relative KKT tolerance: scaled by `||S^T y||_inf`.
const KKT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct NnlsFit {
    pub coeffs: Vec<f64>,
    pub outer_iterations: usize,
}

fn residual(y: &[f64], s: &Matrix, x: &[f64], passive: &[usize]) -> Vec<f64> {
    let mut r = y.to_vec();
    for &j in passive {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        for i in 0..s.rows {
            r[i] -= xj * s.get(i, j);
        }
    }
    r
}

fn solve_passive(s: &Matrix, y: &[f64], passive: &[usize]) -> Result<Vec<f64>, SolverError> {
    let sub = s.select_columns(passive);
    let g = crate::linalg::gram(&sub);
    let h = mat_t_vec(&sub, y)?;
    match cholesky(&g) {
        Ok(_) => Ok(spd_solve(&g, &h)?),
        // Collinear passive set: take the minimum-norm least squares point.
        Err(_) => Ok(lstsq_min_norm(&sub, y, DEFAULT_RCOND)?),
    }
}

/// Lawson-Hanson NNLS. Errors with the best iterate when the outer loop
/// exceeds `3 * columns` additions, which only happens on pathologically
/// degenerate inputs.
pub fn nnls(s: &Matrix, y: &[f64]) -> Result<NnlsFit, SolverError> {
    if y.len() != s.rows {
        return Err(SolverError::PixelBandMismatch {
            pixel: y.len(),
            bands: s.rows,
        });
    }
    let n = s.cols;
    let sty = mat_t_vec(s, y)?;
    let tol = KKT_REL_TOL * sty.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cap = 3 * n;

    let mut x = vec![0.0; n];
    let mut in_passive = vec![false; n];
    let mut passive: Vec<usize> = Vec::new();
    let mut outer = 0;

    loop {
        let r = residual(y, s, &x, &passive);
        let w = mat_t_vec(s, &r)?;
        let mut pick = None;
        let mut w_best = tol;
        for j in 0..n {
            if !in_passive[j] && w[j] > w_best {
                w_best = w[j];
                pick = Some(j);
            }
        }
        let Some(t) = pick else { break };
        if outer >= cap {
            return Err(SolverError::IterationCap { cap, best: x });
        }
        outer += 1;
        in_passive[t] = true;
        passive.push(t);
        passive.sort_unstable();

        let mut inner = 0;
        loop {
            let z = solve_passive(s, y, &passive)?;
            if z.iter().all(|&v| v > 0.0) {
                for (k, &j) in passive.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            inner += 1;
            if inner > cap {
                // Degenerate cycling; keep the current feasible iterate.
                break;
            }
            // Step from x toward z until the first passive coordinate
            // reaches zero, then retire every coordinate that did.
            let mut alpha = f64::INFINITY;
            for (k, &j) in passive.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[j] - z[k];
                    let ratio = if denom > 0.0 { x[j] / denom } else { 0.0 };
                    if ratio < alpha {
                        alpha = ratio;
                    }
                }
            }
            for (k, &j) in passive.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
            }
            let xmax = passive.iter().fold(0.0_f64, |m, &j| m.max(x[j]));
            let zero_tol = f64::EPSILON * xmax;
            let mut retired = false;
            passive.retain(|&j| {
                if x[j] <= zero_tol {
                    x[j] = 0.0;
                    in_passive[j] = false;
                    retired = true;
                    false
                } else {
                    true
                }
            });
            if !retired {
                // Rounding kept every coordinate positive; retire the
                // smallest to guarantee progress.
                if let Some(&j_min) = passive
                    .iter()
                    .min_by(|&&a, &&b| x[a].partial_cmp(&x[b]).unwrap())
                {
                    x[j_min] = 0.0;
                    in_passive[j_min] = false;
                    passive.retain(|&j| j != j_min);
                }
            }
            if passive.is_empty() {
                break;
            }
        }
    }

    Ok(NnlsFit {
        coeffs: x,
        outer_iterations: outer,
    })
}

/// KKT residual of a candidate NNLS solution: the largest violation of
/// "gradient zero on positive coordinates, gradient <= 0 on zero
/// coordinates" for `w = S^T (y - S a)`.
pub fn nnls_kkt_residual(s: &Matrix, y: &[f64], coeffs: &[f64]) -> f64 {
    let passive: Vec<usize> = (0..s.cols).filter(|&j| coeffs[j] != 0.0).collect();
    let r = residual(y, s, coeffs, &passive);
    let w = mat_t_vec(s, &r).expect("dimensions checked by caller");
    let mut worst = 0.0_f64;
    for j in 0..s.cols {
        if coeffs[j] > 0.0 {
            worst = worst.max(w[j].abs());
        } else {
            worst = worst.max(w[j].max(0.0));
        }
    }
    worst
}
