//! Lasso by cyclic coordinate descent with soft-thresholding.
//!
//! The objective is `0.5 ||y - S a||^2 + lambda ||a||_1`, with no `1/m`
//! factor in front of the quadratic term. With the nonnegativity option the
//! soft-threshold is clamped at zero. Convergence means a full sweep moved
//! no coordinate by more than `tol`.
//!
//! Full sweeps alternate with passes over the currently nonzero set, the
//! usual coordinate-descent speedup for sparse solutions; the maintained
//! residual is refreshed from scratch periodically to shed rounding drift.

use super::SolverError;
use crate::linalg::{dot, mat_t_vec, mat_vec, Matrix};

/// Refresh the maintained residual every this many sweeps.
const RESIDUAL_REFRESH: usize = 64;

#[derive(Debug, Clone)]
pub struct LassoFit {
    pub coeffs: Vec<f64>,
    pub converged: bool,
    pub sweeps: usize,
    /// Objective value recorded after every sweep, in order.
    pub objectives: Vec<f64>,
}

#[inline]
fn soft_threshold(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

fn objective_from_state(r: &[f64], coeffs: &[f64], lambda: f64) -> f64 {
    0.5 * dot(r, r) + lambda * coeffs.iter().map(|a| a.abs()).sum::<f64>()
}

/// One coordinate-descent pass over `order`; returns the largest absolute
/// coordinate change.
fn pass(
    cols: &[Vec<f64>],
    col_sq: &[f64],
    r: &mut [f64],
    coeffs: &mut [f64],
    order: &[usize],
    lambda: f64,
    positive: bool,
) -> f64 {
    let mut max_delta = 0.0_f64;
    for &j in order {
        let cs = col_sq[j];
        if cs == 0.0 {
            continue;
        }
        let col = &cols[j];
        let old = coeffs[j];
        let cj = dot(col, r) + cs * old;
        let new = if positive {
            ((cj - lambda) / cs).max(0.0)
        } else {
            soft_threshold(cj, lambda) / cs
        };
        let delta = new - old;
        if delta != 0.0 {
            for (ri, ci) in r.iter_mut().zip(col) {
                *ri -= delta * ci;
            }
            coeffs[j] = new;
            max_delta = max_delta.max(delta.abs());
        }
    }
    max_delta
}

/// Cyclic coordinate descent for the lasso objective. `max_sweeps` caps the
/// total number of passes (full and active-set alike).
pub fn lasso_cd(
    s: &Matrix,
    y: &[f64],
    lambda: f64,
    positive: bool,
    max_sweeps: usize,
    tol: f64,
) -> Result<LassoFit, SolverError> {
    if y.len() != s.rows {
        return Err(SolverError::PixelBandMismatch {
            pixel: y.len(),
            bands: s.rows,
        });
    }
    let n = s.cols;
    let cols: Vec<Vec<f64>> = (0..n).map(|j| s.col(j)).collect();
    let col_sq: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
    let all: Vec<usize> = (0..n).collect();

    let mut coeffs = vec![0.0; n];
    let mut r = y.to_vec();
    let mut objectives = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    let mut stale = 0;

    let refresh = |r: &mut Vec<f64>, coeffs: &[f64], stale: &mut usize| {
        if *stale < RESIDUAL_REFRESH {
            return;
        }
        let sa = mat_vec(s, coeffs).expect("coefficient length");
        for (ri, (yi, si)) in r.iter_mut().zip(y.iter().zip(&sa)) {
            *ri = yi - si;
        }
        *stale = 0;
    };

    while sweeps < max_sweeps {
        refresh(&mut r, &coeffs, &mut stale);
        let max_delta = pass(&cols, &col_sq, &mut r, &mut coeffs, &all, lambda, positive);
        sweeps += 1;
        stale += 1;
        objectives.push(objective_from_state(&r, &coeffs, lambda));
        if max_delta <= tol {
            converged = true;
            break;
        }
        // Iterate the active set until it stops moving, then revisit all
        // coordinates.
        loop {
            if sweeps >= max_sweeps {
                break;
            }
            let active: Vec<usize> = (0..n).filter(|&j| coeffs[j] != 0.0).collect();
            if active.is_empty() {
                break;
            }
            refresh(&mut r, &coeffs, &mut stale);
            let md = pass(&cols, &col_sq, &mut r, &mut coeffs, &active, lambda, positive);
            sweeps += 1;
            stale += 1;
            objectives.push(objective_from_state(&r, &coeffs, lambda));
            if md <= tol {
                break;
            }
        }
    }

    Ok(LassoFit {
        coeffs,
        converged,
        sweeps,
        objectives,
    })
}

/// The lasso objective evaluated from scratch.
pub fn lasso_objective(s: &Matrix, y: &[f64], coeffs: &[f64], lambda: f64) -> f64 {
    let sa = mat_vec(s, coeffs).expect("coefficient length");
    let mut ss = 0.0;
    for (yi, si) in y.iter().zip(&sa) {
        let d = yi - si;
        ss += d * d;
    }
    0.5 * ss + lambda * coeffs.iter().map(|a| a.abs()).sum::<f64>()
}

/// Largest violation of the lasso stationarity conditions at `coeffs`,
/// with `g = S^T (S a - y)`:
///
/// - positive variant: `|g_i + lambda|` where `a_i > 0`, and
///   `max(0, -(g_i + lambda))` where `a_i = 0`;
/// - signed variant: `|g_i + lambda sign(a_i)|` on the support and
///   `max(0, |g_i| - lambda)` off it.
pub fn lasso_kkt_residual(s: &Matrix, y: &[f64], coeffs: &[f64], lambda: f64, positive: bool) -> f64 {
    let sa = mat_vec(s, coeffs).expect("coefficient length");
    let diff: Vec<f64> = sa.iter().zip(y).map(|(p, q)| p - q).collect();
    let g = mat_t_vec(s, &diff).expect("dimensions");
    let mut worst = 0.0_f64;
    for (j, &a) in coeffs.iter().enumerate() {
        let v = if positive {
            if a > 0.0 {
                (g[j] + lambda).abs()
            } else {
                (-(g[j] + lambda)).max(0.0)
            }
        } else if a > 0.0 {
            (g[j] + lambda).abs()
        } else if a < 0.0 {
            (g[j] - lambda).abs()
        } else {
            (g[j].abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}
