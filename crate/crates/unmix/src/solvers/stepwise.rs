//! Forward and backward stepwise selection driven by t-test p-values.
//!
//! Forward selection grows the model from the empty set, each round adding
//! the candidate whose coefficient is most significant in the
//! model-plus-candidate fit. Backward selection starts from the entire
//! library; while the active set is not overdetermined it eliminates
//! columns by a ridge screening rule, then removes the least significant
//! column while its p-value exceeds the removal threshold. Both finish
//! with a plain least-squares refit on the surviving set.

use super::stats::t_two_sided_p;
use super::{
    check_pixel, AbundanceModel, SolverConfig, SolverError, Technique, SUPPORT_EPS, ZERO_RSS_REL,
};
use crate::linalg::{dot, gram, mat_t_vec, mat_vec, spd_inverse, spd_solve, Matrix};
use crate::spectra::SpectralLibrary;
use std::time::Instant;

/// Ridge strength used only for the underdetermined screening phase of
/// backward selection.
const SCREEN_LAMBDA: f64 = 1e-6;

/// Forward selection stops once the refit residual norm drops below this.
const RESIDUAL_STOP: f64 = 1e-10;

/// Two-sided p-values for every coefficient of the least-squares fit of
/// `y` on `s_active`.
///
/// Standard errors come from `sigma^2 diag((S^T S)^-1)` with
/// `sigma^2 = RSS / (rows - cols)`. An exact fit makes the t-statistics
/// singular; there, retained coefficients report p = 0 and zero
/// coefficients p = 1, so selection still orders columns sensibly.
pub fn stepwise_pvalues(y: &[f64], s_active: &Matrix) -> Result<Vec<f64>, SolverError> {
    let m = s_active.rows;
    let k = s_active.cols;
    if y.len() != m {
        return Err(SolverError::PixelBandMismatch {
            pixel: y.len(),
            bands: m,
        });
    }
    if m <= k {
        return Err(SolverError::InsufficientRows { rows: m, cols: k });
    }
    let g = gram(s_active);
    let h = mat_t_vec(s_active, y)?;
    let coeffs = spd_solve(&g, &h)?;
    let yhat = mat_vec(s_active, &coeffs)?;
    let rss: f64 = y
        .iter()
        .zip(&yhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let yty = dot(y, y);
    let g_inv = spd_inverse(&g)?;
    if rss <= ZERO_RSS_REL * yty {
        // Exact fit: decide essentiality by the leave-one-column-out
        // identity RSS_without_j = RSS + a_j^2 / (G^-1)_jj: a column is
        // significant exactly when dropping it breaks the exact fit.
        return Ok((0..k)
            .map(|j| {
                let without = rss + coeffs[j] * coeffs[j] / g_inv.get(j, j);
                if without > ZERO_RSS_REL * yty {
                    0.0
                } else {
                    1.0
                }
            })
            .collect());
    }
    let df = (m - k) as f64;
    let sigma2 = rss / df;
    Ok((0..k)
        .map(|j| {
            let se = (sigma2 * g_inv.get(j, j)).sqrt();
            if se == 0.0 || !se.is_finite() {
                if coeffs[j].abs() > SUPPORT_EPS {
                    0.0
                } else {
                    1.0
                }
            } else {
                t_two_sided_p(coeffs[j] / se, df)
            }
        })
        .collect())
}

/// Least-squares refit on `subset`, shrinking it until every kept
/// coefficient is numerically nonzero. Returns the final support
/// (ascending) and the full-length coefficient vector; the coefficients on
/// the support are exactly the least-squares refit on that support.
fn refit_support(
    s: &Matrix,
    y: &[f64],
    subset: &[usize],
) -> Result<(Vec<usize>, Vec<f64>), SolverError> {
    let mut support: Vec<usize> = subset.to_vec();
    support.sort_unstable();
    loop {
        if support.is_empty() {
            return Ok((Vec::new(), vec![0.0; s.cols]));
        }
        let sub = s.select_columns(&support);
        let g = gram(&sub);
        let h = mat_t_vec(&sub, y)?;
        let coeffs = match spd_solve(&g, &h) {
            Ok(c) => c,
            Err(_) => crate::linalg::lstsq_min_norm(&sub, y, crate::linalg::DEFAULT_RCOND)?,
        };
        let kept: Vec<usize> = support
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| c.abs() > SUPPORT_EPS)
            .map(|(&j, _)| j)
            .collect();
        if kept.len() == support.len() {
            let mut full = vec![0.0; s.cols];
            for (&j, &c) in support.iter().zip(&coeffs) {
                full[j] = c;
            }
            return Ok((support, full));
        }
        support = kept;
    }
}

fn finish_stepwise(
    technique: Technique,
    lib: &SpectralLibrary,
    y: &[f64],
    subset: &[usize],
    t0: Instant,
) -> Result<AbundanceModel, SolverError> {
    let (_support, coeffs) = refit_support(lib.columns(), y, subset)?;
    Ok(AbundanceModel::from_fit(
        technique,
        lib,
        coeffs,
        y,
        SUPPORT_EPS,
        t0.elapsed().as_secs_f64(),
    ))
}

/// Forward stepwise selection.
///
/// Each round evaluates, for every absent column, the p-value of its
/// coefficient in the model-plus-candidate fit, and admits the most
/// significant candidate while its p-value is below `p_enter` (ties go to
/// the lowest library index). Stops on an exact fit, when no candidate
/// qualifies, or at `stepwise_max_size`.
pub fn unmix_fsr(
    y: &[f64],
    lib: &SpectralLibrary,
    cfg: &SolverConfig,
) -> Result<AbundanceModel, SolverError> {
    let t0 = Instant::now();
    check_pixel(y, lib)?;
    let s = lib.columns();
    let m = lib.n_bands();
    let n = lib.n_spectra();
    let mut model: Vec<usize> = Vec::new();

    loop {
        if model.len() >= cfg.stepwise_max_size || model.len() + 1 >= m {
            break;
        }
        // Residual of the current fit; the empty model predicts zero.
        let resid_norm = if model.is_empty() {
            dot(y, y).sqrt()
        } else {
            let (_, coeffs) = refit_support(s, y, &model)?;
            let yhat = mat_vec(s, &coeffs)?;
            y.iter()
                .zip(&yhat)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
        if resid_norm < RESIDUAL_STOP {
            break;
        }

        let mut best: Option<(f64, usize)> = None;
        let mut subset = model.clone();
        for cand in 0..n {
            if model.contains(&cand) {
                continue;
            }
            subset.push(cand);
            let p = match stepwise_pvalues(y, &s.select_columns(&subset)) {
                Ok(ps) => *ps.last().expect("candidate column present"),
                // A candidate collinear with the model cannot be scored.
                Err(_) => f64::INFINITY,
            };
            subset.pop();
            let better = match best {
                None => true,
                Some((best_p, _)) => p < best_p,
            };
            if better {
                best = Some((p, cand));
            }
        }
        match best {
            Some((p, cand)) if p < cfg.p_enter => model.push(cand),
            _ => break,
        }
    }

    finish_stepwise(Technique::Fsr, lib, y, &model, t0)
}

/// Backward stepwise selection.
///
/// The whole library starts active. While the active set has at least as
/// many columns as there are bands, a ridge fit at a tiny fixed strength
/// screens out the column with the smallest `|coefficient| * column norm`
/// (ties drop the highest index). Once overdetermined, the column with the
/// largest p-value is removed while that p-value exceeds `p_remove`.
pub fn unmix_bsr(
    y: &[f64],
    lib: &SpectralLibrary,
    cfg: &SolverConfig,
) -> Result<AbundanceModel, SolverError> {
    let t0 = Instant::now();
    check_pixel(y, lib)?;
    let s = lib.columns();
    let m = lib.n_bands();
    let n = lib.n_spectra();
    let norms = s.column_norms();
    let g = gram(s);
    let h = mat_t_vec(s, y)?;
    let mut active: Vec<usize> = (0..n).collect();

    let screen_drop = |active: &mut Vec<usize>, g: &Matrix, h: &[f64]| -> Result<(), SolverError> {
        let k = active.len();
        let mut gs = Matrix::zeros(k, k);
        for (pi, &i) in active.iter().enumerate() {
            for (pj, &j) in active.iter().enumerate() {
                gs.set(pi, pj, g.get(i, j));
            }
            let v = gs.get(pi, pi) + SCREEN_LAMBDA;
            gs.set(pi, pi, v);
        }
        let hs: Vec<f64> = active.iter().map(|&j| h[j]).collect();
        let coeffs = spd_solve(&gs, &hs)?;
        let mut drop_pos = 0;
        let mut drop_score = f64::INFINITY;
        for (pos, &j) in active.iter().enumerate() {
            let score = coeffs[pos].abs() * norms[j];
            // <= so equal scores drop the highest index.
            if score <= drop_score {
                drop_score = score;
                drop_pos = pos;
            }
        }
        active.remove(drop_pos);
        Ok(())
    };

    while active.len() >= m && active.len() > 1 {
        screen_drop(&mut active, &g, &h)?;
    }

    while !active.is_empty() && active.len() < m {
        match stepwise_pvalues(y, &s.select_columns(&active)) {
            Ok(ps) => {
                let mut worst_pos = 0;
                let mut worst_p = -1.0;
                for (pos, &p) in ps.iter().enumerate() {
                    // >= so ties remove the highest index.
                    if p >= worst_p {
                        worst_p = p;
                        worst_pos = pos;
                    }
                }
                if worst_p > cfg.p_remove {
                    active.remove(worst_pos);
                } else {
                    break;
                }
            }
            // Collinear survivors: fall back to one screening elimination.
            Err(_) => screen_drop(&mut active, &g, &h)?,
        }
    }

    finish_stepwise(Technique::Bsr, lib, y, &active, t0)
}
