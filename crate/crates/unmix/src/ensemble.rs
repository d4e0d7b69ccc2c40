//! Bayesian model averaging over non-negative least squares fits.
//!
//! The model space is every singleton plus a seeded uniform sample of
//! distinct larger subsets (all of them, when the space is small enough to
//! enumerate). Each subset gets an NNLS fit and a BIC score; posterior
//! weights are the softmax of `-BIC/2` and the reported abundances are the
//! weight-averaged coefficients. The quadratic variant reruns the
//! procedure on a library augmented with pairwise interaction columns
//! built from the strongest first-stage materials.

use crate::linalg::{mat_vec, norm2, Matrix};
use crate::solvers::{nnls, rmse_of, AbundanceModel, InteractionTerm, Technique};
use crate::spectra::{SpectralLibrary, Spectrum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashSet;
use std::time::Instant;
use thiserror::Error;

/// Ensemble abundances at or above this enter the reported support. Looser
/// than the solver threshold because weighted averages accumulate many tiny
/// contributions.
pub const ENSEMBLE_SUPPORT_EPS: f64 = 1e-6;

/// RSS floor that keeps the BIC log finite on exact fits.
const RSS_FLOOR: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("interaction pair ({0}, {1}) listed twice")]
    DuplicatePair(usize, usize),
    #[error("interaction pair ({i}, {j}) invalid for a library of {n} spectra (need i <= j < n)")]
    InvalidPair { i: usize, j: usize, n: usize },
}

/// Configuration for the model-averaging ensembles.
#[derive(Debug, Clone)]
pub struct BmaConfig {
    /// Largest sampled subset size.
    pub max_subset_size: usize,
    /// Total number of ensembled models, singletons included.
    pub n_models: usize,
    pub seed: u64,
    /// How many first-stage materials feed the interaction pairs of the
    /// quadratic variant.
    pub top_t_for_pairs: usize,
    /// Weights are floored here before renormalization.
    pub weight_floor: f64,
}

impl Default for BmaConfig {
    fn default() -> Self {
        BmaConfig {
            max_subset_size: 5,
            n_models: 10_000,
            seed: 0,
            top_t_for_pairs: 15,
            weight_floor: 1e-12,
        }
    }
}

/// One ensembled NNLS fit.
#[derive(Debug, Clone)]
pub struct WeightedModel {
    /// Column indices of the fitted subset, ascending.
    pub support: Vec<usize>,
    /// NNLS coefficients aligned to `support`.
    pub abundances: Vec<f64>,
    pub bic: f64,
    /// Posterior weight in [0, 1]; weights over an ensemble sum to 1.
    pub weight: f64,
}

/// A full ensemble over one design matrix.
#[derive(Debug, Clone)]
pub struct BmaEnsemble {
    pub models: Vec<WeightedModel>,
    /// Weight-averaged coefficients, full design length.
    pub averaged: Vec<f64>,
}

/// Bayesian information criterion of a subset fit:
/// `m ln(RSS/m) + k ln(m)` with `m` bands and `k = support` size. The RSS
/// is floored to keep the logarithm finite on exact fits.
pub fn bic_of_fit(
    y: &[f64],
    lib: &SpectralLibrary,
    support: &[usize],
    abundances: &[f64],
) -> f64 {
    let sub = lib.columns().select_columns(support);
    let yhat = mat_vec(&sub, abundances).expect("support coefficients");
    let rss: f64 = y
        .iter()
        .zip(&yhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    bic_from_rss(rss, y.len(), support.len())
}

fn bic_from_rss(rss: f64, bands: usize, k: usize) -> f64 {
    let m = bands as f64;
    m * (rss.max(RSS_FLOOR) / m).ln() + k as f64 * m.ln()
}

/// How many subsets of sizes `2..=max_size` an `n`-column design admits,
/// capped at `limit + 1` to keep the arithmetic tame.
fn subset_space_size(n: usize, max_size: usize, limit: usize) -> usize {
    let mut total: u128 = 0;
    let cap = (limit as u128) + 1;
    for k in 2..=max_size.min(n) {
        // C(n, k) incrementally.
        let mut c: u128 = 1;
        for i in 0..k {
            c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
            if c >= cap {
                return limit + 1;
            }
        }
        total = total.saturating_add(c);
        if total >= cap {
            return limit + 1;
        }
    }
    total as usize
}

fn enumerate_subsets(n: usize, max_size: usize, out: &mut Vec<Vec<usize>>) {
    let mut current = Vec::new();
    fn recurse(
        start: usize,
        n: usize,
        max_size: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() >= 2 {
            out.push(current.clone());
        }
        if current.len() == max_size {
            return;
        }
        for j in start..n {
            current.push(j);
            recurse(j + 1, n, max_size, current, out);
            current.pop();
        }
    }
    recurse(0, n, max_size, &mut current, out);
}

/// Draws `count` distinct subsets of sizes `2..=max_size`, uniform size
/// then uniform subset of that size.
fn sample_subsets(
    n: usize,
    max_size: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let max_size = max_size.min(n);
    let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let attempt_cap = count.saturating_mul(100).max(1000);
    while out.len() < count && attempts < attempt_cap {
        attempts += 1;
        let k = rng.random_range(2..=max_size);
        let mut subset: Vec<usize> = Vec::with_capacity(k);
        while subset.len() < k {
            let j = rng.random_range(0..n);
            if !subset.contains(&j) {
                subset.push(j);
            }
        }
        subset.sort_unstable();
        if seen.insert(subset.clone()) {
            out.push(subset);
        }
    }
    out
}

/// Runs the BMA procedure over the columns of `design`.
pub fn bma_ensemble_over(design: &Matrix, y: &[f64], cfg: &BmaConfig) -> BmaEnsemble {
    let n = design.cols;
    let mut subsets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let remaining = cfg.n_models.saturating_sub(n);
    if remaining > 0 && n >= 2 && cfg.max_subset_size >= 2 {
        let space = subset_space_size(n, cfg.max_subset_size, remaining);
        if space <= remaining {
            enumerate_subsets(n, cfg.max_subset_size.min(n), &mut subsets);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            subsets.extend(sample_subsets(n, cfg.max_subset_size, remaining, &mut rng));
        }
    }

    // Fit every subset; order is fixed before fitting, so the outcome does
    // not depend on scheduling.
    let fits: Vec<(Vec<f64>, f64)> = subsets
        .par_iter()
        .map(|subset| {
            let sub = design.select_columns(subset);
            let coeffs = match nnls(&sub, y) {
                Ok(fit) => fit.coeffs,
                // The cap error carries the best feasible iterate.
                Err(crate::solvers::SolverError::IterationCap { best, .. }) => best,
                Err(_) => vec![0.0; subset.len()],
            };
            let yhat = mat_vec(&sub, &coeffs).expect("subset fit");
            let rss: f64 = y
                .iter()
                .zip(&yhat)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let bic = bic_from_rss(rss, y.len(), subset.len());
            (coeffs, bic)
        })
        .collect();

    let bic_min = fits
        .iter()
        .map(|(_, b)| *b)
        .fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = fits
        .iter()
        .map(|(_, b)| (-0.5 * (b - bic_min)).exp().max(cfg.weight_floor))
        .collect();
    let total: f64 = raw.iter().sum();

    let mut averaged = vec![0.0; n];
    let mut models = Vec::with_capacity(subsets.len());
    for (subset, ((coeffs, bic), w_raw)) in subsets.into_iter().zip(fits.into_iter().zip(raw)) {
        let weight = w_raw / total;
        for (&j, &c) in subset.iter().zip(&coeffs) {
            averaged[j] += weight * c;
        }
        models.push(WeightedModel {
            support: subset,
            abundances: coeffs,
            bic,
            weight,
        });
    }
    BmaEnsemble { models, averaged }
}

fn support_of(averaged: &[f64]) -> Vec<usize> {
    averaged
        .iter()
        .enumerate()
        .filter(|(_, &a)| a >= ENSEMBLE_SUPPORT_EPS)
        .map(|(i, _)| i)
        .collect()
}

/// Model averaging over NNLS fits on the plain library.
pub fn unmix_bma(y: &[f64], lib: &SpectralLibrary, cfg: &BmaConfig) -> AbundanceModel {
    let t0 = Instant::now();
    let ensemble = bma_ensemble_over(lib.columns(), y, cfg);
    let reconstruction = mat_vec(lib.columns(), &ensemble.averaged).expect("averaged length");
    let support = support_of(&ensemble.averaged);
    AbundanceModel {
        technique: Technique::Bma,
        model_size: support.len(),
        support,
        rmse: rmse_of(y, &reconstruction),
        abundances: ensemble.averaged,
        reconstruction,
        elapsed: t0.elapsed().as_secs_f64(),
        converged: true,
        used_fallback: false,
        interactions: Vec::new(),
    }
}

/// Appends one interaction column per pair: the elementwise product
/// `s_i * s_j`, rescaled to the mean Euclidean norm of its factors so
/// interaction coefficients stay comparable with linear ones. A zero
/// product column (disjoint supports) is kept as zeros.
pub fn build_quadratic_features(
    lib: &SpectralLibrary,
    pairs: &[(usize, usize)],
) -> Result<SpectralLibrary, EnsembleError> {
    let n = lib.n_spectra();
    let mut seen = HashSet::new();
    for &(i, j) in pairs {
        if i > j || j >= n {
            return Err(EnsembleError::InvalidPair { i, j, n });
        }
        if !seen.insert((i, j)) {
            return Err(EnsembleError::DuplicatePair(i, j));
        }
    }
    let mut spectra: Vec<Spectrum> = (0..n).map(|j| lib.spectrum(j)).collect();
    for &(i, j) in pairs {
        let a = lib.column(i);
        let b = lib.column(j);
        let mut prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let prod_norm = norm2(&prod);
        if prod_norm > 0.0 {
            let target = 0.5 * (norm2(&a) + norm2(&b));
            let scale = target / prod_norm;
            prod.iter_mut().for_each(|v| *v *= scale);
        }
        let name = format!("{} × {}", lib.names()[i], lib.names()[j]);
        spectra.push(Spectrum {
            name,
            wavelengths: lib.grid().to_vec(),
            values: prod,
        });
    }
    SpectralLibrary::from_spectra(&spectra).map_err(|_| EnsembleError::InvalidPair {
        i: 0,
        j: 0,
        n,
    })
}

/// Two-stage model averaging with quadratic interaction terms.
///
/// Stage one is plain BMA. Stage two takes the strongest stage-one
/// materials, augments the library with all their pairwise interaction
/// columns, and reruns the ensemble. Linear coefficients report as
/// material abundances; interaction coefficients report separately.
pub fn unmix_bma_q(y: &[f64], lib: &SpectralLibrary, cfg: &BmaConfig) -> AbundanceModel {
    let t0 = Instant::now();
    let stage1 = bma_ensemble_over(lib.columns(), y, cfg);

    let mut ranked: Vec<usize> = (0..lib.n_spectra())
        .filter(|&i| stage1.averaged[i] > 0.0)
        .collect();
    ranked.sort_by(|&a, &b| {
        stage1.averaged[b]
            .partial_cmp(&stage1.averaged[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    ranked.truncate(cfg.top_t_for_pairs);
    ranked.sort_unstable();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (pos, &i) in ranked.iter().enumerate() {
        for &j in &ranked[pos + 1..] {
            pairs.push((i, j));
        }
    }

    if pairs.is_empty() {
        // Degenerate pair set: identical to the plain ensemble.
        let reconstruction = mat_vec(lib.columns(), &stage1.averaged).expect("averaged length");
        let support = support_of(&stage1.averaged);
        return AbundanceModel {
            technique: Technique::BmaQ,
            model_size: support.len(),
            support,
            rmse: rmse_of(y, &reconstruction),
            abundances: stage1.averaged,
            reconstruction,
            elapsed: t0.elapsed().as_secs_f64(),
            converged: true,
            used_fallback: false,
            interactions: Vec::new(),
        };
    }

    let augmented = build_quadratic_features(lib, &pairs).expect("pairs are valid by construction");
    let stage2 = bma_ensemble_over(augmented.columns(), y, cfg);

    let n = lib.n_spectra();
    let linear = stage2.averaged[..n].to_vec();
    let interactions: Vec<InteractionTerm> = pairs
        .iter()
        .enumerate()
        .map(|(k, &pair)| InteractionTerm {
            pair,
            strength: stage2.averaged[n + k],
        })
        .collect();

    // The reconstruction keeps the interaction contributions: it is the
    // ensemble's actual prediction of the pixel.
    let reconstruction = mat_vec(augmented.columns(), &stage2.averaged).expect("augmented length");
    let support = support_of(&linear);
    AbundanceModel {
        technique: Technique::BmaQ,
        model_size: support.len(),
        support,
        rmse: rmse_of(y, &reconstruction),
        abundances: linear,
        reconstruction,
        elapsed: t0.elapsed().as_secs_f64(),
        converged: true,
        used_fallback: false,
        interactions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{validate_library, Finding};

    fn library_from_columns(cols: &[Vec<f64>]) -> SpectralLibrary {
        let bands = cols[0].len();
        let grid: Vec<f64> = (0..bands).map(|i| 2.0 + 0.01 * i as f64).collect();
        let spectra: Vec<Spectrum> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| Spectrum::new(format!("m{j}"), grid.clone(), c.clone()).unwrap())
            .collect();
        SpectralLibrary::from_spectra(&spectra).unwrap()
    }

    #[test]
    fn bic_direct_formula_cases() {
        let lib = library_from_columns(&[vec![1.0; 50]]);
        // Perfect fit: RSS clamps to the floor.
        let y = lib.column(0);
        let bic = bic_of_fit(&y, &lib, &[0], &[1.0]);
        let expect = 50.0 * (RSS_FLOOR / 50.0).ln() + 50.0_f64.ln();
        assert!((bic - expect).abs() < 1e-9);
    }

    #[test]
    fn bic_size_penalty_is_log_bands() {
        // Equal RSS, sizes 1 vs 2 differ by ln(m).
        let m = 50;
        let b1 = bic_from_rss(0.25, m, 1);
        let b2 = bic_from_rss(0.25, m, 2);
        assert!((b2 - b1 - (m as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn bic_hand_arithmetic() {
        let rss = 0.09_f64;
        let bic = bic_from_rss(rss, 4, 2);
        // 4 ln(0.09/4) + 2 ln 4, spelled out.
        let expect = 4.0 * (0.09_f64 / 4.0).ln() + 2.0 * 4.0_f64.ln();
        assert_eq!(bic.to_bits(), expect.to_bits());
    }

    #[test]
    fn single_spectrum_reduces_to_nnls() {
        let lib = library_from_columns(&[vec![0.6, 0.8, 0.4]]);
        let y = vec![0.3, 0.4, 0.2];
        let model = unmix_bma(&y, &lib, &BmaConfig::default());
        let plain = nnls(lib.columns(), &y).unwrap();
        assert!((model.abundances[0] - plain.coeffs[0]).abs() < 1e-12);
    }

    #[test]
    fn two_spectrum_case_matches_hand_weighted_average() {
        // Orthogonal columns make every NNLS fit closed-form.
        let lib = library_from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let y = vec![0.8, 0.3];
        let cfg = BmaConfig {
            n_models: 10,
            ..BmaConfig::default()
        };
        let model = unmix_bma(&y, &lib, &cfg);

        // Hand enumeration: {0}: a=0.8, rss=0.09; {1}: a=0.3, rss=0.64;
        // {0,1}: a=(0.8,0.3), rss=0.
        let bics = [
            bic_from_rss(0.09, 2, 1),
            bic_from_rss(0.64, 2, 1),
            bic_from_rss(0.0, 2, 2),
        ];
        let bmin = bics.iter().cloned().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = bics
            .iter()
            .map(|b| (-0.5 * (b - bmin)).exp().max(cfg.weight_floor))
            .collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let expect0 = w[0] * 0.8 + w[2] * 0.8;
        let expect1 = w[1] * 0.3 + w[2] * 0.3;
        assert!((model.abundances[0] - expect0).abs() < 1e-10);
        assert!((model.abundances[1] - expect1).abs() < 1e-10);
    }

    #[test]
    fn weights_sum_to_one_and_lie_in_unit_interval() {
        let lib = library_from_columns(&[
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.2, 0.8, 0.1, 0.4],
            vec![0.1, 0.3, 0.7, 0.5],
            vec![0.4, 0.2, 0.6, 0.1],
        ]);
        let y = vec![0.5, 0.4, 0.3, 0.2];
        let cfg = BmaConfig {
            n_models: 50,
            ..BmaConfig::default()
        };
        let ensemble = bma_ensemble_over(lib.columns(), &y, &cfg);
        let total: f64 = ensemble.models.iter().map(|m| m.weight).sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!(ensemble
            .models
            .iter()
            .all(|m| (0.0..=1.0).contains(&m.weight)));
    }

    #[test]
    fn enumerable_space_is_covered_exactly_once() {
        let lib = library_from_columns(&[
            vec![0.9, 0.1, 0.3, 0.2, 0.6],
            vec![0.2, 0.8, 0.1, 0.4, 0.1],
            vec![0.1, 0.3, 0.7, 0.5, 0.2],
            vec![0.4, 0.2, 0.6, 0.1, 0.3],
            vec![0.5, 0.6, 0.2, 0.3, 0.4],
            vec![0.3, 0.4, 0.5, 0.6, 0.7],
        ]);
        let y = vec![0.4, 0.4, 0.4, 0.4, 0.4];
        let cfg = BmaConfig {
            max_subset_size: 6,
            n_models: 1000,
            ..BmaConfig::default()
        };
        let ensemble = bma_ensemble_over(lib.columns(), &y, &cfg);
        // All nonempty subsets of 6 columns.
        assert_eq!(ensemble.models.len(), 63);
        let mut seen = HashSet::new();
        for m in &ensemble.models {
            assert!(seen.insert(m.support.clone()), "duplicate {:?}", m.support);
        }
    }

    #[test]
    fn fixed_seed_is_bit_deterministic() {
        let lib = library_from_columns(&[
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.2, 0.8, 0.1, 0.4],
            vec![0.1, 0.3, 0.7, 0.5],
            vec![0.4, 0.2, 0.6, 0.1],
            vec![0.5, 0.6, 0.2, 0.3],
        ]);
        let y = vec![0.5, 0.4, 0.3, 0.2];
        let cfg = BmaConfig {
            n_models: 40,
            ..BmaConfig::default()
        };
        let a = unmix_bma(&y, &lib, &cfg);
        let b = unmix_bma(&y, &lib, &cfg);
        for (x, z) in a.abundances.iter().zip(&b.abundances) {
            assert_eq!(x.to_bits(), z.to_bits());
        }
    }

    #[test]
    fn min_bic_model_has_max_weight() {
        let lib = library_from_columns(&[
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.2, 0.8, 0.1, 0.4],
            vec![0.1, 0.3, 0.7, 0.5],
        ]);
        let y = vec![0.6, 0.3, 0.2, 0.25];
        let cfg = BmaConfig {
            n_models: 20,
            ..BmaConfig::default()
        };
        let ensemble = bma_ensemble_over(lib.columns(), &y, &cfg);
        let best = ensemble
            .models
            .iter()
            .min_by(|a, b| a.bic.partial_cmp(&b.bic).unwrap())
            .unwrap();
        for m in &ensemble.models {
            assert!(best.weight >= m.weight - 1e-15);
        }
    }

    #[test]
    fn ensemble_abundances_are_nonnegative() {
        let lib = library_from_columns(&[
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.2, 0.8, 0.1, 0.4],
            vec![0.1, 0.3, 0.7, 0.5],
            vec![0.4, 0.2, 0.6, 0.1],
        ]);
        let y = vec![-0.1, 0.4, 0.3, 0.2];
        let model = unmix_bma(&y, &lib, &BmaConfig::default());
        assert!(model.abundances.iter().all(|&a| a >= 0.0));
    }

    #[test]
    fn quadratic_features_identity_rescale() {
        let lib = library_from_columns(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]);
        let aug = build_quadratic_features(&lib, &[(0, 1)]).unwrap();
        assert_eq!(aug.n_spectra(), 3);
        assert_eq!(aug.column(2), vec![1.0, 1.0, 1.0]);
        assert_eq!(aug.names()[2], "m0 × m1");
    }

    #[test]
    fn quadratic_features_hand_rescale() {
        let lib = library_from_columns(&[vec![1.0, 2.0, 3.0], vec![2.0, 2.0, 2.0]]);
        let aug = build_quadratic_features(&lib, &[(0, 1)]).unwrap();
        let raw = [2.0, 4.0, 6.0];
        let target = 0.5 * (14.0_f64.sqrt() + 12.0_f64.sqrt());
        let raw_norm = (4.0_f64 + 16.0 + 36.0).sqrt();
        for (got, r) in aug.column(2).iter().zip(raw) {
            assert!((got - r * target / raw_norm).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_supports_give_flagged_zero_column() {
        let lib = library_from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let aug = build_quadratic_features(&lib, &[(0, 1)]).unwrap();
        assert_eq!(aug.column(2), vec![0.0, 0.0]);
        let findings = validate_library(&aug);
        assert!(findings
            .iter()
            .any(|f| matches!(f, Finding::AllZeroColumn { spectrum: 2 })));
    }

    #[test]
    fn duplicate_pair_rejected() {
        let lib = library_from_columns(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        assert!(matches!(
            build_quadratic_features(&lib, &[(0, 1), (0, 1)]),
            Err(EnsembleError::DuplicatePair(0, 1))
        ));
    }

    #[test]
    fn bma_q_single_member_top_set_equals_plain_bma() {
        // One dominant spectrum and top_t = 1: no pairs can be built.
        let lib = library_from_columns(&[vec![0.9, 0.5, 0.7], vec![0.1, 0.8, 0.3]]);
        let y = lib.column(0);
        let cfg = BmaConfig {
            n_models: 10,
            top_t_for_pairs: 1,
            ..BmaConfig::default()
        };
        let q = unmix_bma_q(&y, &lib, &cfg);
        let plain = unmix_bma(&y, &lib, &cfg);
        assert_eq!(q.abundances, plain.abundances);
        assert!(q.interactions.is_empty());
    }

    #[test]
    fn bma_q_weights_sum_to_one_with_interactions() {
        let lib = library_from_columns(&[
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.2, 0.8, 0.1, 0.4],
            vec![0.1, 0.3, 0.7, 0.5],
        ]);
        let y = vec![0.5, 0.4, 0.3, 0.2];
        let cfg = BmaConfig {
            n_models: 60,
            ..BmaConfig::default()
        };
        let model = unmix_bma_q(&y, &lib, &cfg);
        assert_eq!(model.interactions.len(), 3);
        // Stage-2 weight normalization is checked through the ensemble API.
        let aug = build_quadratic_features(&lib, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let ensemble = bma_ensemble_over(aug.columns(), &y, &cfg);
        let total: f64 = ensemble.models.iter().map(|m| m.weight).sum();
        assert!((total - 1.0).abs() <= 1e-9);
    }
}
