//! Evaluation harness: RMSE, detection at the 0.1 abundance threshold,
//! regional aggregation over a region of interest, timed technique
//! comparison, and the seeded synthetic-mixture oracle used to validate
//! every solver against known ground truth.

use crate::ensemble::{unmix_bma, unmix_bma_q, BmaConfig};
use crate::linalg::mat_vec;
use crate::solvers::{
    rmse_of, unmix_bsr, unmix_fsr, unmix_lasso, unmix_nnls, unmix_ols, unmix_ridge,
    AbundanceModel, SolverConfig, SolverError, Technique,
};
use crate::spectra::{resolve_target, ObservedPixel, RegionOfInterest, SpectralLibrary, Spectrum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

/// A target counts as detected when its abundance is at least this much;
/// the bound is closed, so exactly 0.1 detects.
pub const DETECTION_THRESHOLD: f64 = 0.1;

/// Per-pixel abundances at or above `-NONNEG_SLACK` still count as
/// non-negative when reporting the sign flag.
pub const NONNEG_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("vectors have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("cannot aggregate an empty model list")]
    EmptyRegion,
    #[error("cannot aggregate mixed techniques: {0} and {1}")]
    MixedTechniques(Technique, Technique),
    #[error("mixture truth invalid: {0}")]
    InvalidTruth(String),
    #[error(transparent)]
    Spectra(#[from] crate::spectra::SpectraError),
}

/// Root mean squared error between two equal-length vectors.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64, HarnessError> {
    if y.len() != yhat.len() {
        return Err(HarnessError::LengthMismatch {
            left: y.len(),
            right: yhat.len(),
        });
    }
    Ok(rmse_of(y, yhat))
}

/// True when the model assigns the target at least the detection
/// threshold.
pub fn detect(model: &AbundanceModel, target: usize) -> bool {
    model.abundances[target] >= DETECTION_THRESHOLD
}

/// The aggregated model of one region of interest for one technique.
#[derive(Debug, Clone)]
pub struct RegionalSummary {
    pub technique: Technique,
    /// Statistical mode of the per-pixel model sizes; ties resolve to the
    /// smaller size.
    pub regional_size: usize,
    /// The `regional_size` materials appearing in the most per-pixel
    /// supports; ties resolve to the lower library index.
    pub regional_minerals: Vec<usize>,
    /// Mean abundance of each regional mineral over all pixels, zeros
    /// included where a pixel's model excludes it. Aligned with
    /// `regional_minerals`.
    pub regional_abundances: Vec<f64>,
    /// Library columns times the regional abundance vector.
    pub regional_reconstruction: Vec<f64>,
    /// Smallest RMSE between the regional reconstruction and any per-pixel
    /// reconstruction.
    pub best_rmse: f64,
    /// Detection evaluated on the regional abundance vector.
    pub target_detected: bool,
    /// True when every abundance of every pixel model is non-negative
    /// (within `NONNEG_SLACK`).
    pub all_nonneg: bool,
    /// Mean solver seconds per pixel.
    pub mean_elapsed: f64,
}

/// Aggregates per-pixel models of one technique into a regional model.
pub fn aggregate_region(
    models: &[AbundanceModel],
    lib: &SpectralLibrary,
    target: usize,
) -> Result<RegionalSummary, HarnessError> {
    let first = models.first().ok_or(HarnessError::EmptyRegion)?;
    for m in models {
        if m.technique != first.technique {
            return Err(HarnessError::MixedTechniques(first.technique, m.technique));
        }
    }
    let n_pixels = models.len() as f64;
    let n_lib = lib.n_spectra();

    // Mode of model sizes, ties to the smaller size.
    let mut size_counts: HashMap<usize, usize> = HashMap::new();
    for m in models {
        *size_counts.entry(m.model_size).or_insert(0) += 1;
    }
    let regional_size = size_counts
        .iter()
        .map(|(&size, &count)| (size, count))
        .min_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)))
        .map(|(size, _)| size)
        .unwrap_or(0);

    // Support membership counts over all pixels.
    let mut membership = vec![0usize; n_lib];
    for m in models {
        for &j in &m.support {
            membership[j] += 1;
        }
    }
    let mut by_membership: Vec<usize> = (0..n_lib).collect();
    by_membership.sort_by(|&a, &b| membership[b].cmp(&membership[a]).then(a.cmp(&b)));
    let mut regional_minerals: Vec<usize> = by_membership
        .into_iter()
        .take(regional_size)
        .collect();
    regional_minerals.sort_unstable();

    let regional_abundances: Vec<f64> = regional_minerals
        .iter()
        .map(|&j| models.iter().map(|m| m.abundances[j]).sum::<f64>() / n_pixels)
        .collect();

    let mut regional_vector = vec![0.0; n_lib];
    for (&j, &a) in regional_minerals.iter().zip(&regional_abundances) {
        regional_vector[j] = a;
    }
    let regional_reconstruction =
        mat_vec(lib.columns(), &regional_vector).expect("library-length vector");

    let best_rmse = models
        .iter()
        .map(|m| rmse_of(&regional_reconstruction, &m.reconstruction))
        .fold(f64::INFINITY, f64::min);

    let all_nonneg = models
        .iter()
        .all(|m| m.abundances.iter().all(|&a| a >= -NONNEG_SLACK));

    let mean_elapsed = models.iter().map(|m| m.elapsed).sum::<f64>() / n_pixels;

    Ok(RegionalSummary {
        technique: first.technique,
        regional_size,
        regional_minerals,
        regional_abundances,
        regional_reconstruction,
        best_rmse,
        target_detected: regional_vector[target] >= DETECTION_THRESHOLD,
        all_nonneg,
        mean_elapsed,
    })
}

/// Ground truth for one synthetic mixture pixel.
#[derive(Debug, Clone)]
pub struct MixtureTruth {
    pub member_indices: Vec<usize>,
    /// Nonnegative, sums to one.
    pub member_abundances: Vec<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl MixtureTruth {
    pub fn new(
        member_indices: Vec<usize>,
        member_abundances: Vec<f64>,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self, HarnessError> {
        if member_indices.len() != member_abundances.len() {
            return Err(HarnessError::InvalidTruth(
                "index and abundance counts differ".to_string(),
            ));
        }
        if member_indices.is_empty() {
            return Err(HarnessError::InvalidTruth("no members".to_string()));
        }
        let mut sorted = member_indices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != member_indices.len() {
            return Err(HarnessError::InvalidTruth(
                "member indices must be distinct".to_string(),
            ));
        }
        if member_abundances.iter().any(|&a| a < 0.0) {
            return Err(HarnessError::InvalidTruth(
                "abundances must be nonnegative".to_string(),
            ));
        }
        let total: f64 = member_abundances.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(HarnessError::InvalidTruth(format!(
                "abundances sum to {total}, expected 1"
            )));
        }
        if noise_sigma < 0.0 {
            return Err(HarnessError::InvalidTruth(
                "noise sigma must be nonnegative".to_string(),
            ));
        }
        Ok(MixtureTruth {
            member_indices,
            member_abundances,
            noise_sigma,
            seed,
        })
    }
}

/// Realizes the mixing model forward: the abundance-weighted sum of member
/// spectra plus i.i.d. zero-mean Gaussian band noise from the truth's seed.
/// Identical seeds produce bit-identical pixels.
pub fn generate_mixture(lib: &SpectralLibrary, truth: &MixtureTruth) -> ObservedPixel {
    let bands = lib.n_bands();
    let mut values = vec![0.0; bands];
    for (&j, &a) in truth.member_indices.iter().zip(&truth.member_abundances) {
        for (b, v) in values.iter_mut().enumerate() {
            *v += a * lib.columns().get(b, j);
        }
    }
    if truth.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(truth.seed);
        let normal = Normal::new(0.0, truth.noise_sigma).expect("sigma validated");
        for v in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    ObservedPixel {
        row: 0,
        col: 0,
        values,
    }
}

/// Dispatches one pixel to one technique.
pub fn unmix_with(
    technique: Technique,
    y: &[f64],
    lib: &SpectralLibrary,
    solver_cfg: &SolverConfig,
    bma_cfg: &BmaConfig,
) -> Result<AbundanceModel, SolverError> {
    match technique {
        Technique::Ols => unmix_ols(y, lib, solver_cfg),
        Technique::Nnls => unmix_nnls(y, lib, solver_cfg),
        Technique::Ridge => unmix_ridge(y, lib, solver_cfg),
        Technique::Lasso => unmix_lasso(y, lib, solver_cfg),
        Technique::Fsr => unmix_fsr(y, lib, solver_cfg),
        Technique::Bsr => unmix_bsr(y, lib, solver_cfg),
        Technique::Bma => Ok(unmix_bma(y, lib, bma_cfg)),
        Technique::BmaQ => Ok(unmix_bma_q(y, lib, bma_cfg)),
    }
}

/// One technique's row of the comparison table. Solver failures are
/// recorded, not propagated.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub technique: Technique,
    pub outcome: Result<RegionalSummary, String>,
    /// Per-pixel models, present when the technique succeeded on every
    /// pixel.
    pub models: Vec<AbundanceModel>,
}

/// Unmixes every pixel of the region with every requested technique,
/// timing each pixel, and aggregates per technique. Pixels are processed
/// in parallel; aggregation happens afterward, so the table does not
/// depend on scheduling.
pub fn run_comparison(
    roi: &RegionOfInterest,
    lib: &SpectralLibrary,
    techniques: &[Technique],
    solver_cfg: &SolverConfig,
    bma_cfg: &BmaConfig,
) -> Result<Vec<ComparisonRow>, HarnessError> {
    let target = resolve_target(lib, &roi.target_name)?;
    let mut rows = Vec::with_capacity(techniques.len());
    for &technique in techniques {
        let fits: Result<Vec<AbundanceModel>, SolverError> = roi
            .pixels
            .par_iter()
            .map(|px| unmix_with(technique, &px.values, lib, solver_cfg, bma_cfg))
            .collect();
        let row = match fits {
            Ok(models) => match aggregate_region(&models, lib, target) {
                Ok(summary) => ComparisonRow {
                    technique,
                    outcome: Ok(summary),
                    models,
                },
                Err(e) => ComparisonRow {
                    technique,
                    outcome: Err(e.to_string()),
                    models: Vec::new(),
                },
            },
            Err(e) => ComparisonRow {
                technique,
                outcome: Err(e.to_string()),
                models: Vec::new(),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Deterministic synthetic reflectance library: smooth random curves
/// (baseline plus a few Gaussian bumps) on a uniform grid, rejection
/// sampled so no two spectra are nearly parallel. Used by the validation
/// oracle, the examples, and the synthetic fixtures.
pub fn synth_library(n_spectra: usize, n_bands: usize, seed: u64) -> SpectralLibrary {
    synth_library_separated(n_spectra, n_bands, seed, 0.985, 0.0)
}

/// [`synth_library`] with an explicit cap on the pairwise cosine
/// similarity and a band-level texture amplitude.
///
/// Smooth wide-bump curves span a low-dimensional subspace, which mimics a
/// crowded mineral library full of close variants; adding narrow features
/// and per-band texture (`texture > 0`) raises the effective rank and
/// makes mixtures identifiable, the regime where target detection is a
/// fair test.
pub fn synth_library_separated(
    n_spectra: usize,
    n_bands: usize,
    seed: u64,
    max_cosine: f64,
    texture: f64,
) -> SpectralLibrary {
    let grid: Vec<f64> = (0..n_bands)
        .map(|i| 2.0 + 0.5 * i as f64 / (n_bands.max(2) - 1) as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n_spectra);
    while columns.len() < n_spectra {
        let mut accepted = None;
        let mut last = Vec::new();
        for _attempt in 0..60 {
            let base = rng.random_range(0.05..0.55);
            let n_bumps = rng.random_range(2..=6);
            let mut values = vec![base; n_bands];
            for _ in 0..n_bumps {
                let center = rng.random_range(1.95..2.55);
                let width = if texture > 0.0 {
                    rng.random_range(0.008..0.08)
                } else {
                    rng.random_range(0.02..0.12)
                };
                let amp = rng.random_range(-0.25..0.45);
                for (b, v) in values.iter_mut().enumerate() {
                    let d = (grid[b] - center) / width;
                    *v += amp * (-0.5 * d * d).exp();
                }
            }
            if texture > 0.0 {
                for v in values.iter_mut() {
                    *v += rng.random_range(-texture..texture);
                }
            }
            for v in values.iter_mut() {
                *v = v.clamp(0.01, 1.2);
            }
            let norm: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            let too_close = columns.iter().any(|c: &Vec<f64>| {
                let cn: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                let d: f64 = c.iter().zip(&values).map(|(a, b)| a * b).sum();
                d / (norm * cn) > max_cosine
            });
            last = values;
            if !too_close {
                accepted = Some(last.clone());
                break;
            }
        }
        // A crowded library is better than an endless loop: after enough
        // failed attempts take the last draw as is.
        columns.push(accepted.unwrap_or(last));
    }
    let spectra: Vec<Spectrum> = columns
        .into_iter()
        .enumerate()
        .map(|(j, values)| Spectrum {
            name: format!("synth{j:03}"),
            wavelengths: grid.clone(),
            values,
        })
        .collect();
    SpectralLibrary::from_spectra(&spectra).expect("shared grid by construction")
}
