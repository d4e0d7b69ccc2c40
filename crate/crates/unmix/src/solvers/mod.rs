//! The five non-ensemble unmixing techniques: unconstrained least squares,
//! non-negative least squares, ridge, lasso, and forward/backward stepwise
//! selection. Each produces an [`AbundanceModel`] describing which library
//! spectra were retained and with what coefficients.
//!
//! All solvers fit the mixing model without an intercept: the physical
//! model has no offset term. They are pure functions of their inputs; a
//! shared read-only library can be unmixed from many threads at once.

mod lasso;
mod nnls;
pub mod stats;
mod stepwise;

pub use lasso::{lasso_cd, lasso_kkt_residual, lasso_objective, LassoFit};
pub use nnls::{nnls, nnls_kkt_residual, NnlsFit};
pub use stepwise::{stepwise_pvalues, unmix_bsr, unmix_fsr};

use crate::linalg::{self, gram, lstsq_min_norm, mat_vec, spd_solve, LinalgError};
use crate::spectra::SpectralLibrary;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

/// Coefficients with modulus at or below this are treated as numerically
/// zero when counting model size for techniques that do not produce exact
/// zeros (least squares, ridge, stepwise refits).
pub const SUPPORT_EPS: f64 = 1e-12;

/// A fit whose residual sum of squares falls at or below this fraction of
/// `||y||^2` is treated as exact; t-statistics are singular there, so
/// retained coefficients report p = 0 and zero coefficients p = 1. The
/// level sits far above what rounding reaches on ill-conditioned exact
/// fits and far below any real noise floor for reflectance data.
pub(crate) const ZERO_RSS_REL: f64 = 1e-20;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("pixel has {pixel} bands but the library has {bands}")]
    PixelBandMismatch { pixel: usize, bands: usize },
    #[error("active-set iteration cap of {cap} exceeded")]
    IterationCap { cap: usize, best: Vec<f64> },
    #[error("p-values undefined: {rows} rows for {cols} columns (need rows > columns)")]
    InsufficientRows { rows: usize, cols: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

/// The unmixing technique families this crate implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technique {
    Ols,
    Nnls,
    Ridge,
    Lasso,
    Fsr,
    Bsr,
    Bma,
    BmaQ,
}

impl Technique {
    pub const ALL: [Technique; 8] = [
        Technique::Ols,
        Technique::Nnls,
        Technique::Ridge,
        Technique::Lasso,
        Technique::Fsr,
        Technique::Bsr,
        Technique::Bma,
        Technique::BmaQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Ols => "ols",
            Technique::Nnls => "nnls",
            Technique::Ridge => "ridge",
            Technique::Lasso => "lasso",
            Technique::Fsr => "fsr",
            Technique::Bsr => "bsr",
            Technique::Bma => "bma",
            Technique::BmaQ => "bma-q",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ols" => Ok(Technique::Ols),
            "nnls" => Ok(Technique::Nnls),
            "ridge" => Ok(Technique::Ridge),
            "lasso" => Ok(Technique::Lasso),
            "fsr" => Ok(Technique::Fsr),
            "bsr" => Ok(Technique::Bsr),
            "bma" => Ok(Technique::Bma),
            "bma-q" | "bmaq" => Ok(Technique::BmaQ),
            other => Err(format!(
                "unknown technique {other:?} (expected one of ols, nnls, ridge, lasso, fsr, bsr, bma, bma-q)"
            )),
        }
    }
}

/// Hyperparameters for the non-ensemble solvers.
///
/// Defaults are this artifact's own choices; they are exposed so a run can
/// sweep them.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub ridge_lambda: f64,
    pub lasso_lambda: f64,
    pub lasso_positive: bool,
    pub lasso_max_iter: usize,
    pub lasso_tol: f64,
    pub p_enter: f64,
    pub p_remove: f64,
    pub stepwise_max_size: usize,
    pub rcond: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            ridge_lambda: 1.0,
            lasso_lambda: 1e-3,
            lasso_positive: true,
            lasso_max_iter: 10_000,
            lasso_tol: 1e-8,
            p_enter: 0.05,
            p_remove: 0.10,
            stepwise_max_size: 25,
            rcond: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidConfig(msg.to_string()));
        if self.ridge_lambda < 0.0 || !self.ridge_lambda.is_finite() {
            return bad("ridge_lambda must be finite and >= 0");
        }
        if self.lasso_lambda < 0.0 || !self.lasso_lambda.is_finite() {
            return bad("lasso_lambda must be finite and >= 0");
        }
        if !(self.lasso_tol > 0.0) {
            return bad("lasso_tol must be > 0");
        }
        if !(self.rcond >= 0.0) {
            return bad("rcond must be >= 0");
        }
        if self.lasso_max_iter == 0 {
            return bad("lasso_max_iter must be >= 1");
        }
        // The closed endpoints are meaningful: p_enter = 0 disables forward
        // selection, p_remove = 1 disables backward removal.
        if !(0.0..=1.0).contains(&self.p_enter) {
            return bad("p_enter must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.p_remove) {
            return bad("p_remove must lie in [0, 1]");
        }
        if self.stepwise_max_size == 0 {
            return bad("stepwise_max_size must be >= 1");
        }
        Ok(())
    }
}

/// An interaction column retained by the quadratic model-averaging variant.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    /// Library indices of the interacting pair, `pair.0 < pair.1`.
    pub pair: (usize, usize),
    /// Averaged coefficient mass assigned to the interaction column.
    pub strength: f64,
}

/// The per-pixel result of one technique.
#[derive(Debug, Clone, PartialEq)]
pub struct AbundanceModel {
    pub technique: Technique,
    /// Indices of library spectra with retained nonzero abundance, ascending.
    pub support: Vec<usize>,
    /// Full-length coefficient vector aligned to library columns.
    pub abundances: Vec<f64>,
    /// Predicted spectrum for the fitted design.
    pub reconstruction: Vec<f64>,
    /// Root mean squared error of `reconstruction` against the pixel.
    pub rmse: f64,
    pub model_size: usize,
    /// Wall-clock seconds spent in the solver call only.
    pub elapsed: f64,
    /// False when an iterative solver hit its sweep cap before its
    /// tolerance was reached.
    pub converged: bool,
    /// True when a rank-deficient unregularized fit fell back to the
    /// SVD-based minimum-norm path.
    pub used_fallback: bool,
    /// Interaction strengths; populated by the quadratic averaging variant
    /// only.
    pub interactions: Vec<InteractionTerm>,
}

impl AbundanceModel {
    /// Assembles a model whose reconstruction is `lib columns * coeffs`.
    ///
    /// `support_eps = 0.0` keeps exact nonzeros only (for solvers that zero
    /// coefficients exactly); a positive value treats `|a| <= eps` as zero.
    pub fn from_fit(
        technique: Technique,
        lib: &SpectralLibrary,
        coeffs: Vec<f64>,
        y: &[f64],
        support_eps: f64,
        elapsed: f64,
    ) -> AbundanceModel {
        let reconstruction = mat_vec(lib.columns(), &coeffs).expect("coeff length");
        let rmse = rmse_of(y, &reconstruction);
        let support: Vec<usize> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.abs() > support_eps)
            .map(|(i, _)| i)
            .collect();
        AbundanceModel {
            technique,
            model_size: support.len(),
            support,
            abundances: coeffs,
            reconstruction,
            rmse,
            elapsed,
            converged: true,
            used_fallback: false,
            interactions: Vec::new(),
        }
    }
}

/// Root mean squared error without a length check; callers guarantee equal
/// lengths. The public checked version lives in the harness module.
pub(crate) fn rmse_of(y: &[f64], yhat: &[f64]) -> f64 {
    debug_assert_eq!(y.len(), yhat.len());
    if y.is_empty() {
        return 0.0;
    }
    let ss: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    (ss / y.len() as f64).sqrt()
}

pub(crate) fn check_pixel(y: &[f64], lib: &SpectralLibrary) -> Result<(), SolverError> {
    if y.len() != lib.n_bands() {
        return Err(SolverError::PixelBandMismatch {
            pixel: y.len(),
            bands: lib.n_bands(),
        });
    }
    Ok(())
}

/// Unconstrained least squares, minimum-norm on rank-deficient libraries.
///
/// No intercept, no sign constraint: negative abundances are permitted and
/// on an overcomplete library every spectrum typically enters the model.
pub fn unmix_ols(
    y: &[f64],
    lib: &SpectralLibrary,
    cfg: &SolverConfig,
) -> Result<AbundanceModel, SolverError> {
    let t0 = Instant::now();
    check_pixel(y, lib)?;
    let coeffs = lstsq_min_norm(lib.columns(), y, cfg.rcond)?;
    Ok(AbundanceModel::from_fit(
        Technique::Ols,
        lib,
        coeffs,
        y,
        SUPPORT_EPS,
        t0.elapsed().as_secs_f64(),
    ))
}

/// Non-negative least squares via the Lawson-Hanson active-set method.
pub fn unmix_nnls(
    y: &[f64],
    lib: &SpectralLibrary,
    _cfg: &SolverConfig,
) -> Result<AbundanceModel, SolverError> {
    let t0 = Instant::now();
    check_pixel(y, lib)?;
    let fit = nnls(lib.columns(), y)?;
    Ok(AbundanceModel::from_fit(
        Technique::Nnls,
        lib,
        fit.coeffs,
        y,
        0.0,
        t0.elapsed().as_secs_f64(),
    ))
}

/// Ridge regression: minimizes `0.5 ||y - S a||^2 + 0.5 lambda ||a||^2`
/// through the normal equations `(S^T S + lambda I) a = S^T y`.
///
/// With `lambda = 0` on a rank-deficient library the normal equations are
/// singular; the solve falls back to the minimum-norm path and flags it.
pub fn unmix_ridge(
    y: &[f64],
    lib: &SpectralLibrary,
    cfg: &SolverConfig,
) -> Result<AbundanceModel, SolverError> {
    let t0 = Instant::now();
    check_pixel(y, lib)?;
    if cfg.ridge_lambda < 0.0 {
        return Err(SolverError::InvalidConfig(
            "ridge_lambda must be >= 0".to_string(),
        ));
    }
    let s = lib.columns();
    // An overcomplete library makes the unregularized normal equations
    // singular by construction; go straight to the minimum-norm path
    // rather than trusting near-zero Cholesky pivots.
    let structurally_singular = cfg.ridge_lambda == 0.0 && lib.n_spectra() > lib.n_bands();
    let (coeffs, used_fallback) = if structurally_singular {
        (lstsq_min_norm(s, y, cfg.rcond)?, true)
    } else {
        let mut g = gram(s);
        for i in 0..g.rows {
            let v = g.get(i, i) + cfg.ridge_lambda;
            g.set(i, i, v);
        }
        let rhs = linalg::mat_t_vec(s, y)?;
        match spd_solve(&g, &rhs) {
            Ok(a) => (a, false),
            Err(LinalgError::NotPositiveDefinite { .. }) if cfg.ridge_lambda == 0.0 => {
                (lstsq_min_norm(s, y, cfg.rcond)?, true)
            }
            Err(e) => return Err(e.into()),
        }
    };
    let mut model = AbundanceModel::from_fit(
        Technique::Ridge,
        lib,
        coeffs,
        y,
        SUPPORT_EPS,
        t0.elapsed().as_secs_f64(),
    );
    model.used_fallback = used_fallback;
    Ok(model)
}

/// Lasso regression: minimizes `0.5 ||y - S a||^2 + lambda ||a||_1` by
/// cyclic coordinate descent with soft-thresholding, optionally constrained
/// to nonnegative coefficients.
///
/// Non-convergence at the sweep cap is not an error; the result carries
/// `converged = false`.
pub fn unmix_lasso(
    y: &[f64],
    lib: &SpectralLibrary,
    cfg: &SolverConfig,
) -> Result<AbundanceModel, SolverError> {
    let t0 = Instant::now();
    check_pixel(y, lib)?;
    if cfg.lasso_lambda < 0.0 {
        return Err(SolverError::InvalidConfig(
            "lasso_lambda must be >= 0".to_string(),
        ));
    }
    let fit = lasso_cd(
        lib.columns(),
        y,
        cfg.lasso_lambda,
        cfg.lasso_positive,
        cfg.lasso_max_iter,
        cfg.lasso_tol,
    )?;
    let mut model = AbundanceModel::from_fit(
        Technique::Lasso,
        lib,
        fit.coeffs,
        y,
        0.0,
        t0.elapsed().as_secs_f64(),
    );
    model.converged = fit.converged;
    Ok(model)
}
