//! Linear spectral unmixing against a library of known material spectra.
//!
//! An observed pixel spectrum is modeled as a nonnegative-weighted sum of
//! library spectra plus noise. This crate determines which library
//! materials are present in a pixel and in what fractional abundances,
//! implementing six regression/selection families over that model:
//!
//! - unconstrained least squares (minimum-norm on rank-deficient libraries)
//! - non-negative least squares (Lawson-Hanson active set)
//! - ridge and lasso regression (lasso via cyclic coordinate descent)
//! - forward and backward stepwise selection driven by t-test p-values
//! - BIC-weighted model averaging over NNLS fits, in plain and
//!   quadratic-interaction variants
//!
//! The [`harness`] module evaluates techniques the same way across the
//! board: reconstruction RMSE, detection of a target material at the 0.1
//! abundance threshold, regional aggregation over a region of interest,
//! and per-pixel timing. [`cli`] adds CSV ingestion, synthetic-mixture
//! generation, and an SVG comparison plot; the `unmixer` binary is a thin
//! wrapper over those functions.
//!
//! Every runnable capability has a corresponding example under
//! `examples/`; start with `basic_unmixing` and `technique_comparison`.

// Index loops read better than iterator chains in the dense kernels.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod ensemble;
pub mod harness;
pub mod linalg;
pub mod solvers;
pub mod spectra;

pub use ensemble::{BmaConfig, WeightedModel};
pub use harness::{MixtureTruth, RegionalSummary};
pub use solvers::{AbundanceModel, SolverConfig, Technique};
pub use spectra::{ObservedPixel, RegionOfInterest, SpectralLibrary, Spectrum};
