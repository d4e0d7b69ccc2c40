//! Data model for spectra, libraries, pixels, and regions of interest.
//!
//! A library and the pixels unmixed against it must share one wavelength
//! grid; no resampling or interpolation happens anywhere in this crate. The
//! only geometric operation is inclusive band-range subsetting, used to
//! restrict a full-range sensor grid to an analysis window.

use crate::linalg::Matrix;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("invalid wavelength range: {wl_min} .. {wl_max}")]
    InvalidRange { wl_min: f64, wl_max: f64 },
    #[error("no bands fall inside the requested range {wl_min} .. {wl_max} micrometers")]
    EmptySelection { wl_min: f64, wl_max: f64 },
    #[error("no spectrum named {name:?} in the library{}", suggestions_text(.suggestions))]
    UnknownName {
        name: String,
        suggestions: Vec<String>,
    },
    #[error("spectrum {name:?}: wavelengths must be strictly ascending (band {band})")]
    NonAscendingWavelengths { name: String, band: usize },
    #[error("spectrum {name:?}: {values} values for {wavelengths} wavelengths")]
    LengthMismatch {
        name: String,
        values: usize,
        wavelengths: usize,
    },
    #[error("spectrum {name:?} has a non-finite value at band {band}")]
    NonFiniteValue { name: String, band: usize },
    #[error("library shape mismatch: {rows} matrix rows for {bands} grid points")]
    GridShapeMismatch { rows: usize, bands: usize },
    #[error("library shape mismatch: {cols} matrix columns for {names} names")]
    NameShapeMismatch { cols: usize, names: usize },
    #[error("spectrum {name:?} is not on the shared library grid")]
    GridMismatch { name: String },
    #[error("pixel has {pixel} bands but the library grid has {bands}")]
    PixelBandMismatch { pixel: usize, bands: usize },
}

fn suggestions_text(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!(" (nearest names: {})", suggestions.join(", "))
    }
}

/// A named reflectance curve sampled on a wavelength grid (micrometers).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub name: String,
    pub wavelengths: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn new(
        name: impl Into<String>,
        wavelengths: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self, SpectraError> {
        let name = name.into();
        if wavelengths.len() != values.len() {
            return Err(SpectraError::LengthMismatch {
                name,
                values: values.len(),
                wavelengths: wavelengths.len(),
            });
        }
        for i in 1..wavelengths.len() {
            if wavelengths[i] <= wavelengths[i - 1] {
                return Err(SpectraError::NonAscendingWavelengths { name, band: i });
            }
        }
        if let Some(band) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpectraError::NonFiniteValue { name, band });
        }
        Ok(Spectrum {
            name,
            wavelengths,
            values,
        })
    }
}

/// Column-stacked constituent spectra on a shared wavelength grid.
///
/// The matrix is bands x spectra; column `j` is the reflectance curve of
/// `names[j]`. Construction checks shape only; content-level problems
/// (duplicate names, zero columns, bad grids) are reported as findings by
/// [`validate_library`] so callers can decide what is fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLibrary {
    names: Vec<String>,
    grid: Vec<f64>,
    columns: Matrix,
}

impl SpectralLibrary {
    pub fn new(names: Vec<String>, grid: Vec<f64>, columns: Matrix) -> Result<Self, SpectraError> {
        if columns.rows != grid.len() {
            return Err(SpectraError::GridShapeMismatch {
                rows: columns.rows,
                bands: grid.len(),
            });
        }
        if columns.cols != names.len() {
            return Err(SpectraError::NameShapeMismatch {
                cols: columns.cols,
                names: names.len(),
            });
        }
        Ok(SpectralLibrary {
            names,
            grid,
            columns,
        })
    }

    /// Stacks spectra into a library; every spectrum must carry a grid
    /// bit-identical to the first one.
    pub fn from_spectra(spectra: &[Spectrum]) -> Result<Self, SpectraError> {
        let grid = spectra.first().map(|s| s.wavelengths.clone()).unwrap_or_default();
        let mut names = Vec::with_capacity(spectra.len());
        let mut cols = Vec::with_capacity(spectra.len());
        for s in spectra {
            if s.wavelengths != grid {
                return Err(SpectraError::GridMismatch {
                    name: s.name.clone(),
                });
            }
            names.push(s.name.clone());
            cols.push(s.values.clone());
        }
        Ok(SpectralLibrary {
            names,
            grid,
            columns: Matrix::from_cols(&cols),
        })
    }

    pub fn n_bands(&self) -> usize {
        self.grid.len()
    }

    pub fn n_spectra(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// The bands x spectra design matrix.
    pub fn columns(&self) -> &Matrix {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.columns.col(j)
    }

    pub fn spectrum(&self, j: usize) -> Spectrum {
        Spectrum {
            name: self.names[j].clone(),
            wavelengths: self.grid.clone(),
            values: self.column(j),
        }
    }
}

/// A measured pixel spectrum with its image coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedPixel {
    pub row: i64,
    pub col: i64,
    pub values: Vec<f64>,
}

/// A labeled set of pixels sharing one expected target material.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOfInterest {
    pub label: String,
    pub target_name: String,
    pub pixels: Vec<ObservedPixel>,
}

/// Restricts a library and its pixels to grid points with
/// `wl_min <= lambda <= wl_max`, both ends inclusive. Band and spectrum
/// order are preserved; an empty selection is an error.
pub fn select_bands(
    lib: &SpectralLibrary,
    pixels: &[ObservedPixel],
    wl_min: f64,
    wl_max: f64,
) -> Result<(SpectralLibrary, Vec<ObservedPixel>), SpectraError> {
    if !(wl_min < wl_max) {
        return Err(SpectraError::InvalidRange { wl_min, wl_max });
    }
    for p in pixels {
        if p.values.len() != lib.n_bands() {
            return Err(SpectraError::PixelBandMismatch {
                pixel: p.values.len(),
                bands: lib.n_bands(),
            });
        }
    }
    let keep: Vec<usize> = lib
        .grid
        .iter()
        .enumerate()
        .filter(|(_, &wl)| wl_min <= wl && wl <= wl_max)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(SpectraError::EmptySelection { wl_min, wl_max });
    }
    if keep.len() == lib.n_bands() {
        return Ok((lib.clone(), pixels.to_vec()));
    }
    let grid: Vec<f64> = keep.iter().map(|&i| lib.grid[i]).collect();
    let mut columns = Matrix::zeros(keep.len(), lib.n_spectra());
    for (new_b, &b) in keep.iter().enumerate() {
        for j in 0..lib.n_spectra() {
            columns.set(new_b, j, lib.columns.get(b, j));
        }
    }
    let sub = SpectralLibrary {
        names: lib.names.clone(),
        grid,
        columns,
    };
    let sub_pixels = pixels
        .iter()
        .map(|p| ObservedPixel {
            row: p.row,
            col: p.col,
            values: keep.iter().map(|&i| p.values[i]).collect(),
        })
        .collect();
    Ok((sub, sub_pixels))
}

/// Index of the library spectrum whose name matches exactly.
///
/// There is no fuzzy matching; a miss lists the lexicographically nearest
/// names to help diagnose case or spelling slips.
pub fn resolve_target(lib: &SpectralLibrary, name: &str) -> Result<usize, SpectraError> {
    if let Some(i) = lib.names.iter().position(|n| n == name) {
        return Ok(i);
    }
    // Case-folded ordering so case slips land next to their lowercase twin.
    let mut sorted = lib.names.clone();
    sorted.sort_by_key(|n| n.to_lowercase());
    let folded = name.to_lowercase();
    let at = sorted.partition_point(|n| n.to_lowercase() < folded);
    let mut suggestions = Vec::new();
    if at > 0 {
        suggestions.push(sorted[at - 1].clone());
    }
    if at < sorted.len() {
        suggestions.push(sorted[at].clone());
    }
    Err(SpectraError::UnknownName {
        name: name.to_string(),
        suggestions,
    })
}

/// A non-fatal problem detected in a library.
#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    DuplicateName { name: String, first: usize, second: usize },
    NonFinite { spectrum: usize, band: usize },
    AllZeroColumn { spectrum: usize },
    NonAscendingGrid { band: usize },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DuplicateName { name, first, second } => {
                write!(f, "duplicate name {name:?} at columns {first} and {second}")
            }
            Finding::NonFinite { spectrum, band } => {
                write!(f, "non-finite value in spectrum {spectrum} at band {band}")
            }
            Finding::AllZeroColumn { spectrum } => {
                write!(f, "spectrum {spectrum} is all zeros")
            }
            Finding::NonAscendingGrid { band } => {
                write!(f, "wavelength grid is not strictly ascending at band {band}")
            }
        }
    }
}

/// Checks a library for duplicate names, non-finite values, all-zero
/// columns, and a non-ascending grid. An empty result means valid.
pub fn validate_library(lib: &SpectralLibrary) -> Vec<Finding> {
    let mut findings = Vec::new();
    for second in 0..lib.names.len() {
        for first in 0..second {
            if lib.names[first] == lib.names[second] {
                findings.push(Finding::DuplicateName {
                    name: lib.names[second].clone(),
                    first,
                    second,
                });
            }
        }
    }
    for b in 1..lib.grid.len() {
        if lib.grid[b] <= lib.grid[b - 1] {
            findings.push(Finding::NonAscendingGrid { band: b });
        }
    }
    for j in 0..lib.n_spectra() {
        let mut all_zero = true;
        for b in 0..lib.n_bands() {
            let v = lib.columns.get(b, j);
            if !v.is_finite() {
                findings.push(Finding::NonFinite { spectrum: j, band: b });
            }
            if v != 0.0 {
                all_zero = false;
            }
        }
        if all_zero && lib.n_bands() > 0 {
            findings.push(Finding::AllZeroColumn { spectrum: j });
        }
    }
    findings
}
