//! CSV readers and writers for libraries, regions of interest, per-pixel
//! results, and summary tables.
//!
//! The formats are plain unquoted CSV with a decimal point, comma
//! separators, and LF or CRLF line endings. Loaders reject malformed input
//! with the offending line number; they never coerce. Numbers are written
//! with Rust's shortest round-trip formatting, so saving and reloading
//! preserves every value bit for bit.

use super::CliError;
use crate::linalg::Matrix;
use crate::solvers::AbundanceModel;
use crate::spectra::{ObservedPixel, RegionOfInterest, SpectralLibrary};
use std::fs;
use std::path::Path;

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a sibling temp file and renames it into place.
pub(crate) fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, content)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Data(format!("cannot finalize {}: {e}", path.display())))?;
    Ok(())
}

fn parse_number(cell: &str, line: usize, what: &str) -> Result<f64, CliError> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| CliError::Data(format!("line {line}: non-numeric {what} {cell:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Data(format!(
            "line {line}: non-finite {what} {cell:?}"
        )));
    }
    Ok(v)
}

/// Loads a spectral library.
///
/// Schema: header `wavelength_um,<name>,<name>,...`; each data row is a
/// wavelength followed by one reflectance per spectrum. Wavelengths must be
/// strictly ascending and names unique.
pub fn load_library_csv(path: &Path) -> Result<SpectralLibrary, CliError> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    let cells: Vec<&str> = header.split(',').collect();
    if cells.first().map(|c| c.trim()) != Some("wavelength_um") {
        return Err(CliError::Data(format!(
            "line 1: header must start with \"wavelength_um\", found {:?}",
            cells.first().unwrap_or(&"")
        )));
    }
    let names: Vec<String> = cells[1..].iter().map(|c| c.trim().to_string()).collect();
    if names.is_empty() {
        return Err(CliError::Data(
            "line 1: no spectrum columns in header".to_string(),
        ));
    }
    for j in 0..names.len() {
        for i in 0..j {
            if names[i] == names[j] {
                return Err(CliError::Data(format!(
                    "line 1: duplicate spectrum name {:?} (columns {} and {})",
                    names[j],
                    i + 2,
                    j + 2
                )));
            }
        }
    }

    let mut grid: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != names.len() + 1 {
            return Err(CliError::Data(format!(
                "line {lineno}: {} cells, expected {}",
                cells.len(),
                names.len() + 1
            )));
        }
        let wl = parse_number(cells[0], lineno, "wavelength")?;
        if let Some(&prev) = grid.last() {
            if wl <= prev {
                return Err(CliError::Data(format!(
                    "line {lineno}: wavelength {wl} not ascending (previous {prev})"
                )));
            }
        }
        grid.push(wl);
        let mut row = Vec::with_capacity(names.len());
        for cell in &cells[1..] {
            row.push(parse_number(cell, lineno, "reflectance")?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no data rows after the header",
            path.display()
        )));
    }
    let mut columns = Matrix::zeros(grid.len(), names.len());
    for (b, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            columns.set(b, j, v);
        }
    }
    SpectralLibrary::new(names, grid, columns).map_err(|e| CliError::Data(e.to_string()))
}

pub fn library_to_csv(lib: &SpectralLibrary) -> String {
    let mut out = String::from("wavelength_um");
    for name in lib.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for b in 0..lib.n_bands() {
        out.push_str(&format!("{}", lib.grid()[b]));
        for j in 0..lib.n_spectra() {
            out.push_str(&format!(",{}", lib.columns().get(b, j)));
        }
        out.push('\n');
    }
    out
}

pub fn save_library_csv(lib: &SpectralLibrary, path: &Path) -> Result<(), CliError> {
    write_atomic(path, &library_to_csv(lib))
}

/// Loads a region of interest.
///
/// Schema: header `label,target,row,col,b0,b1,...`; every data row carries
/// the shared label and target, the image coordinates, and one reflectance
/// per band.
pub fn load_roi_csv(path: &Path) -> Result<RegionOfInterest, CliError> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    let cells: Vec<&str> = header.split(',').collect();
    let fixed = ["label", "target", "row", "col"];
    if cells.len() < 5 || cells[..4].iter().map(|c| c.trim()).ne(fixed) {
        return Err(CliError::Data(
            "line 1: header must be \"label,target,row,col,b0,b1,...\"".to_string(),
        ));
    }
    let bands = cells.len() - 4;

    let mut label: Option<String> = None;
    let mut target: Option<String> = None;
    let mut pixels = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != bands + 4 {
            return Err(CliError::Data(format!(
                "line {lineno}: {} cells, expected {}",
                cells.len(),
                bands + 4
            )));
        }
        let row_label = cells[0].trim();
        match &label {
            None => label = Some(row_label.to_string()),
            Some(l) if l != row_label => {
                return Err(CliError::Data(format!(
                    "line {lineno}: mixed labels {l:?} and {row_label:?} in one file"
                )))
            }
            _ => {}
        }
        let row_target = cells[1].trim();
        match &target {
            None => target = Some(row_target.to_string()),
            Some(t) if t != row_target => {
                return Err(CliError::Data(format!(
                    "line {lineno}: mixed targets {t:?} and {row_target:?} in one file"
                )))
            }
            _ => {}
        }
        let row: i64 = cells[2].trim().parse().map_err(|_| {
            CliError::Data(format!("line {lineno}: non-integer row {:?}", cells[2]))
        })?;
        let col: i64 = cells[3].trim().parse().map_err(|_| {
            CliError::Data(format!("line {lineno}: non-integer col {:?}", cells[3]))
        })?;
        let mut values = Vec::with_capacity(bands);
        for cell in &cells[4..] {
            values.push(parse_number(cell, lineno, "reflectance")?);
        }
        pixels.push(ObservedPixel { row, col, values });
    }
    if pixels.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no pixel rows after the header",
            path.display()
        )));
    }
    Ok(RegionOfInterest {
        label: label.unwrap(),
        target_name: target.unwrap(),
        pixels,
    })
}

pub fn roi_to_csv(roi: &RegionOfInterest) -> String {
    let bands = roi.pixels.first().map_or(0, |p| p.values.len());
    let mut out = String::from("label,target,row,col");
    for b in 0..bands {
        out.push_str(&format!(",b{b}"));
    }
    out.push('\n');
    for p in &roi.pixels {
        out.push_str(&format!("{},{},{},{}", roi.label, roi.target_name, p.row, p.col));
        for v in &p.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Per-pixel results of one technique: coordinates, model size, error,
/// solver seconds, and the abundance vector as sparse `index:value` pairs.
pub fn pixels_to_csv(pixels: &[ObservedPixel], models: &[AbundanceModel]) -> String {
    let mut out = String::from("row,col,model_size,rmse,elapsed,abundances\n");
    for (p, m) in pixels.iter().zip(models) {
        let sparse: Vec<String> = m
            .support
            .iter()
            .map(|&j| format!("{j}:{}", m.abundances[j]))
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.row,
            p.col,
            m.model_size,
            m.rmse,
            m.elapsed,
            sparse.join(";")
        ));
    }
    out
}

/// One summary row per technique.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub technique: String,
    pub model_size: usize,
    pub nonneg: bool,
    pub best_rmse: f64,
    pub target_detected: bool,
    pub mean_elapsed: f64,
}

pub const SUMMARY_HEADER: &str =
    "technique,model_size,nonneg_flag,best_rmse,target_detected,mean_elapsed";

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.technique, r.model_size, r.nonneg, r.best_rmse, r.target_detected, r.mean_elapsed
        ));
    }
    out
}

pub fn load_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    if header.trim() != SUMMARY_HEADER {
        return Err(CliError::Data(format!(
            "line 1: expected header {SUMMARY_HEADER:?}"
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(CliError::Data(format!(
                "line {lineno}: {} cells, expected 6",
                cells.len()
            )));
        }
        let parse_bool = |cell: &str| -> Result<bool, CliError> {
            match cell.trim() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(CliError::Data(format!(
                    "line {lineno}: expected true/false, found {other:?}"
                ))),
            }
        };
        rows.push(SummaryRow {
            technique: cells[0].trim().to_string(),
            model_size: cells[1].trim().parse().map_err(|_| {
                CliError::Data(format!("line {lineno}: non-integer model size {:?}", cells[1]))
            })?,
            nonneg: parse_bool(cells[2])?,
            best_rmse: parse_number(cells[3], lineno, "best_rmse")?,
            target_detected: parse_bool(cells[4])?,
            mean_elapsed: parse_number(cells[5], lineno, "mean_elapsed")?,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no summary rows after the header",
            path.display()
        )));
    }
    Ok(rows)
}
