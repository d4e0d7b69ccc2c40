//! The artifact's external surface: run configuration, the `unmix`,
//! `synth`, and `plot` commands, and their file formats. The `unmixer`
//! binary is a thin argument parser over these functions.
//!
//! Exit-status convention: 0 success, 1 usage or configuration error,
//! 2 data error, 3 solver failure.

pub mod csvio;
pub mod plot;

pub use csvio::{
    library_to_csv, load_library_csv, load_roi_csv, load_summary_csv, roi_to_csv,
    save_library_csv, SummaryRow,
};

use crate::ensemble::BmaConfig;
use crate::harness::{run_comparison, ComparisonRow};
use crate::solvers::{SolverConfig, Technique};
use crate::spectra::{select_bands, validate_library, ObservedPixel, RegionOfInterest};
use csvio::{pixels_to_csv, summary_to_csv, write_atomic};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

/// Configuration of one `unmix` run. Values come from flags, a config
/// file, or both; flags win.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub library_path: PathBuf,
    pub roi_paths: Vec<PathBuf>,
    pub wl_range: Option<(f64, f64)>,
    pub techniques: Vec<Technique>,
    pub solver: SolverConfig,
    pub bma: BmaConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// When false, elapsed columns are written as zero so repeated runs
    /// are byte-identical.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            library_path: PathBuf::new(),
            roi_paths: Vec::new(),
            wl_range: None,
            techniques: Vec::new(),
            solver: SolverConfig::default(),
            bma: BmaConfig::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            timing: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.library_path.as_os_str().is_empty() {
            return Err(CliError::Usage("no library path given".to_string()));
        }
        if self.roi_paths.is_empty() {
            return Err(CliError::Usage("no ROI paths given".to_string()));
        }
        if self.techniques.is_empty() {
            return Err(CliError::Usage("no techniques requested".to_string()));
        }
        if let Some((lo, hi)) = self.wl_range {
            if !(lo < hi) {
                return Err(CliError::Usage(format!(
                    "invalid wavelength range {lo} .. {hi}"
                )));
            }
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }
}

/// Parses a comma-separated technique list like `nnls,lasso,bma-q`.
pub fn parse_techniques(text: &str) -> Result<Vec<Technique>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let t: Technique = part.parse().map_err(CliError::Usage)?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

/// Applies `key = value` lines from a config file onto a [`RunConfig`].
/// Unknown keys are errors; `#` starts a comment.
pub fn apply_config_file(cfg: &mut RunConfig, path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {lineno}: expected key = value"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| CliError::Usage(format!("config line {lineno}: invalid {what} {value:?}"));
        match key {
            "library" => cfg.library_path = PathBuf::from(value),
            "roi" => {
                cfg.roi_paths = value
                    .split(',')
                    .map(|p| PathBuf::from(p.trim()))
                    .filter(|p| !p.as_os_str().is_empty())
                    .collect()
            }
            "wl_min" => {
                let lo: f64 = value.parse().map_err(|_| bad("wl_min"))?;
                cfg.wl_range = Some((lo, cfg.wl_range.map_or(f64::INFINITY, |(_, hi)| hi)));
            }
            "wl_max" => {
                let hi: f64 = value.parse().map_err(|_| bad("wl_max"))?;
                cfg.wl_range = Some((cfg.wl_range.map_or(f64::NEG_INFINITY, |(lo, _)| lo), hi));
            }
            "techniques" => cfg.techniques = parse_techniques(value)?,
            "out" => cfg.output_dir = PathBuf::from(value),
            "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
            "timing" => cfg.timing = value.parse().map_err(|_| bad("timing"))?,
            "ridge_lambda" => cfg.solver.ridge_lambda = value.parse().map_err(|_| bad("ridge_lambda"))?,
            "lasso_lambda" => cfg.solver.lasso_lambda = value.parse().map_err(|_| bad("lasso_lambda"))?,
            "lasso_positive" => cfg.solver.lasso_positive = value.parse().map_err(|_| bad("lasso_positive"))?,
            "lasso_max_iter" => cfg.solver.lasso_max_iter = value.parse().map_err(|_| bad("lasso_max_iter"))?,
            "lasso_tol" => cfg.solver.lasso_tol = value.parse().map_err(|_| bad("lasso_tol"))?,
            "p_enter" => cfg.solver.p_enter = value.parse().map_err(|_| bad("p_enter"))?,
            "p_remove" => cfg.solver.p_remove = value.parse().map_err(|_| bad("p_remove"))?,
            "stepwise_max_size" => cfg.solver.stepwise_max_size = value.parse().map_err(|_| bad("stepwise_max_size"))?,
            "rcond" => cfg.solver.rcond = value.parse().map_err(|_| bad("rcond"))?,
            "bma_models" => cfg.bma.n_models = value.parse().map_err(|_| bad("bma_models"))?,
            "bma_max_size" => cfg.bma.max_subset_size = value.parse().map_err(|_| bad("bma_max_size"))?,
            "bma_top_pairs" => cfg.bma.top_t_for_pairs = value.parse().map_err(|_| bad("bma_top_pairs"))?,
            other => {
                return Err(CliError::Usage(format!(
                    "config line {lineno}: unknown key {other:?}"
                )))
            }
        }
    }
    Ok(())
}

fn sanitize(label: &str) -> String {
    let cleaned: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if cleaned.is_empty() {
        "roi".to_string()
    } else {
        cleaned
    }
}

/// Removes files already produced by a failed run.
struct OutputTracker {
    written: Vec<PathBuf>,
}

impl OutputTracker {
    fn new() -> Self {
        OutputTracker { written: Vec::new() }
    }

    fn write(&mut self, path: &Path, content: &str) -> Result<(), CliError> {
        write_atomic(path, content)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn discard_all(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// Loads the library and regions, applies band selection, runs the
/// comparison, and writes per-pixel and summary CSVs. On a fatal error the
/// files already written by this run are removed.
pub fn cmd_unmix(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let mut bma_cfg = cfg.bma.clone();
    bma_cfg.seed = cfg.seed;

    let mut lib = load_library_csv(&cfg.library_path)?;
    for finding in validate_library(&lib) {
        eprintln!("warning: library: {finding}");
    }
    let mut rois = Vec::with_capacity(cfg.roi_paths.len());
    for path in &cfg.roi_paths {
        rois.push(load_roi_csv(path)?);
    }

    if let Some((lo, hi)) = cfg.wl_range {
        let full_bands = lib.n_bands();
        // Regions still on the full sensor grid are subset together with
        // the library; regions exported pre-subset pass through.
        let (sub_lib, _) =
            select_bands(&lib, &[], lo, hi).map_err(|e| CliError::Data(e.to_string()))?;
        for roi in rois.iter_mut() {
            let bands = roi.pixels.first().map_or(0, |p| p.values.len());
            if bands == full_bands && full_bands != sub_lib.n_bands() {
                let (_, pixels) = select_bands(&lib, &roi.pixels, lo, hi)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                roi.pixels = pixels;
            }
        }
        lib = sub_lib;
    }
    for roi in &rois {
        let bands = roi.pixels.first().map_or(0, |p| p.values.len());
        if bands != lib.n_bands() {
            return Err(CliError::Data(format!(
                "ROI {:?} has {bands} bands but the library has {} after band selection",
                roi.label,
                lib.n_bands()
            )));
        }
    }

    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", cfg.output_dir.display())))?;

    let mut tracker = OutputTracker::new();
    let result = (|| -> Result<(), CliError> {
        for roi in &rois {
            let rows = run_comparison(roi, &lib, &cfg.techniques, &cfg.solver, &bma_cfg)
                .map_err(|e| CliError::Data(e.to_string()))?;
            write_roi_outputs(cfg, roi, &rows, &mut tracker)?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            if failed == rows.len() && !rows.is_empty() {
                return Err(CliError::Solver(format!(
                    "every technique failed on ROI {:?}",
                    roi.label
                )));
            }
        }
        Ok(())
    })();
    if result.is_err() {
        tracker.discard_all();
    }
    result
}

fn write_roi_outputs(
    cfg: &RunConfig,
    roi: &RegionOfInterest,
    rows: &[ComparisonRow],
    tracker: &mut OutputTracker,
) -> Result<(), CliError> {
    let label = sanitize(&roi.label);
    let mut summary_rows = Vec::new();
    println!("ROI {:?} ({} pixels)", roi.label, roi.pixels.len());
    for row in rows {
        match &row.outcome {
            Ok(summary) => {
                let mut models = row.models.clone();
                if !cfg.timing {
                    for m in models.iter_mut() {
                        m.elapsed = 0.0;
                    }
                }
                let path = cfg
                    .output_dir
                    .join(format!("{label}_pixels_{}.csv", row.technique));
                tracker.write(&path, &pixels_to_csv(&roi.pixels, &models))?;
                let mean_elapsed = if cfg.timing { summary.mean_elapsed } else { 0.0 };
                println!(
                    "  {:<6} size {:>4}  nonneg {:<5}  best_rmse {:.6}  detected {:<5}  {:.4}s/px",
                    row.technique.to_string(),
                    summary.regional_size,
                    summary.all_nonneg,
                    summary.best_rmse,
                    summary.target_detected,
                    mean_elapsed
                );
                summary_rows.push(SummaryRow {
                    technique: row.technique.to_string(),
                    model_size: summary.regional_size,
                    nonneg: summary.all_nonneg,
                    best_rmse: summary.best_rmse,
                    target_detected: summary.target_detected,
                    mean_elapsed,
                });
            }
            Err(message) => {
                eprintln!("warning: {} failed on {:?}: {message}", row.technique, roi.label);
            }
        }
    }
    let path = cfg.output_dir.join(format!("{label}_summary.csv"));
    tracker.write(&path, &summary_to_csv(&summary_rows))?;
    Ok(())
}

/// Configuration of one `synth` run.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub library_path: PathBuf,
    /// Members per pixel, the target included.
    pub k: usize,
    pub noise_sigma: f64,
    pub n_pixels: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Target material name; a seeded random library member when absent.
    pub target: Option<String>,
}

/// Generates a synthetic region of interest plus its ground truth.
///
/// Every pixel mixes the target with `k - 1` other distinct library
/// spectra under Dirichlet(1,...,1) abundances (normalized unit
/// exponentials) and optional Gaussian band noise. Fixed seeds reproduce
/// the files byte for byte.
pub fn cmd_synth(cfg: &SynthConfig) -> Result<(), CliError> {
    let lib = load_library_csv(&cfg.library_path)?;
    let n = lib.n_spectra();
    if cfg.k < 1 || cfg.k > n {
        return Err(CliError::Usage(format!(
            "k = {} out of range for a library of {n} spectra",
            cfg.k
        )));
    }
    if cfg.n_pixels == 0 {
        return Err(CliError::Usage("need at least one pixel".to_string()));
    }
    if cfg.noise_sigma < 0.0 {
        return Err(CliError::Usage("noise sigma must be nonnegative".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let target = match &cfg.target {
        Some(name) => crate::spectra::resolve_target(&lib, name)
            .map_err(|e| CliError::Data(e.to_string()))?,
        None => rng.random_range(0..n),
    };
    let target_name = lib.names()[target].clone();

    let normal = (cfg.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, cfg.noise_sigma).expect("sigma checked"));
    let mut pixels = Vec::with_capacity(cfg.n_pixels);
    let mut truth_lines =
        String::from("pixel,row,col,members,abundances\n");
    for i in 0..cfg.n_pixels {
        // Distinct members: the target plus k-1 others.
        let mut members = vec![target];
        while members.len() < cfg.k {
            let j = rng.random_range(0..n);
            if !members.contains(&j) {
                members.push(j);
            }
        }
        members.sort_unstable();
        // Dirichlet(1,...,1) via normalized unit exponentials.
        let draws: Vec<f64> = (0..cfg.k)
            .map(|_| {
                let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                -u.ln()
            })
            .collect();
        let total: f64 = draws.iter().sum();
        let abundances: Vec<f64> = if cfg.k == 1 {
            vec![1.0]
        } else {
            draws.iter().map(|d| d / total).collect()
        };
        let mut values = vec![0.0; lib.n_bands()];
        for (&j, &a) in members.iter().zip(&abundances) {
            for (b, v) in values.iter_mut().enumerate() {
                *v += a * lib.columns().get(b, j);
            }
        }
        if let Some(normal) = &normal {
            for v in values.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
        let member_names: Vec<String> =
            members.iter().map(|&j| lib.names()[j].clone()).collect();
        let abundance_text: Vec<String> = abundances.iter().map(|a| format!("{a}")).collect();
        truth_lines.push_str(&format!(
            "{i},{i},0,{},{}\n",
            member_names.join(";"),
            abundance_text.join(";")
        ));
        pixels.push(ObservedPixel {
            row: i as i64,
            col: 0,
            values,
        });
    }

    let roi = RegionOfInterest {
        label: format!("{target_name}_synth"),
        target_name: target_name.clone(),
        pixels,
    };
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", cfg.output_dir.display())))?;
    let roi_path = cfg.output_dir.join("roi.csv");
    let truth_path = cfg.output_dir.join("truth.csv");
    let mut tracker = OutputTracker::new();
    let result = (|| -> Result<(), CliError> {
        tracker.write(&roi_path, &roi_to_csv(&roi))?;
        tracker.write(&truth_path, &truth_lines)?;
        Ok(())
    })();
    if result.is_err() {
        tracker.discard_all();
        return result;
    }
    println!(
        "wrote {} pixels targeting {:?} to {} and {}",
        cfg.n_pixels,
        target_name,
        roi_path.display(),
        truth_path.display()
    );
    Ok(())
}

/// Renders the comparison scatter plot from a summary CSV.
pub fn cmd_plot(summary_path: &Path, out_svg: &Path) -> Result<(), CliError> {
    let rows = load_summary_csv(summary_path)?;
    let svg = plot::render_scatter_svg(&rows);
    write_atomic(out_svg, &svg)?;
    println!("wrote {}", out_svg.display());
    Ok(())
}
