//! Thin command-line wrapper over the library's `cli` module.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use unmix::cli::{
    apply_config_file, cmd_plot, cmd_synth, cmd_unmix, parse_techniques, CliError, RunConfig,
    SynthConfig,
};

#[derive(Parser)]
#[command(
    name = "unmixer",
    version,
    about = "Spectral unmixing against a material library: compare regression and selection techniques on regions of interest"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unmix one or more ROI CSVs against a library and write per-pixel
    /// and summary CSVs.
    Unmix(UnmixArgs),
    /// Generate a synthetic ROI (plus ground truth) from a library.
    Synth(SynthArgs),
    /// Render the comparison scatter plot from a summary CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct UnmixArgs {
    /// Optional key = value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Library CSV (wavelength_um,name,...).
    #[arg(long)]
    library: Option<PathBuf>,
    /// ROI CSV; repeat for several regions.
    #[arg(long = "roi")]
    rois: Vec<PathBuf>,
    /// Lower band-selection bound in micrometers (inclusive).
    #[arg(long)]
    wl_min: Option<f64>,
    /// Upper band-selection bound in micrometers (inclusive).
    #[arg(long)]
    wl_max: Option<f64>,
    /// Comma-separated techniques: ols,nnls,ridge,lasso,fsr,bsr,bma,bma-q.
    #[arg(long)]
    techniques: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the model-averaging ensembles.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ridge_lambda: Option<f64>,
    #[arg(long)]
    lasso_lambda: Option<f64>,
    #[arg(long)]
    p_enter: Option<f64>,
    #[arg(long)]
    p_remove: Option<f64>,
    /// Number of ensembled models per pixel.
    #[arg(long)]
    bma_models: Option<usize>,
    /// Largest sampled subset size in the ensembles.
    #[arg(long)]
    bma_max_size: Option<usize>,
    /// Write elapsed columns as zero so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    library: PathBuf,
    /// Members per pixel, target included.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Gaussian band-noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 100)]
    pixels: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Target material name; drawn at random from the library when absent.
    #[arg(long)]
    target: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    summary: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn build_run_config(args: &UnmixArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut cfg, path)?;
    }
    if let Some(p) = &args.library {
        cfg.library_path = p.clone();
    }
    if !args.rois.is_empty() {
        cfg.roi_paths = args.rois.clone();
    }
    match (args.wl_min, args.wl_max) {
        (Some(lo), Some(hi)) => cfg.wl_range = Some((lo, hi)),
        (None, None) => {}
        _ => {
            return Err(CliError::Usage(
                "--wl-min and --wl-max must be given together".to_string(),
            ))
        }
    }
    if let Some(t) = &args.techniques {
        cfg.techniques = parse_techniques(t)?;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(v) = args.ridge_lambda {
        cfg.solver.ridge_lambda = v;
    }
    if let Some(v) = args.lasso_lambda {
        cfg.solver.lasso_lambda = v;
    }
    if let Some(v) = args.p_enter {
        cfg.solver.p_enter = v;
    }
    if let Some(v) = args.p_remove {
        cfg.solver.p_remove = v;
    }
    if let Some(v) = args.bma_models {
        cfg.bma.n_models = v;
    }
    if let Some(v) = args.bma_max_size {
        cfg.bma.max_subset_size = v;
    }
    if args.no_timing {
        cfg.timing = false;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Unmix(args) => cmd_unmix(&build_run_config(&args)?),
        Command::Synth(args) => cmd_synth(&SynthConfig {
            library_path: args.library,
            k: args.k,
            noise_sigma: args.noise,
            n_pixels: args.pixels,
            seed: args.seed,
            output_dir: args.out,
            target: args.target,
        }),
        Command::Plot(args) => cmd_plot(&args.summary, &args.out),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit with its own code; keep 1 for usage errors.
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
