//! The complete file pipeline the `unmixer` binary wraps: write a library
//! CSV, synthesize a region of interest, unmix it, and render the
//! comparison plot, all through the `cli` module.
//!
//! Run with `cargo run --release --example csv_workflow`.

use unmix::cli::{
    cmd_plot, cmd_synth, cmd_unmix, parse_techniques, save_library_csv, RunConfig, SynthConfig,
};
use unmix::harness::synth_library;

fn main() {
    let dir = std::env::temp_dir().join("unmix_csv_workflow");
    std::fs::create_dir_all(&dir).unwrap();

    let lib = synth_library(60, 50, 31);
    let lib_path = dir.join("library.csv");
    save_library_csv(&lib, &lib_path).unwrap();
    println!("library  -> {}", lib_path.display());

    let synth_dir = dir.join("synth");
    cmd_synth(&SynthConfig {
        library_path: lib_path.clone(),
        k: 3,
        noise_sigma: 0.005,
        n_pixels: 12,
        seed: 9,
        output_dir: synth_dir.clone(),
        target: None,
    })
    .unwrap();

    let out_dir = dir.join("out");
    let mut cfg = RunConfig::default();
    cfg.library_path = lib_path;
    cfg.roi_paths = vec![synth_dir.join("roi.csv")];
    cfg.techniques = parse_techniques("ols,nnls,ridge,lasso,fsr,bsr,bma,bma-q").unwrap();
    cfg.output_dir = out_dir.clone();
    cfg.bma.n_models = 3000;
    cmd_unmix(&cfg).unwrap();

    let summary = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| p.to_string_lossy().ends_with("_summary.csv"))
        .unwrap();
    let figure = dir.join("comparison.svg");
    cmd_plot(&summary, &figure).unwrap();
    println!("summary  -> {}", summary.display());
    println!("figure   -> {}", figure.display());
}
