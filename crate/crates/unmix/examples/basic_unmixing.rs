//! Unconstrained least squares vs non-negative least squares on a known
//! two-member mixture, on both a well-posed and an overcomplete library.
//!
//! Run with `cargo run --example basic_unmixing`.

use unmix::harness::{generate_mixture, synth_library, MixtureTruth};
use unmix::solvers::{unmix_nnls, unmix_ols, SolverConfig};

fn main() {
    let cfg = SolverConfig::default();

    // Well-posed: 12 spectra on 40 bands.
    let lib = synth_library(12, 40, 1);
    let truth = MixtureTruth::new(vec![2, 7], vec![0.6, 0.4], 0.0, 0).unwrap();
    let pixel = generate_mixture(&lib, &truth);
    let ols = unmix_ols(&pixel.values, &lib, &cfg).unwrap();
    let nnls = unmix_nnls(&pixel.values, &lib, &cfg).unwrap();
    println!("well-posed library, true mixture 0.6 x #2 + 0.4 x #7 (noiseless):");
    println!(
        "  ols : a2 = {:.6}, a7 = {:.6}, rmse {:.2e}, model size {}",
        ols.abundances[2], ols.abundances[7], ols.rmse, ols.model_size
    );
    println!(
        "  nnls: a2 = {:.6}, a7 = {:.6}, rmse {:.2e}, model size {}",
        nnls.abundances[2], nnls.abundances[7], nnls.rmse, nnls.model_size
    );

    // Overcomplete: 80 spectra on 40 bands with band noise. Unconstrained
    // least squares spreads (signed) weight over everything; NNLS stays
    // sparse and nonnegative.
    let lib = synth_library(80, 40, 2);
    let truth = MixtureTruth::new(vec![10, 55], vec![0.7, 0.3], 0.004, 3).unwrap();
    let pixel = generate_mixture(&lib, &truth);
    let ols = unmix_ols(&pixel.values, &lib, &cfg).unwrap();
    let nnls = unmix_nnls(&pixel.values, &lib, &cfg).unwrap();
    let negatives = ols.abundances.iter().filter(|&&a| a < 0.0).count();
    println!("overcomplete library (80 spectra, 40 bands), noisy mixture:");
    println!(
        "  ols : model size {}, {} negative abundances, rmse {:.2e}",
        ols.model_size, negatives, ols.rmse
    );
    println!(
        "  nnls: model size {}, min abundance {:.2e}, rmse {:.2e}",
        nnls.model_size,
        nnls.abundances.iter().cloned().fold(f64::INFINITY, f64::min),
        nnls.rmse
    );
    println!(
        "  nnls keeps the true members: a10 = {:.3}, a55 = {:.3}",
        nnls.abundances[10], nnls.abundances[55]
    );
}
