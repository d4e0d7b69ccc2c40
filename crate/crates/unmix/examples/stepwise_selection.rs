//! Forward and backward stepwise selection on an overcomplete library,
//! plus the per-coefficient p-values that drive them.
//!
//! Run with `cargo run --example stepwise_selection`.

use unmix::harness::{generate_mixture, synth_library_separated, MixtureTruth};
use unmix::solvers::{stepwise_pvalues, unmix_bsr, unmix_fsr, SolverConfig};

fn main() {
    // 35 spectra on 25 bands: backward selection must screen before any
    // p-value is even defined. Moderate separation keeps the noiseless
    // demo away from near-twin aliasing.
    let lib = synth_library_separated(35, 25, 9, 0.9, 0.0);
    let truth = MixtureTruth::new(vec![6, 22], vec![0.7, 0.3], 0.0, 4).unwrap();
    let pixel = generate_mixture(&lib, &truth);
    let cfg = SolverConfig::default();

    let fsr = unmix_fsr(&pixel.values, &lib, &cfg).unwrap();
    println!(
        "forward : support {:?}, a6 = {:.6}, a22 = {:.6}, rmse {:.2e}",
        fsr.support, fsr.abundances[6], fsr.abundances[22], fsr.rmse
    );
    let bsr = unmix_bsr(&pixel.values, &lib, &cfg).unwrap();
    println!(
        "backward: support {:?}, a6 = {:.6}, a22 = {:.6}, rmse {:.2e}",
        bsr.support, bsr.abundances[6], bsr.abundances[22], bsr.rmse
    );

    // The machinery underneath: p-values of an overdetermined fit.
    let active = lib.columns().select_columns(&[6, 22, 0, 1]);
    let ps = stepwise_pvalues(&pixel.values, &active).unwrap();
    println!("p-values of a fit on columns [6, 22, 0, 1]:");
    for (j, p) in [6, 22, 0, 1].iter().zip(&ps) {
        println!("  column {j:>2}: p = {p:.3e}");
    }

    // With noise, the thresholds matter: a stricter entry level admits
    // fewer columns.
    let truth = MixtureTruth::new(vec![6, 22], vec![0.7, 0.3], 0.01, 5).unwrap();
    let noisy = generate_mixture(&lib, &truth);
    for p_enter in [0.05, 0.001] {
        let mut c = cfg.clone();
        c.p_enter = p_enter;
        let m = unmix_fsr(&noisy.values, &lib, &c).unwrap();
        println!(
            "forward with noise, p_enter {p_enter}: model size {}, support {:?}",
            m.model_size, m.support
        );
    }
}
