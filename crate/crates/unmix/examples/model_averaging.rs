//! BIC-weighted model averaging over NNLS fits, and the quadratic variant
//! that scores pairwise interaction columns.
//!
//! Run with `cargo run --example model_averaging`.

use unmix::ensemble::{bma_ensemble_over, build_quadratic_features, unmix_bma, unmix_bma_q, BmaConfig};
use unmix::harness::{generate_mixture, synth_library, MixtureTruth};
use unmix::linalg::mat_vec;

fn main() {
    let lib = synth_library(20, 30, 14);
    let truth = MixtureTruth::new(vec![3, 12], vec![0.65, 0.35], 0.002, 21).unwrap();
    let pixel = generate_mixture(&lib, &truth);
    let cfg = BmaConfig {
        n_models: 3000,
        seed: 7,
        ..BmaConfig::default()
    };

    let ensemble = bma_ensemble_over(lib.columns(), &pixel.values, &cfg);
    let mut by_weight: Vec<_> = ensemble.models.iter().collect();
    by_weight.sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap());
    println!("ensembled {} models; heaviest five:", ensemble.models.len());
    for m in by_weight.iter().take(5) {
        println!(
            "  support {:?} weight {:.4} bic {:.2}",
            m.support, m.weight, m.bic
        );
    }
    let total: f64 = ensemble.models.iter().map(|m| m.weight).sum();
    println!("weights sum to {total:.12}");

    let model = unmix_bma(&pixel.values, &lib, &cfg);
    println!(
        "averaged abundances: a3 = {:.4}, a12 = {:.4}, support {:?}",
        model.abundances[3], model.abundances[12], model.support
    );

    // Quadratic stage: plant a genuine interaction and watch it rank
    // first among all candidate pairs.
    let aug = build_quadratic_features(&lib, &[(3, 12)]).unwrap();
    let mut weights = vec![0.0; aug.n_spectra()];
    weights[3] = 0.5;
    weights[12] = 0.3;
    weights[20] = 0.2; // the (3, 12) interaction column
    let y = mat_vec(aug.columns(), &weights).unwrap();
    let q = unmix_bma_q(&y, &lib, &cfg);
    let mut interactions = q.interactions.clone();
    interactions.sort_by(|a, b| b.strength.partial_cmp(&a.strength).unwrap());
    println!("interaction strengths (top 3 of {}):", interactions.len());
    for term in interactions.iter().take(3) {
        println!("  {:?}: {:.4}", term.pair, term.strength);
    }
}
