//! How the two penalized regressions behave as their strength grows:
//! ridge shrinks every coefficient but rarely zeroes one, lasso zeroes
//! coefficients and walks a sparsity path.
//!
//! Run with `cargo run --example regularization_paths`.

use unmix::harness::{generate_mixture, synth_library, MixtureTruth};
use unmix::linalg::norm2;
use unmix::solvers::{unmix_lasso, unmix_ridge, SolverConfig};

fn main() {
    let lib = synth_library(60, 50, 5);
    let truth = MixtureTruth::new(vec![8, 31, 47], vec![0.5, 0.3, 0.2], 0.003, 11).unwrap();
    let pixel = generate_mixture(&lib, &truth);

    println!("ridge path (coefficient norm never grows with lambda):");
    for lambda in [0.0, 0.01, 0.1, 1.0, 10.0, 100.0] {
        let mut cfg = SolverConfig::default();
        cfg.ridge_lambda = lambda;
        let m = unmix_ridge(&pixel.values, &lib, &cfg).unwrap();
        println!(
            "  lambda {lambda:>7.3}: ||a|| = {:.5}, model size {:>3}, a8 = {:+.4}",
            norm2(&m.abundances),
            m.model_size,
            m.abundances[8]
        );
    }

    println!("lasso path (support shrinks as lambda grows):");
    for lambda in [1e-5, 1e-4, 1e-3, 1e-2, 1e-1] {
        let mut cfg = SolverConfig::default();
        cfg.lasso_lambda = lambda;
        let m = unmix_lasso(&pixel.values, &lib, &cfg).unwrap();
        let true_kept = [8, 31, 47]
            .iter()
            .filter(|&&j| m.support.contains(&j))
            .count();
        println!(
            "  lambda {lambda:>7.5}: model size {:>3} ({} of 3 true members), rmse {:.2e}, converged {}",
            m.model_size, true_kept, m.rmse, m.converged
        );
    }
}
