//! The full evaluation harness: every technique on one synthetic region
//! of interest, with regional aggregation, detection, and timing.
//!
//! Run with `cargo run --release --example technique_comparison`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unmix::ensemble::BmaConfig;
use unmix::harness::{generate_mixture, run_comparison, synth_library, MixtureTruth};
use unmix::solvers::{SolverConfig, Technique};
use unmix::spectra::RegionOfInterest;

fn main() {
    // Overcomplete setting: 120 library spectra, 50 bands, 10 pixels that
    // all contain the target plus two other materials.
    let lib = synth_library(120, 50, 77);
    let target = 11usize;
    let mut pixels = Vec::new();
    for i in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + i);
        let mut members = vec![target];
        while members.len() < 3 {
            let j = rng.random_range(0..lib.n_spectra());
            if !members.contains(&j) {
                members.push(j);
            }
        }
        members.sort_unstable();
        let pos = members.iter().position(|&j| j == target).unwrap();
        let mut abunds = vec![0.5, 0.3, 0.2];
        abunds.swap(0, pos);
        let truth = MixtureTruth::new(members, abunds, 0.003, 7000 + i).unwrap();
        pixels.push(generate_mixture(&lib, &truth));
    }
    let roi = RegionOfInterest {
        label: "synthetic_hill".to_string(),
        target_name: lib.names()[target].clone(),
        pixels,
    };

    let bma = BmaConfig {
        n_models: 4000,
        ..BmaConfig::default()
    };
    let rows = run_comparison(&roi, &lib, &Technique::ALL, &SolverConfig::default(), &bma)
        .expect("target resolves");

    println!(
        "{:<7} {:>5} {:>7} {:>10} {:>9} {:>12}",
        "tech", "size", "nonneg", "best_rmse", "detected", "s/pixel"
    );
    for row in &rows {
        match &row.outcome {
            Ok(s) => println!(
                "{:<7} {:>5} {:>7} {:>10.5} {:>9} {:>12.4}",
                row.technique.to_string(),
                s.regional_size,
                s.all_nonneg,
                s.best_rmse,
                s.target_detected,
                s.mean_elapsed
            ),
            Err(e) => println!("{:<7} failed: {e}", row.technique.to_string()),
        }
    }
}
