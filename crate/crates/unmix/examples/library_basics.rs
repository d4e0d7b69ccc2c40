//! Building a spectral library, validating it, selecting a band range,
//! and round-tripping it through CSV.
//!
//! Run with `cargo run --example library_basics`.

use unmix::cli::{library_to_csv, load_library_csv, save_library_csv};
use unmix::spectra::{resolve_target, select_bands, validate_library, Spectrum};
use unmix::SpectralLibrary;

fn main() {
    // A small hand-built library on a 0.4-2.5 micrometer grid.
    let grid: Vec<f64> = (0..211).map(|i| 0.4 + 0.01 * i as f64).collect();
    let curve = |phase: f64, depth: f64| -> Vec<f64> {
        grid.iter()
            .map(|&wl| 0.35 + depth * ((wl + phase) * 4.0).sin().abs() - 0.1 * (wl - 1.5).abs())
            .map(|v| v.clamp(0.02, 1.0))
            .collect()
    };
    let lib = SpectralLibrary::from_spectra(&[
        Spectrum::new("alunite", grid.clone(), curve(0.0, 0.25)).unwrap(),
        Spectrum::new("kaolinite", grid.clone(), curve(0.4, 0.2)).unwrap(),
        Spectrum::new("muscovite", grid.clone(), curve(0.9, 0.3)).unwrap(),
    ])
    .unwrap();
    println!(
        "library: {} spectra x {} bands, findings: {:?}",
        lib.n_spectra(),
        lib.n_bands(),
        validate_library(&lib)
    );
    println!("index of kaolinite: {}", resolve_target(&lib, "kaolinite").unwrap());
    match resolve_target(&lib, "Kaolinite") {
        Err(e) => println!("exact-match miss: {e}"),
        Ok(_) => unreachable!(),
    }

    // Restrict to the 2.0-2.5 micrometer window, inclusive on both ends.
    let (sub, _) = select_bands(&lib, &[], 2.0, 2.5).unwrap();
    println!(
        "selected 2.0-2.5 um: {} of {} bands, grid {:.2}..{:.2}",
        sub.n_bands(),
        lib.n_bands(),
        sub.grid()[0],
        sub.grid()[sub.n_bands() - 1]
    );

    // CSV round trip preserves every value bit for bit.
    let dir = std::env::temp_dir().join("unmix_library_basics");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("library.csv");
    save_library_csv(&sub, &path).unwrap();
    let loaded = load_library_csv(&path).unwrap();
    assert_eq!(loaded, sub);
    println!(
        "round trip through {} ok ({} bytes)",
        path.display(),
        library_to_csv(&sub).len()
    );
}
