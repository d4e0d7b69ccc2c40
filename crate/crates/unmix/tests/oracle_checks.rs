//! Derived-value checks: every solver is compared against an independent
//! oracle on seeded instances.

mod common;

use common::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unmix::ensemble::{unmix_bma_q, BmaConfig};
use unmix::harness::{generate_mixture, synth_library, synth_library_separated, MixtureTruth};
use unmix::linalg::{lstsq_min_norm, mat_vec, Matrix};
use unmix::solvers::{
    lasso_cd, lasso_kkt_residual, lasso_objective, nnls, stepwise_pvalues, unmix_fsr, unmix_ols,
    SolverConfig,
};
use unmix::spectra::{SpectralLibrary, Spectrum};

fn library_from_matrix(m: &Matrix) -> SpectralLibrary {
    let grid: Vec<f64> = (0..m.rows).map(|i| 2.0 + 0.01 * i as f64).collect();
    let spectra: Vec<Spectrum> = (0..m.cols)
        .map(|j| Spectrum::new(format!("m{j:03}"), grid.clone(), m.col(j)).unwrap())
        .collect();
    SpectralLibrary::from_spectra(&spectra).unwrap()
}

#[test]
fn svd_singular_values_match_jacobi_across_shapes() {
    // The production SVD (Golub-Reinsch) and the oracle (one-sided
    // Jacobi) are independent algorithms; their singular values must
    // agree on every shape class, including graded and nearly
    // rank-deficient matrices.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut cases: Vec<Matrix> = Vec::new();
    for &(m, n) in &[(1usize, 1usize), (2, 5), (5, 2), (7, 7), (12, 6), (6, 12), (9, 9)] {
        cases.push(random_design(&mut rng, m, n, -1.0, 1.0));
    }
    // Graded singular spectrum over 10 decades.
    let mut graded = Matrix::zeros(8, 8);
    for i in 0..8 {
        graded.set(i, i, 10f64.powi(-(i as i32) - 1));
    }
    cases.push(graded);
    // Repeated singular values.
    let mut repeated = Matrix::zeros(6, 4);
    for i in 0..4 {
        repeated.set(i, i, 2.0);
    }
    cases.push(repeated);
    for _ in 0..6 {
        cases.push(random_rank_deficient(&mut rng, 9, 7, 3));
    }
    for (idx, a) in cases.iter().enumerate() {
        let (_, s_impl, _) = unmix::linalg::svd_thin(a);
        let (_, s_oracle, _) = jacobi_svd(a);
        assert_eq!(s_impl.len(), s_oracle.len());
        let scale = s_oracle.first().copied().unwrap_or(0.0).max(1e-30);
        for (p, q) in s_impl.iter().zip(&s_oracle) {
            assert!(
                (p - q).abs() <= 1e-10 * scale,
                "case {idx}: singular values {p} vs {q}"
            );
        }
    }
}

#[test]
fn lstsq_matches_jacobi_pinv_on_rank_deficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..20 {
        let a = random_rank_deficient(&mut rng, 10, 20, 8);
        let b: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = lstsq_min_norm(&a, &b, 1e-10).unwrap();
        let x_oracle = pinv_apply(&a, &b, 1e-10);
        let diff = max_abs_diff(&x, &x_oracle);
        assert!(diff <= 1e-8, "trial {trial}: max diff {diff}");
    }
}

#[test]
fn lstsq_solution_orthogonal_to_null_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..10 {
        let b_fac = random_design(&mut rng, 10, 8, -1.0, 1.0);
        let c_fac = random_design(&mut rng, 8, 20, -1.0, 1.0);
        let mut a = Matrix::zeros(10, 20);
        for i in 0..10 {
            for j in 0..20 {
                let mut s = 0.0;
                for t in 0..8 {
                    s += b_fac.get(i, t) * c_fac.get(t, j);
                }
                a.set(i, j, s);
            }
        }
        let rhs: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = lstsq_min_norm(&a, &rhs, 1e-10).unwrap();
        for _ in 0..4 {
            let v = null_space_vector(&c_fac, &mut rng);
            // v is in the null space of A = B C by construction.
            let av = mat_vec(&a, &v).unwrap();
            let av_norm: f64 = av.iter().map(|t| t * t).sum::<f64>().sqrt();
            assert!(av_norm <= 1e-10, "not a null vector: {av_norm}");
            let dot: f64 = x.iter().zip(&v).map(|(p, q)| p * q).sum();
            let xn: f64 = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            assert!(dot.abs() <= 1e-8 * xn.max(1e-30), "x not orthogonal: {dot}");
        }
    }
}

#[test]
fn ols_overcomplete_matches_min_norm_oracle() {
    // More spectra than bands with y inside the column span.
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let design = random_design(&mut rng, 12, 30, 0.0, 1.0);
    let lib = library_from_matrix(&design);
    let mut weights = vec![0.0; 30];
    weights[4] = 0.6;
    weights[17] = 0.4;
    let y = mat_vec(&design, &weights).unwrap();
    let model = unmix_ols(&y, &lib, &SolverConfig::default()).unwrap();
    assert!(model.rmse <= 1e-10);
    let oracle = pinv_apply(&design, &y, 1e-10);
    assert!(max_abs_diff(&model.abundances, &oracle) <= 1e-8);
}

#[test]
fn nnls_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for trial in 0..10 {
        let s = random_design(&mut rng, 12, 8, 0.0, 1.0);
        let members = distinct_indices(&mut rng, 8, 3);
        let mix = dirichlet_min(&mut rng, 3, 0.05);
        let mut weights = vec![0.0; 8];
        for (&j, &a) in members.iter().zip(&mix) {
            weights[j] = a;
        }
        let mut y = mat_vec(&s, &weights).unwrap();
        for v in y.iter_mut() {
            *v += rng.random_range(-0.02..0.02);
        }
        let fit = nnls(&s, &y).unwrap();
        let oracle = nnls_enumerate(&s, &y);
        let diff = max_abs_diff(&fit.coeffs, &oracle);
        assert!(diff <= 1e-8, "trial {trial}: diff {diff}");
    }
}

#[test]
fn lasso_beats_long_run_projected_gradient() {
    // Small instance, plain projected gradient with step 1/||S^T S|| run
    // to a million iterations.
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let s = random_design(&mut rng, 10, 6, 0.0, 1.0);
    let y: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..1.0)).collect();
    for positive in [true, false] {
        let fit = lasso_cd(&s, &y, 1e-3, positive, 100_000, 1e-12).unwrap();
        assert!(fit.converged);
        let oracle = pg_lasso(&s, &y, 1e-3, positive, 1_000_000);
        let obj_cd = lasso_objective(&s, &y, &fit.coeffs, 1e-3);
        let obj_pg = lasso_objective(&s, &y, &oracle, 1e-3);
        assert!(
            obj_cd <= obj_pg + 1e-8,
            "positive {positive}: {obj_cd} vs {obj_pg}"
        );
        let kkt = lasso_kkt_residual(&s, &y, &fit.coeffs, 1e-3, positive);
        assert!(kkt <= 1e-6, "kkt {kkt}");
    }
}

#[test]
fn stepwise_pvalues_match_hand_t_test() {
    // 5 observations, 3 columns: df = 2 has a closed-form two-sided
    // p-value, and the whole chain is reproduced with explicit cofactor
    // inversion.
    let s = Matrix::from_cols(&[
        vec![1.0, 0.9, 0.1, 0.2, 0.4],
        vec![0.1, 0.3, 1.0, 0.8, 0.3],
        vec![0.5, 0.2, 0.4, 0.1, 0.9],
    ]);
    let y = vec![0.8, 0.9, 0.6, 0.55, 0.7];
    let got = stepwise_pvalues(&y, &s).unwrap();

    // Independent route: normal equations assembled and inverted by hand.
    let mut g = [[0.0_f64; 3]; 3];
    let mut h = [0.0_f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            for r in 0..5 {
                g[i][j] += s.get(r, i) * s.get(r, j);
            }
        }
        for r in 0..5 {
            h[i] += s.get(r, i) * y[r];
        }
    }
    let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    let cof = |r: usize, c: usize| -> f64 {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let minor = g[rows[0]][cols[0]] * g[rows[1]][cols[1]]
            - g[rows[0]][cols[1]] * g[rows[1]][cols[0]];
        if (r + c) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    // inverse[i][j] = cofactor(j, i) / det
    let mut inv = [[0.0_f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = cof(j, i) / det;
        }
    }
    let mut coef = [0.0_f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            coef[i] += inv[i][j] * h[j];
        }
    }
    let mut rss = 0.0;
    for r in 0..5 {
        let pred: f64 = (0..3).map(|j| s.get(r, j) * coef[j]).sum();
        rss += (y[r] - pred) * (y[r] - pred);
    }
    let sigma2 = rss / 2.0;
    for j in 0..3 {
        let t = coef[j] / (sigma2 * inv[j][j]).sqrt();
        // df = 2 closed form: P(|T| > t) = 1 - |t| / sqrt(2 + t^2).
        let expect = 1.0 - t.abs() / (2.0 + t * t).sqrt();
        assert!(
            (got[j] - expect).abs() <= 1e-10,
            "p[{j}] = {} vs hand {expect}",
            got[j]
        );
    }
}

#[test]
fn fsr_matches_exhaustive_best_subset_on_noiseless_mixture() {
    let lib = synth_library(12, 16, 300);
    let truth = MixtureTruth::new(vec![3, 8], vec![0.7, 0.3], 0.0, 0).unwrap();
    let y = generate_mixture(&lib, &truth).values;
    let model = unmix_fsr(&y, &lib, &SolverConfig::default()).unwrap();
    assert_eq!(model.support, vec![3, 8]);
    assert!((model.abundances[3] - 0.7).abs() <= 1e-8);
    assert!((model.abundances[8] - 0.3).abs() <= 1e-8);

    // Exhaustive best-subset search over sizes 1..=3 confirms {3, 8} is
    // the smallest exact support.
    let s = lib.columns();
    let mut best: Option<(usize, Vec<usize>, f64)> = None;
    for size in 1..=3usize {
        let mut indices: Vec<usize> = (0..size).collect();
        loop {
            let sub = s.select_columns(&indices);
            let x = pinv_apply(&sub, &y, 1e-12);
            let mut rss = 0.0;
            for i in 0..s.rows {
                let mut pred = 0.0;
                for (k, &j) in indices.iter().enumerate() {
                    pred += s.get(i, j) * x[k];
                }
                rss += (y[i] - pred) * (y[i] - pred);
            }
            if best.as_ref().map_or(true, |(_, _, b)| rss < b - 1e-18) {
                best = Some((size, indices.clone(), rss));
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if indices[i] != i + lib.n_spectra() - size {
                    indices[i] += 1;
                    for k in (i + 1)..size {
                        indices[k] = indices[k - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    indices.clear();
                    break;
                }
            }
            if indices.is_empty() {
                break;
            }
            if indices.len() != size {
                break;
            }
        }
    }
    let (_, best_subset, best_rss) = best.unwrap();
    assert!(best_rss <= 1e-18);
    assert_eq!(best_subset, vec![3, 8]);
}

#[test]
fn bma_q_flags_true_interaction() {
    let lib = synth_library(5, 20, 301);
    let aug = unmix::ensemble::build_quadratic_features(&lib, &[(1, 2)]).unwrap();
    // Pixel with a genuine pairwise interaction between spectra 1 and 2.
    let mut weights = vec![0.0; aug.n_spectra()];
    weights[1] = 0.5;
    weights[2] = 0.3;
    weights[5] = 0.2;
    let y = mat_vec(aug.columns(), &weights).unwrap();
    let cfg = BmaConfig {
        n_models: 4000,
        seed: 9,
        ..BmaConfig::default()
    };
    let model = unmix_bma_q(&y, &lib, &cfg);
    let target = model
        .interactions
        .iter()
        .find(|t| t.pair == (1, 2))
        .expect("pair (1,2) was ranked into the interaction set");
    for term in &model.interactions {
        if term.pair != (1, 2) {
            assert!(
                target.strength > term.strength,
                "expected (1,2) to dominate, but {:?} has {}",
                term.pair,
                term.strength
            );
        }
    }
}

#[test]
fn mixture_noise_matches_requested_sigma() {
    // Big synthetic grid: the empirical noise std estimates sigma well.
    let grid: Vec<f64> = (0..10_000).map(|i| 2.0 + 1e-4 * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|wl| 0.4 + 0.1 * (wl * 3.0).sin()).collect();
    let lib = SpectralLibrary::from_spectra(&[
        Spectrum::new("s0", grid.clone(), values.clone()).unwrap()
    ])
    .unwrap();
    let truth = MixtureTruth::new(vec![0], vec![1.0], 0.01, 77).unwrap();
    let px = generate_mixture(&lib, &truth);
    let residuals: Vec<f64> = px.values.iter().zip(&values).map(|(a, b)| a - b).collect();
    let mean: f64 = residuals.iter().sum::<f64>() / residuals.len() as f64;
    let var: f64 = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
        / (residuals.len() - 1) as f64;
    let std = var.sqrt();
    assert!(
        (std - 0.01).abs() <= 0.0003,
        "empirical std {std} not within 3% of 0.01"
    );
}

#[test]
fn bsr_screening_keeps_true_members_noiseless() {
    // Overcomplete designs, noiseless two-member mixtures: the final model
    // must contain the true support.
    let cfgs = SolverConfig::default();
    let mut failures = 0;
    for seed in 0..100u64 {
        // Moderate separation: with near-twin spectra the exact
        // representation can legitimately sit on a member's double.
        let lib = synth_library_separated(30, 25, 400 + seed, 0.9, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
        let members = distinct_indices(&mut rng, 30, 2);
        let truth =
            MixtureTruth::new(members.clone(), vec![0.7, 0.3], 0.0, seed).unwrap();
        let y = generate_mixture(&lib, &truth).values;
        let model = unmix::solvers::unmix_bsr(&y, &lib, &cfgs).unwrap();
        if !members.iter().all(|j| model.support.contains(j)) {
            failures += 1;
        }
    }
    assert_eq!(failures, 0, "{failures} of 100 instances lost a true member");
}
