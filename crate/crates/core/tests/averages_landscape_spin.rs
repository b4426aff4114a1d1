use qfi_lab::averages::{
    avg_fisher_analytic, avg_gap_analytic, avg_qfi_analytic, avg_variance_analytic, average_all, generator_count,
};
use qfi_lab::hermitian::{random_density_matrix, rng_from_seed, DensityMatrix};
use qfi_lab::landscape::{
    global_min_probe, hessian_min_eig, interior_grid, lambda_for_exp_entropy, white_noise_curve, WhiteNoiseFamily,
};
use qfi_lab::metrology::MonotoneMean;
use qfi_lab::spin::{
    collective_operator, ghz_purity_relation, heisenberg_scaling_condition, noisy_ghz, plus_product, shot_noise_check,
    Axis, GhzSubspaceState,
};

fn spectrum(d: usize, seed: u64) -> Vec<f64> {
    random_density_matrix::<f64, _>(d, d, &mut rng_from_seed(seed)).unwrap().eigenvalues().to_vec()
}

#[test]
fn analytic_averages_match_sums_over_pairs() {
    for d in 2..=7 {
        let l = spectrum(d, d as u64);
        let ng = generator_count(d) as f64;
        let p2: f64 = l.iter().map(|x| x * x).sum();
        assert!((avg_variance_analytic(&l) - 2.0 * (d as f64 - p2) / ng).abs() < 1e-13);
        let mut q = 0.0;
        for a in &l {
            for b in &l {
                q += 4.0 * (a - b) * (a - b) / (a + b) / ng;
            }
        }
        assert!((avg_qfi_analytic(&l) - q).abs() < 1e-12);
        assert!((avg_gap_analytic(&l) - (avg_variance_analytic(&l) - q / 4.0)).abs() < 1e-13);
    }
}

#[test]
fn monte_carlo_is_reproducible_and_reported_with_its_error() {
    let rho = random_density_matrix::<f64, _>(3, 3, &mut rng_from_seed(5)).unwrap();
    let a = average_all(&rho, 4000, 11).unwrap();
    let b = average_all(&rho, 4000, 11).unwrap();
    assert_eq!(a, b);
    for r in [a.variance, a.qfi, a.gap, a.qfi_math.unwrap(), a.qfi_kmb.unwrap()] {
        assert_eq!(r.samples, 4000);
        assert!(r.monte_carlo_stderr > 0.0 && r.agrees_within(5.0));
    }
    let singular = random_density_matrix::<f64, _>(3, 2, &mut rng_from_seed(5)).unwrap();
    let s = average_all(&singular, 500, 1).unwrap();
    assert!(s.qfi_math.is_none() && s.qfi_kmb.is_none());
}

#[test]
fn white_noise_curve_matches_the_spectral_average() {
    for d in [2, 3, 6, 11, 25] {
        for p in white_noise_curve::<f64>(d, &interior_grid(d, 12)).unwrap() {
            let l = WhiteNoiseFamily::new(d, p.lambda).unwrap().eigenvalues();
            let math = avg_fisher_analytic(&l, MonotoneMean::Arithmetic).unwrap();
            let kmb = avg_fisher_analytic(&l, MonotoneMean::Logarithmic).unwrap();
            assert!((p.avg_qfi_math - math).abs() <= 1e-10 * math);
            assert!((p.avg_qfi_kmb - kmb).abs() <= 1e-10 * kmb);
            assert!(p.avg_qfi_kmb >= p.avg_qfi_math);
        }
    }
}

#[test]
fn exp_entropy_inversion_round_trips() {
    for d in [3, 5, 9] {
        for target in [1.2, 0.5 * (1.0 + d as f64), d as f64 - 0.1] {
            let l = lambda_for_exp_entropy::<f64>(d, target).unwrap();
            let e = WhiteNoiseFamily::new(d, l).unwrap().exp_entropy();
            assert!((e - target).abs() < 1e-9, "d={d} target={target} got {e}");
        }
    }
    assert!(lambda_for_exp_entropy::<f64>(4, 1.0).is_err());
    assert!(lambda_for_exp_entropy::<f64>(4, 4.5).is_err());
}

#[test]
fn hessian_is_positive_along_the_family() {
    for d in [3, 8, 16] {
        for l in interior_grid::<f64>(d, 7) {
            assert!(hessian_min_eig(d, l).unwrap() > 0.0);
        }
    }
}

#[test]
fn search_does_not_undercut_white_noise() {
    let r = global_min_probe::<f64>(4, 2.5, 8, 3).unwrap();
    assert!(r.margin() >= -1e-6, "margin {}", r.margin());
    let s: f64 = r.best_spectrum.iter().sum();
    assert!((s - 1.0).abs() < 1e-9);
}

#[test]
fn noisy_ghz_interpolates_between_n_squared_and_zero() {
    for n in 2..=6 {
        for (p, want) in [(0.0f64, 1.0f64), (0.5, 0.25), (1.0, 0.0)] {
            let rel = ghz_purity_relation(&GhzSubspaceState::noisy_ghz(n, p).unwrap()).unwrap();
            assert!((rel.lhs - want).abs() < 1e-12 && rel.holds);
        }
        assert_eq!(noisy_ghz::<f64>(n, 0.3).unwrap().dim(), 1 << n);
    }
}

#[test]
fn product_states_and_spin_operators() {
    for n in 1..=6 {
        let r = shot_noise_check(&plus_product::<f64>(n), Axis::Z).unwrap();
        assert!((r.qfi - n as f64).abs() < 1e-10 && r.holds());
        let jz = collective_operator::<f64>(n, Axis::Z).unwrap().operator;
        let top = jz.eigenvalues()[0];
        assert!((top - n as f64 / 2.0).abs() < 1e-12);
    }
    assert!(collective_operator::<f64>(9, Axis::X).is_err());
}

#[test]
fn scaling_rows_respect_the_budget() {
    let family: Vec<(usize, DensityMatrix<f64>)> = (2..=5).map(|n| (n, noisy_ghz(n, 0.1).unwrap())).collect();
    for row in heisenberg_scaling_condition(&family, 0.1, Axis::Z).unwrap() {
        assert!(row.gap_bound_holds && row.within_budget);
        assert!(row.qfi_per_n2 >= row.qfi_per_n2_lower_bound - 1e-12);
    }
}
