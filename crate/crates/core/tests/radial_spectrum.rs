//! Oracle-equivalence tests for the radial shooting solver.

mod common;

use common::{bessel_j, disk_gamma, interval_eigenvalue, J0_ZEROS};
use plap_core::radial::{
    integrate_radial, nodal_radius_report, radial_eigenvalue, StepControl,
};
use plap_core::scale_eigenvalue;

#[test]
fn disk_spectrum_matches_bessel_zero_squares() {
    for n in 1..=4 {
        let pair = radial_eigenvalue(2.0, 2, n, 1e-10).unwrap();
        let exact = disk_gamma(n);
        let rel = (pair.lambda - exact).abs() / exact;
        assert!(rel < 1e-5, "n={n}: {} vs {exact} (rel {rel:.2e})", pair.lambda);
        assert_eq!(pair.radial_solution().unwrap().zero_count, n - 1);
    }
}

#[test]
fn ball_3d_spectrum_is_n_pi_squared() {
    for n in 1..=4 {
        let pair = radial_eigenvalue(2.0, 3, n, 1e-10).unwrap();
        let exact = (n as f64 * std::f64::consts::PI).powi(2);
        let rel = (pair.lambda - exact).abs() / exact;
        assert!(rel < 1e-5, "n={n}: {} vs {exact}", pair.lambda);
    }
}

#[test]
fn interval_spectrum_closed_form() {
    for &p in &[1.5, 2.0, 3.0, 5.0] {
        for n in 1..=4 {
            let pair = radial_eigenvalue(p, 1, n, 1e-10).unwrap();
            let exact = interval_eigenvalue(p, n);
            let rel = (pair.lambda - exact).abs() / exact;
            assert!(rel < 1e-6, "p={p} n={n}: {} vs {exact} (rel {rel:.2e})", pair.lambda);
        }
    }
}

#[test]
fn p3_interval_second_eigenvalue_example() {
    // 2 * (2 pi_3)^3 ~ 226.31
    let pair = radial_eigenvalue(3.0, 1, 2, 1e-10).unwrap();
    assert!((pair.lambda - 226.3116).abs() < 0.1, "{}", pair.lambda);
}

#[test]
fn spectra_are_strictly_ordered() {
    for &p in &[1.5, 2.0, 3.0, 5.0] {
        for dim in [1u32, 2, 3] {
            let gammas: Vec<f64> = (1..=6)
                .map(|n| radial_eigenvalue(p, dim, n, 1e-8).unwrap().lambda)
                .collect();
            for w in gammas.windows(2) {
                assert!(w[0] < w[1], "p={p} N={dim}: {gammas:?}");
            }
        }
    }
}

#[test]
fn node_count_is_monotone_in_lambda() {
    let ctrl = StepControl::default();
    for &p in &[1.5, 2.0, 3.0, 5.0] {
        for dim in [1u32, 2, 3] {
            let mut last = 0;
            for k in 0..30 {
                let lambda = 6.0 * k as f64;
                let count = integrate_radial(p, dim, lambda, &ctrl).unwrap().zero_count;
                assert!(
                    count >= last,
                    "p={p} N={dim} lambda={lambda}: count {count} < {last}"
                );
                last = count;
            }
        }
    }
}

#[test]
fn disk_trajectory_matches_bessel_profile() {
    // At lambda = j_{0,1}^2 the normalized trajectory is J_0(j_{0,1} r).
    let lambda = disk_gamma(1);
    let sol = integrate_radial(2.0, 2, lambda, &StepControl::default()).unwrap();
    assert!(sol.endpoint().abs() < 1e-6);
    for (&r, &u) in sol.grid.iter().zip(&sol.u) {
        let exact = bessel_j(0, J0_ZEROS[0] * r);
        assert!((u - exact).abs() < 1e-6, "r={r}: {u} vs {exact}");
    }
}

#[test]
fn nodal_radius_oracles() {
    // N=2, p=2: r* = j01/j02; N=3 and N=1: r* = 1/2 exactly.
    let r2 = nodal_radius_report(2.0, 2, 1e-8).unwrap();
    assert!((r2.r_star - J0_ZEROS[0] / J0_ZEROS[1]).abs() < 1e-5, "{}", r2.r_star);
    assert!(!r2.in_half_one_interval);
    let r3 = nodal_radius_report(2.0, 3, 1e-8).unwrap();
    assert!((r3.r_star - 0.5).abs() < 1e-6, "{}", r3.r_star);
    let r1 = nodal_radius_report(2.0, 1, 1e-8).unwrap();
    assert!((r1.r_star - 0.5).abs() < 1e-6, "{}", r1.r_star);
}

#[test]
fn nodal_radius_scaling_consistency_across_matrix() {
    for &p in &[1.5, 2.0, 3.0, 5.0] {
        for dim in [1u32, 2, 3] {
            let rep = nodal_radius_report(p, dim, 1e-8).unwrap();
            let scaled = scale_eigenvalue(rep.gamma_1, rep.r_star, p).unwrap();
            let rel = (scaled - rep.gamma_2).abs() / rep.gamma_2;
            assert!(rel < 1e-4, "p={p} N={dim}: rel {rel:.2e}");
        }
    }
}
