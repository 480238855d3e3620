//! Shared oracles for the integration tests.
//!
//! Everything here is independent of the library's solver paths: Bessel
//! functions come from the power series, the reference zeros are standard
//! tabulated values (re-verified against the series by `oracle_self_check`),
//! and the annulus eigenvalue oracle uses a fixed-step RK4 shooter.

#![allow(dead_code)]

/// First zeros of J_0.
pub const J0_ZEROS: [f64; 6] = [
    2.404825557695773,
    5.520078110286311,
    8.653727912911013,
    11.791534439014281,
    14.930917708487787,
    18.071063967910924,
];
/// First zeros of J_1 .. J_4.
pub const J1_1: f64 = 3.831705970207512;
pub const J2_1: f64 = 5.135622301840683;
pub const J3_1: f64 = 6.380161895923984;
pub const J4_1: f64 = 7.588342434503804;

/// Disk eigenvalue oracles at p = 2.
pub fn disk_lambda1() -> f64 {
    J0_ZEROS[0] * J0_ZEROS[0]
}
pub fn disk_gamma(n: usize) -> f64 {
    J0_ZEROS[n - 1] * J0_ZEROS[n - 1]
}
pub fn half_disk_lambda1() -> f64 {
    J1_1 * J1_1
}
pub fn quarter_disk_lambda1() -> f64 {
    J2_1 * J2_1
}
pub fn sector_lambda1(n: usize) -> f64 {
    let j = [J1_1, J2_1, J3_1, J4_1][n - 1];
    j * j
}

/// Bessel function of the first kind, integer order, by the power series.
/// Accurate to ~1e-10 absolute for |x| <= 19.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let mut sum = term;
    let x2 = -half * half;
    for m in 1..200 {
        term *= x2 / (m as f64 * (m + order) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-18) {
            break;
        }
    }
    sum
}

/// `pi_p = 2 pi / (p sin(pi / p))`.
pub fn pi_p(p: f64) -> f64 {
    2.0 * std::f64::consts::PI / (p * (std::f64::consts::PI / p).sin())
}

/// 1-D Dirichlet spectrum on (0, 1): `(p - 1) (n pi_p)^p`.
pub fn interval_eigenvalue(p: f64, n: usize) -> f64 {
    (p - 1.0) * (n as f64 * pi_p(p)).powf(p)
}

fn phi(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(p - 1.0) * s.signum()
    }
}

/// Endpoint value and interior sign changes for the radial two-point
/// problem on `(a, 1)` with `u(a) = 0`, `u'(a) = 1`, via fixed-step RK4 on
/// the flux system (dimension 2).
fn annulus_shoot(p: f64, a: f64, lambda: f64, steps: usize) -> (f64, usize) {
    let q = p / (p - 1.0);
    let rhs = |r: f64, y: [f64; 2]| -> [f64; 2] {
        [phi(y[1] / r, q), -lambda * r * phi(y[0], p)]
    };
    let h = (1.0 - a) / steps as f64;
    let mut r = a;
    let mut y = [0.0, a]; // w(a) = a * phi_p(u'(a)) = a
    let mut crossings = 0;
    let mut last_sign = 0.0f64;
    for _ in 0..steps {
        let k1 = rhs(r, y);
        let k2 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        r += h;
        if y[0] != 0.0 && r < 1.0 - 1e-12 {
            if last_sign != 0.0 && y[0].signum() != last_sign {
                crossings += 1;
            }
            last_sign = y[0].signum();
        }
    }
    (y[0], crossings)
}

/// First Dirichlet eigenvalue of the concentric annulus `a < |x| < 1` in the
/// plane, by bisection on the RK4 shooter.
pub fn annulus_lambda1(p: f64, a: f64) -> f64 {
    let steps = 4000;
    let past_first = |lambda: f64| -> bool {
        let (u1, crossings) = annulus_shoot(p, a, lambda, steps);
        crossings >= 1 || u1 < 0.0
    };
    let mut hi = 1.0;
    while !past_first(hi) {
        hi *= 2.0;
        assert!(hi < 1e9, "annulus oracle failed to bracket");
    }
    let mut lo = hi / 2.0;
    while past_first(lo) {
        hi = lo;
        lo /= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if past_first(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn oracle_self_check() {
    // The frozen zeros satisfy the series to the series' accuracy.
    for (i, &z) in J0_ZEROS.iter().enumerate() {
        let tol = if i < 2 { 1e-12 } else { 5e-9 };
        assert!(bessel_j(0, z).abs() < tol, "J0({z}) = {:e}", bessel_j(0, z));
    }
    assert!(bessel_j(1, J1_1).abs() < 1e-12);
    assert!(bessel_j(2, J2_1).abs() < 1e-12);
    assert!(bessel_j(3, J3_1).abs() < 1e-12);
    assert!(bessel_j(4, J4_1).abs() < 1e-11);
    // pi_2 = pi, so the interval spectrum collapses to (n pi)^2.
    assert!((interval_eigenvalue(2.0, 1) - std::f64::consts::PI.powi(2)).abs() < 1e-12);
    // The annulus oracle endpoint vanishes at its eigenvalue and is stable
    // when the step count doubles.
    let lam = annulus_lambda1(2.0, 0.3);
    let (u1, crossings) = annulus_shoot(2.0, 0.3, lam, 8000);
    let (scale, _) = annulus_shoot(2.0, 0.3, lam * 0.9, 8000);
    assert_eq!(crossings, 0);
    assert!(u1.abs() < 1e-6 * scale.abs().max(1e-3), "u(1) = {u1:e}");
}
