//! Radial spectrum of the p-Laplacian on the unit ball by shooting.
//!
//! A number `lambda` is a radial eigenvalue if and only if
//!
//! ```text
//! -(r^{N-1} |u'|^{p-2} u')' = lambda r^{N-1} |u|^{p-2} u   on (0, 1),
//! u'(0) = 0,  u(1) = 0
//! ```
//!
//! has a nonzero solution. In flux form the trajectory is the first-order
//! system `u' = phi_q(w / r^{N-1})`, `w' = -lambda r^{N-1} phi_p(u)` with
//! `q = p/(p-1)`, which stays smooth through the origin singularity. The
//! n-th eigenvalue `gamma_n` is the unique `lambda` whose trajectory ends at
//! `u(1) = 0` after exactly `n - 1` interior sign changes; it is located by
//! geometric bracket growth, bisection on the node count and safeguarded
//! secant steps on the endpoint value.
//!
//! `dim = 1` is handled as the two-point Dirichlet problem on (0, 1)
//! (shooting from `u(0) = 0`, `u'(0) = 1`), whose spectrum has the closed
//! form `(p-1) (n pi_p)^p` with `pi_p = 2 pi / (p sin(pi/p))` and serves as
//! an exact oracle; dimensions >= 2 use the regular series startup at the
//! origin.

use crate::domain::{EigenField, EigenPair, P_MAX, P_MIN};
use crate::error::{Error, Result};
use crate::fem::phi_p;

/// Sampled trajectory of the radial system for one `(p, N, lambda)`.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub p: f64,
    pub dim: u32,
    pub lambda: f64,
    /// Sample radii, increasing, ending at 1.
    pub grid: Vec<f64>,
    /// Solution samples.
    pub u: Vec<f64>,
    /// Flux samples `w = r^{N-1} phi_p(u')`.
    pub w: Vec<f64>,
    /// Strict sign changes of the `u` samples.
    pub zero_count: usize,
}

impl RadialSolution {
    /// Endpoint value `u(1)`.
    pub fn endpoint(&self) -> f64 {
        *self.u.last().unwrap()
    }

    /// Largest absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Adaptive step control for the trajectory integrator.
#[derive(Debug, Clone)]
pub struct StepControl {
    /// Relative error tolerance per step.
    pub rel_tol: f64,
    /// Absolute error tolerance per step.
    pub abs_tol: f64,
    /// Largest step; keeps the sampling dense enough for node counting.
    pub max_step: f64,
    /// Steps below this abort integration.
    pub min_step: f64,
    /// Startup radius for the series expansion at the origin (dim >= 2).
    pub startup_radius: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 5e-3,
            min_step: 1e-14,
            startup_radius: 1e-6,
        }
    }
}

/// Bracketing policy for the eigenvalue search.
#[derive(Debug, Clone)]
pub struct BracketOptions {
    /// Initial trial eigenvalue.
    pub lambda_init: f64,
    /// Geometric growth factor while expanding the bracket.
    pub growth: f64,
    /// Bound on expansions and on bisection/secant iterations.
    pub max_iter: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions {
            lambda_init: 1.0,
            growth: 2.0,
            max_iter: 400,
        }
    }
}

/// First 1-D eigenvalue half-period: `pi_p = 2 pi / (p sin(pi/p))`.
pub fn pi_p(p: f64) -> f64 {
    2.0 * std::f64::consts::PI / (p * (std::f64::consts::PI / p).sin())
}

fn check_p(p: f64) -> Result<()> {
    if !(P_MIN..=P_MAX).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "exponent p = {p} outside the supported range [{P_MIN}, {P_MAX}]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Startup {
    /// Regular origin startup `u(0) = 1`, `u'(0) = 0` via the series below.
    Regular,
    /// Interval Dirichlet startup `u(0) = 0`, `u'(0) = 1` (dim = 1).
    Dirichlet,
}

struct RadialOde {
    p: f64,
    q: f64,
    dim_exp: f64, // N - 1
    lambda: f64,
}

impl RadialOde {
    fn new(p: f64, dim: u32, lambda: f64) -> Self {
        RadialOde {
            p,
            q: p / (p - 1.0),
            dim_exp: f64::from(dim) - 1.0,
            lambda,
        }
    }

    #[inline]
    fn rhs(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        let rpow = if self.dim_exp == 0.0 { 1.0 } else { r.powf(self.dim_exp) };
        [
            phi_p(y[1] / rpow, self.q),
            -self.lambda * rpow * phi_p(y[0], self.p),
        ]
    }

    /// Series startup at radius `eps`:
    /// `u = 1 - ((p-1)/p) (lambda/N)^{1/(p-1)} r^{p/(p-1)}` and the matching
    /// flux `w = -(lambda/N) r^N`. Substituting into the flux form
    /// reproduces the equation to leading order, with error O(eps^{2p/(p-1)}).
    fn series_start(&self, eps: f64) -> [f64; 2] {
        let n = self.dim_exp + 1.0;
        if self.lambda == 0.0 {
            return [1.0, 0.0];
        }
        let c = (self.p - 1.0) / self.p * (self.lambda / n).powf(1.0 / (self.p - 1.0));
        let u = 1.0 - c * eps.powf(self.q);
        let w = -(self.lambda / n) * eps.powf(n);
        [u, w]
    }
}

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the radial system from `(r0, y0)` to `r_end`, reporting each
/// accepted sample. The step size is capped near sign changes of `u` or `w`
/// so node counting stays reliable where the right-hand side loses
/// smoothness (p != 2).
fn integrate_ode<F: FnMut(f64, [f64; 2])>(
    ode: &RadialOde,
    r0: f64,
    y0: [f64; 2],
    r_end: f64,
    ctrl: &StepControl,
    mut on_sample: F,
) -> Result<[f64; 2]> {
    let mut r = r0;
    let mut y = y0;
    on_sample(r, y);
    let mut h = (ctrl.max_step / 8.0).min(r_end - r0).max(ctrl.min_step);
    let mut near_crossing_cap = false;

    while r < r_end {
        let mut h_cap = ctrl.max_step;
        if near_crossing_cap {
            h_cap = h_cap.min(5e-4);
        }
        h = h.min(h_cap).min(r_end - r);
        if h < ctrl.min_step {
            return Err(Error::StepUnderflow { r });
        }

        let mut k = [[0.0f64; 2]; 7];
        k[0] = ode.rhs(r, y);
        for stage in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    ys[0] += h * a * kj[0];
                    ys[1] += h * a * kj[1];
                }
            }
            k[stage] = ode.rhs(r + DP_C[stage] * h, ys);
        }

        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            y5[0] += h * DP_B5[j] * kj[0];
            y5[1] += h * DP_B5[j] * kj[1];
            y4[0] += h * DP_B4[j] * kj[0];
            y4[1] += h * DP_B4[j] * kj[1];
        }

        let mut err: f64 = 0.0;
        for i in 0..2 {
            let scale = ctrl.abs_tol + ctrl.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / scale).abs());
        }

        if err <= 1.0 || h <= ctrl.min_step * 2.0 {
            near_crossing_cap = (y[0] != 0.0 && y5[0].signum() != y[0].signum())
                || (y[1] != 0.0 && y5[1].signum() != y[1].signum());
            r += h;
            y = y5;
            on_sample(r, y);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(y)
}

fn shoot(
    p: f64,
    dim: u32,
    lambda: f64,
    ctrl: &StepControl,
    startup: Startup,
) -> Result<RadialSolution> {
    let ode = RadialOde::new(p, dim, lambda);
    let (r0, y0) = match startup {
        Startup::Regular => {
            let eps = ctrl.startup_radius;
            (eps, ode.series_start(eps))
        }
        Startup::Dirichlet => (0.0, [0.0, 1.0]),
    };

    let mut grid = Vec::with_capacity(512);
    let mut uu = Vec::with_capacity(512);
    let mut ww = Vec::with_capacity(512);
    integrate_ode(&ode, r0, y0, 1.0, ctrl, |r, y| {
        grid.push(r);
        uu.push(y[0]);
        ww.push(y[1]);
    })?;

    let zero_count = count_sign_changes(&uu, &refine_dip_indices(&ode, &grid, &uu, &ww, ctrl));
    Ok(RadialSolution {
        p,
        dim,
        lambda,
        grid,
        u: uu,
        w: ww,
        zero_count,
    })
}

/// Strict sign changes of the sample sequence; exact zeros are transparent.
/// `extra` carries corrections from tangency refinement.
fn count_sign_changes(u: &[f64], extra: &i64) -> usize {
    let mut count: i64 = 0;
    let mut last = 0.0f64;
    for &v in u {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    (count + extra).max(0) as usize
}

/// Re-examines samples where |u| dips below 1e-12 of the running amplitude
/// without a sign change: a fine fixed-step pass over the bracket decides
/// whether the dip hides a double crossing. Returns the correction to add
/// to the plain sign-change count.
fn refine_dip_indices(
    ode: &RadialOde,
    grid: &[f64],
    u: &[f64],
    w: &[f64],
    ctrl: &StepControl,
) -> i64 {
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if umax == 0.0 {
        return 0;
    }
    let mut correction = 0i64;
    for i in 1..u.len().saturating_sub(1) {
        let dip = u[i] != 0.0 && u[i].abs() < 1e-12 * umax;
        let same_side = u[i - 1].signum() == u[i + 1].signum() && u[i - 1] != 0.0;
        if !(dip && same_side) {
            continue;
        }
        // Fixed-step refinement across [r_{i-1}, r_{i+1}].
        let steps = 64;
        let h = (grid[i + 1] - grid[i - 1]) / steps as f64;
        let mut y = [u[i - 1], w[i - 1]];
        let mut r = grid[i - 1];
        let mut fine = vec![y[0]];
        for _ in 0..steps {
            y = rk4_step(ode, r, y, h);
            r += h;
            fine.push(y[0]);
        }
        let _ = ctrl;
        let coarse = count_sign_changes(&[u[i - 1], u[i], u[i + 1]], &0);
        let refined = count_sign_changes(&fine, &0);
        correction += refined as i64 - coarse as i64;
    }
    correction
}

fn rk4_step(ode: &RadialOde, r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = ode.rhs(r, y);
    let k2 = ode.rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = ode.rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = ode.rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates the radial trajectory for one `(p, N, lambda)`.
///
/// Starts from the origin series (normalization `u(0) = 1`, first antinode
/// positive) and integrates the flux system up to `r = 1`.
pub fn integrate_radial(
    p: f64,
    dim: u32,
    lambda: f64,
    ctrl: &StepControl,
) -> Result<RadialSolution> {
    check_p(p)?;
    if dim < 1 {
        return Err(Error::InvalidConfig("dimension must be >= 1".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    shoot(p, dim, lambda, ctrl, Startup::Regular)
}

fn startup_for(dim: u32) -> Startup {
    if dim == 1 {
        Startup::Dirichlet
    } else {
        Startup::Regular
    }
}

/// n-th radial eigenvalue `gamma_n` (n >= 1) with relative bracket
/// tolerance `tol`.
pub fn radial_eigenvalue(p: f64, dim: u32, n: usize, tol: f64) -> Result<EigenPair> {
    radial_eigenvalue_with(
        p,
        dim,
        n,
        tol,
        &StepControl::default(),
        &BracketOptions::default(),
    )
}

/// Full-control variant of [`radial_eigenvalue`].
pub fn radial_eigenvalue_with(
    p: f64,
    dim: u32,
    n: usize,
    tol: f64,
    ctrl: &StepControl,
    opts: &BracketOptions,
) -> Result<EigenPair> {
    check_p(p)?;
    if dim < 1 {
        return Err(Error::InvalidConfig("dimension must be >= 1".into()));
    }
    if n < 1 {
        return Err(Error::InvalidConfig("eigenvalue index n must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    let startup = startup_for(dim);
    let mut evaluations = 0usize;
    let mut eval = |lambda: f64| -> Result<RadialSolution> {
        evaluations += 1;
        shoot(p, dim, lambda, ctrl, startup)
    };

    // Phase 1: geometric bracket growth. The node count m(lambda) jumps from
    // n-1 to n exactly at gamma_n.
    let mut hi = opts.lambda_init;
    let mut hi_sol = eval(hi)?;
    let mut expansions = 0;
    while hi_sol.zero_count < n {
        hi *= opts.growth;
        hi_sol = eval(hi)?;
        expansions += 1;
        if expansions > opts.max_iter {
            return Err(Error::Bracket {
                reason: format!("no {n}-node trajectory up to lambda = {hi:.3e}"),
                lo: opts.lambda_init,
                hi,
            });
        }
    }
    let mut lo = if hi == opts.lambda_init { hi / opts.growth } else { hi / opts.growth };
    let mut lo_sol = eval(lo)?;
    while lo_sol.zero_count >= n {
        hi = lo;
        hi_sol = lo_sol;
        lo /= opts.growth;
        lo_sol = eval(lo)?;
        expansions += 1;
        if expansions > opts.max_iter {
            return Err(Error::Bracket {
                reason: format!("node count never drops below {n} down to lambda = {lo:.3e}"),
                lo,
                hi,
            });
        }
    }

    // Phase 2: bisection on the node-count indicator until the bracket is
    // tight and the endpoint values change sign across it.
    let mut iters = 0;
    loop {
        let tight = (hi - lo) <= 1e-3 * hi;
        let signs_flip = lo_sol.endpoint() != 0.0
            && hi_sol.endpoint() != 0.0
            && lo_sol.endpoint().signum() != hi_sol.endpoint().signum();
        if tight && signs_flip {
            break;
        }
        if (hi - lo) <= 1e-9 * hi {
            if signs_flip {
                break;
            }
            return Err(Error::Bracket {
                reason: "endpoint sign never flips across the nodal boundary".into(),
                lo,
                hi,
            });
        }
        let mid = 0.5 * (lo + hi);
        let mid_sol = eval(mid)?;
        if mid_sol.zero_count >= n {
            hi = mid;
            hi_sol = mid_sol;
        } else {
            lo = mid;
            lo_sol = mid_sol;
        }
        iters += 1;
        if iters > opts.max_iter {
            return Err(Error::Bracket {
                reason: "bisection budget exhausted".into(),
                lo,
                hi,
            });
        }
    }

    // Phase 3: safeguarded secant on the endpoint value u(1).
    let mut converged = false;
    while iters <= opts.max_iter {
        if (hi - lo) / hi < tol {
            converged = true;
            break;
        }
        let (ea, eb) = (lo_sol.endpoint(), hi_sol.endpoint());
        let mut next = lo - ea * (hi - lo) / (eb - ea);
        let guard = 0.05 * (hi - lo);
        if !next.is_finite() || next <= lo + guard || next >= hi - guard {
            next = 0.5 * (lo + hi);
        }
        let next_sol = eval(next)?;
        let same_side_as_lo = next_sol.endpoint() != 0.0
            && next_sol.endpoint().signum() == lo_sol.endpoint().signum()
            && next_sol.zero_count < n;
        if next_sol.endpoint() == 0.0 {
            lo = next;
            hi = next;
            lo_sol = next_sol;
            converged = true;
            break;
        } else if same_side_as_lo {
            lo = next;
            lo_sol = next_sol;
        } else {
            hi = next;
            hi_sol = next_sol;
        }
        iters += 1;
    }
    if !converged {
        return Err(Error::Bracket {
            reason: format!("secant refinement did not reach tolerance {tol:.1e}"),
            lo,
            hi,
        });
    }

    // Report the bracket side with the correct nodal class (n - 1 interior
    // sign changes), so the returned trajectory is the eigenfunction shape.
    let lambda = 0.5 * (lo + hi);
    let sol = eval(lambda)?;
    let best = if sol.zero_count == n - 1 { sol } else { lo_sol };
    let residual = best.endpoint().abs() / best.max_abs().max(1e-300);
    log::debug!("gamma_{n}(p={p}, N={dim}) = {lambda:.10} after {evaluations} integrations");
    Ok(EigenPair {
        lambda,
        field: EigenField::Radial(best),
        iterations: evaluations,
        residual,
        converged: true,
    })
}

/// Interior zero `r*` of the second radial eigenfunction.
///
/// Locates the sampled sign change of the `gamma_2` trajectory and refines
/// it by bisection with local re-integration. Also checks the scaling
/// consistency `scale_eigenvalue(gamma_1, r*, p) = gamma_2` (within
/// `10 * tol` relative), which ties the nodal ball's first eigenvalue back
/// to `gamma_2`.
pub fn nodal_radius(p: f64, dim: u32, tol: f64) -> Result<f64> {
    Ok(nodal_radius_report(p, dim, tol)?.r_star)
}

/// Nodal radius together with the quantities entering its consistency check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NodalRadiusReport {
    pub p: f64,
    pub dim: u32,
    /// Interior zero of the second radial eigenfunction.
    pub r_star: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    /// Relative mismatch of `scale_eigenvalue(gamma_1, r_star, p)` against
    /// `gamma_2`.
    pub scaling_residual: f64,
    /// Whether `r_star` falls in the open interval (1/2, 1).
    pub in_half_one_interval: bool,
}

pub fn nodal_radius_report(p: f64, dim: u32, tol: f64) -> Result<NodalRadiusReport> {
    let lam_tol = (tol * 1e-2).clamp(1e-13, 1e-9);
    let pair1 = radial_eigenvalue(p, dim, 1, lam_tol)?;
    let pair2 = radial_eigenvalue(p, dim, 2, lam_tol)?;
    let sol = pair2
        .radial_solution()
        .expect("radial eigenpair carries a trajectory");

    // Bracket the sampled sign change.
    let mut bracket = None;
    let mut last_sign = 0.0f64;
    let mut last_idx = 0usize;
    for (i, &v) in sol.u.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        if last_sign != 0.0 && v.signum() != last_sign {
            bracket = Some((last_idx, i));
            break;
        }
        last_sign = v.signum();
        last_idx = i;
    }
    let (i0, i1) = bracket.ok_or_else(|| {
        Error::Postcondition("second radial eigenfunction shows no interior sign change".into())
    })?;

    // Bisection on r with re-integration from the bracketing sample.
    let ode = RadialOde::new(p, dim, sol.lambda);
    let ctrl = StepControl::default();
    let y_start = [sol.u[i0], sol.w[i0]];
    let r_start = sol.grid[i0];
    let u_at = |r: f64| -> Result<f64> {
        if r <= r_start {
            return Ok(sol.u[i0]);
        }
        let y = integrate_ode(&ode, r_start, y_start, r, &ctrl, |_, _| {})?;
        Ok(y[0])
    };
    let (mut a, mut b) = (sol.grid[i0], sol.grid[i1]);
    let (mut ua, _ub) = (sol.u[i0], sol.u[i1]);
    for _ in 0..80 {
        if b - a <= tol.min(1e-10) {
            break;
        }
        let m = 0.5 * (a + b);
        let um = u_at(m)?;
        if um == 0.0 {
            a = m;
            b = m;
            break;
        }
        if um.signum() == ua.signum() {
            a = m;
            ua = um;
        } else {
            b = m;
        }
    }
    let r_star = 0.5 * (a + b);

    let scaled = crate::domain::scale_eigenvalue(pair1.lambda, r_star, p)?;
    let scaling_residual = (scaled - pair2.lambda).abs() / pair2.lambda;
    if scaling_residual > 10.0 * tol.max(1e-9) {
        return Err(Error::Postcondition(format!(
            "scaling check failed: scale(gamma_1, r*) = {scaled:.8e} vs gamma_2 = {:.8e} \
             (relative mismatch {scaling_residual:.2e})",
            pair2.lambda
        )));
    }
    Ok(NodalRadiusReport {
        p,
        dim,
        r_star,
        gamma_1: pair1.lambda,
        gamma_2: pair2.lambda,
        scaling_residual,
        in_half_one_interval: 0.5 < r_star && r_star < 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_gives_constant_solution() {
        let sol = integrate_radial(2.0, 2, 0.0, &StepControl::default()).unwrap();
        assert_eq!(sol.zero_count, 0);
        assert!(sol.u.iter().all(|&u| (u - 1.0).abs() < 1e-12));
        assert!(sol.w.iter().all(|&w| w.abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_arguments() {
        let ctrl = StepControl::default();
        assert!(integrate_radial(2.0, 2, -1.0, &ctrl).is_err());
        assert!(integrate_radial(1.0, 2, 1.0, &ctrl).is_err());
        assert!(integrate_radial(2.0, 0, 1.0, &ctrl).is_err());
        assert!(radial_eigenvalue(2.0, 2, 0, 1e-8).is_err());
        assert!(radial_eigenvalue(11.0, 2, 1, 1e-8).is_err());
    }

    #[test]
    fn startup_matches_series_and_flux() {
        let ctrl = StepControl::default();
        let (p, dim, lambda) = (3.0, 2usize as u32, 12.5);
        let sol = integrate_radial(p, dim, lambda, &ctrl).unwrap();
        let eps = ctrl.startup_radius;
        let series =
            1.0 - (p - 1.0) / p * (lambda / f64::from(dim)).powf(1.0 / (p - 1.0)) * eps.powf(p / (p - 1.0));
        assert!((sol.u[0] - series).abs() < 1e-10);
        assert!(sol.w[0].abs() < 1e-10);
        assert_eq!(sol.grid[0], eps);
        assert_eq!(*sol.grid.last().unwrap(), 1.0);
    }

    #[test]
    fn n3_p2_first_mode_hits_endpoint() {
        // u(r) = sin(pi r) / (pi r) solves the (p=2, N=3) problem at pi^2.
        let lambda = std::f64::consts::PI.powi(2);
        let sol = integrate_radial(2.0, 3, lambda, &StepControl::default()).unwrap();
        assert!(sol.endpoint().abs() < 1e-6, "u(1) = {:.3e}", sol.endpoint());
        assert_eq!(sol.zero_count, 0);
    }

    #[test]
    fn node_count_at_lambda_20() {
        // J_0(sqrt(20) r) has exactly one zero in (0, 1).
        let sol = integrate_radial(2.0, 2, 20.0, &StepControl::default()).unwrap();
        assert_eq!(sol.zero_count, 1);
    }

    #[test]
    fn gamma_1_disk_matches_bessel() {
        let pair = radial_eigenvalue(2.0, 2, 1, 1e-10).unwrap();
        assert!(pair.converged);
        assert!(
            (pair.lambda - 5.783185962946785).abs() < 1e-5,
            "gamma_1 = {}",
            pair.lambda
        );
        let sol = pair.radial_solution().unwrap();
        assert_eq!(sol.zero_count, 0);
    }

    #[test]
    fn nodal_radius_disk_p2() {
        let report = nodal_radius_report(2.0, 2, 1e-8).unwrap();
        // j_{0,1} / j_{0,2}
        assert!(
            (report.r_star - 0.435650664518980).abs() < 1e-5,
            "r* = {}",
            report.r_star
        );
        assert!(!report.in_half_one_interval);
    }
}
