//! First Dirichlet eigenpair of the p-Laplacian on a meshed domain.
//!
//! The solver minimizes the Rayleigh quotient `R(u) = E_p(u) / M_p(u)` over
//! constrained P1 fields by projected gradient descent on the `M_p = 1`
//! level set with Armijo backtracking (start step 1.0, shrink 0.5,
//! sufficient decrease 1e-4). Descent directions are preconditioned by a
//! weighted P1 stiffness matrix applied through a few CG sweeps; with unit
//! step this reduces to an inverse-iteration-like update, so the iteration
//! count stays bounded under mesh refinement while all inner solves remain
//! linear. For p < 2 the gradient degeneracy is handled by an eps
//! continuation (1e-2 down to the configured floor, factor 10 per stage).
//!
//! On top of the single-mesh solve sit the refinement ladder with Richardson
//! extrapolation, the sector eigenvalues `tau_n`, the `tau_1 < gamma_2`
//! certificate, and the moving-obstacle sweep.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DomainSpec, EigenField, EigenPair, SolverConfig};
use crate::error::{Error, Result};
use crate::fem::{self, ElementCache, ScalarField};
use crate::linalg::{assemble_weighted_stiffness, pcg, Csr};
use crate::mesh::{build_mesh, TriMesh};
use crate::radial::radial_eigenvalue;

const ARMIJO_START: f64 = 1.0;
const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_DECREASE: f64 = 1e-4;
const ARMIJO_MAX_BACKTRACKS: usize = 60;
/// Rounding slack in the sufficient-decrease test: once per-step decreases
/// approach summation noise the residual still contracts, so steps within
/// this relative band are accepted (the trace stays monotone to 1e-14).
const ARMIJO_FP_SLACK: f64 = 1e-14;
/// Continuation entry point for p < 2.
const EPS_CONTINUATION_START: f64 = 1e-2;
/// Preconditioner rebuild cadence (p != 2 rebuilds pick up the current
/// gradient weights).
const PRECOND_REBUILD_EVERY: usize = 30;
const PCG_TOL: f64 = 1e-2;
const PCG_MAX_ITER: usize = 300;
/// Interior sign violations beyond this fraction of max|u| flag a defect.
const SIGN_PURITY_TOL: f64 = 1e-8;

/// Per-iteration solver record.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    /// Line-search objective (eps-regularized Rayleigh quotient).
    pub rayleigh: f64,
    /// Normalized stationarity residual.
    pub stationarity: f64,
    /// Accepted Armijo step.
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchStall,
}

/// Iteration history of one [`first_eigenpair`] call. The recorded Rayleigh
/// values are nonincreasing (up to a 1e-14 line-search tolerance).
#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    pub wall_time: Duration,
    pub status: SolveStatus,
}

/// First Dirichlet eigenpair on `mesh`; see the module docs for the scheme.
///
/// Non-convergence is reported through `converged = false` on the returned
/// pair, not as an error; a sign-changing converged minimizer (impossible
/// for a true first eigenfunction) is an error.
pub fn first_eigenpair(mesh: &Arc<TriMesh>, p: f64, cfg: &SolverConfig) -> Result<EigenPair> {
    Ok(first_eigenpair_with_trace(mesh, p, cfg)?.0)
}

/// [`first_eigenpair`] plus its convergence trace.
pub fn first_eigenpair_with_trace(
    mesh: &Arc<TriMesh>,
    p: f64,
    cfg: &SolverConfig,
) -> Result<(EigenPair, ConvergenceTrace)> {
    let init = initial_profile(mesh, cfg.seed);
    solve(mesh, p, cfg, init)
}

/// Warm-started variant: `init` is any positive interior profile, e.g. a
/// prolonged coarse-level solution.
pub fn first_eigenpair_from(
    mesh: &Arc<TriMesh>,
    p: f64,
    cfg: &SolverConfig,
    init: Vec<f64>,
) -> Result<(EigenPair, ConvergenceTrace)> {
    solve(mesh, p, cfg, init)
}

/// Positive tent profile: Euclidean distance to the nearest boundary vertex,
/// with a tiny seeded perturbation to break symmetry ties.
fn initial_profile(mesh: &TriMesh, seed: u64) -> Vec<f64> {
    let boundary_pts: Vec<[f64; 2]> = mesh
        .vertices
        .iter()
        .zip(&mesh.boundary)
        .filter_map(|(p, &b)| b.then_some(*p))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mesh.vertices
        .iter()
        .zip(&mesh.boundary)
        .map(|(p, &b)| {
            if b {
                return 0.0;
            }
            let mut d2 = f64::INFINITY;
            for q in &boundary_pts {
                let dx = p[0] - q[0];
                let dy = p[1] - q[1];
                d2 = d2.min(dx * dx + dy * dy);
            }
            d2.sqrt() * (1.0 + 1e-6 * rng.gen_range(-1.0..1.0))
        })
        .collect()
}

fn eps_schedule(p: f64, cfg: &SolverConfig) -> Vec<f64> {
    if p >= 2.0 {
        return vec![0.0];
    }
    let floor = cfg.regularization_eps.max(1e-12);
    let mut eps = EPS_CONTINUATION_START;
    let mut schedule = Vec::new();
    while eps > floor {
        schedule.push(eps);
        eps /= 10.0;
    }
    schedule.push(floor);
    schedule
}

struct SolverState {
    mesh: Arc<TriMesh>,
    cache: ElementCache,
    values: Vec<f64>,
    grad_e: Vec<f64>,
    grad_m: Vec<f64>,
    grad: Vec<f64>,
    dir: Vec<f64>,
    trial: Vec<f64>,
    weights: Vec<f64>,
    matrix: Option<Csr>,
}

impl SolverState {
    fn normalize(&mut self, p: f64) {
        let m = fem::mass_values(&self.mesh, &self.values, p);
        if m > 0.0 {
            let scale = m.powf(-1.0 / p);
            for v in &mut self.values {
                *v *= scale;
            }
        }
    }

    fn rebuild_preconditioner(&mut self, p: f64, eps: f64) {
        for t in 0..self.mesh.triangle_count() {
            self.weights[t] = if p == 2.0 {
                1.0
            } else {
                let g = self.cache.gradient(&self.mesh, &self.values, t);
                let g2 = g[0] * g[0] + g[1] * g[1] + eps * eps;
                g2.powf(0.5 * (p - 2.0)).clamp(1e-6, 1e6)
            };
        }
        self.matrix = Some(assemble_weighted_stiffness(
            &self.mesh,
            &self.cache,
            &self.weights,
        ));
    }
}

fn solve(
    mesh: &Arc<TriMesh>,
    p: f64,
    cfg: &SolverConfig,
    init: Vec<f64>,
) -> Result<(EigenPair, ConvergenceTrace)> {
    cfg.validate()?;
    if !(crate::domain::P_MIN..=crate::domain::P_MAX).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "exponent p = {p} outside the supported range"
        )));
    }
    mesh.validate()?;
    let n_interior = mesh.boundary.iter().filter(|&&b| !b).count();
    if n_interior == 0 {
        return Err(Error::Mesh("mesh has no interior vertex".into()));
    }
    if init.len() != mesh.vertex_count() {
        return Err(Error::Mesh("initial profile length mismatch".into()));
    }

    let start = Instant::now();
    let nv = mesh.vertex_count();
    let mut state = SolverState {
        mesh: Arc::clone(mesh),
        cache: ElementCache::build(mesh),
        values: init,
        grad_e: vec![0.0; nv],
        grad_m: vec![0.0; nv],
        grad: vec![0.0; nv],
        dir: vec![0.0; nv],
        trial: vec![0.0; nv],
        weights: vec![1.0; mesh.triangle_count()],
        matrix: None,
    };
    for (v, &b) in mesh.boundary.iter().enumerate() {
        if b {
            state.values[v] = 0.0;
        }
    }

    let stages = eps_schedule(p, cfg);
    let last_stage = stages.len() - 1;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut status = SolveStatus::Converged;
    let mut total_iters = 0usize;
    let mut stationarity;

    for (stage, &eps) in stages.iter().enumerate() {
        log::debug!(
            "stage {stage}/{last_stage}: eps = {eps:.1e}, {total_iters} iterations so far"
        );
        // Intermediate continuation stages only need to hand over a decent
        // iterate; the final stage enforces the configured tolerances.
        let stage_tol = if stage == last_stage {
            cfg.tol_grad
        } else {
            cfg.tol_grad.max(1e-4)
        };
        state.normalize(p);
        state.rebuild_preconditioner(p, eps);
        let mut rayleigh = fem::energy_cached(&state.mesh, &state.cache, &state.values, p, eps);
        let mut prev_rayleigh = f64::INFINITY;
        let mut stage_done = false;

        while !stage_done {
            if total_iters >= cfg.max_iter {
                status = SolveStatus::MaxIterations;
                break;
            }
            fem::grad_energy_into(
                &state.mesh,
                &state.cache,
                &state.values,
                p,
                eps,
                true,
                &mut state.grad_e,
            );
            fem::grad_mass_into(
                &state.mesh,
                &state.cache,
                &state.values,
                p,
                true,
                &mut state.grad_m,
            );
            for v in 0..nv {
                state.grad[v] = state.grad_e[v] - rayleigh * state.grad_m[v];
            }
            stationarity =
                fem::residual_from_grads(&state.mesh, &state.grad_e, &state.grad_m, rayleigh);

            let rayleigh_change = (prev_rayleigh - rayleigh).abs();
            if stationarity <= stage_tol && rayleigh_change <= cfg.tol_eig * rayleigh.abs() {
                break;
            }

            if total_iters % PRECOND_REBUILD_EVERY == 0 && total_iters > 0 && p != 2.0 {
                state.rebuild_preconditioner(p, eps);
            }
            let matrix = state.matrix.as_ref().expect("preconditioner built");
            let solved = pcg(matrix, &state.grad, PCG_TOL, PCG_MAX_ITER);
            // The 1/p factor matches the gradient's leading scale, so the
            // unit Armijo step is an inverse-iteration update at p = 2.
            let mut slope = 0.0;
            for v in 0..nv {
                state.dir[v] = -solved[v] / p;
                slope += state.grad[v] * state.dir[v];
            }
            if !(slope < 0.0) {
                // Fall back to the raw (negated) gradient.
                slope = 0.0;
                for v in 0..nv {
                    state.dir[v] = -state.grad[v];
                    slope -= state.grad[v] * state.grad[v];
                }
                if !(slope < 0.0) {
                    break; // exact stationary point
                }
            }

            // Armijo backtracking on the scale-invariant objective.
            let mut step = ARMIJO_START;
            let mut accepted = false;
            for _ in 0..ARMIJO_MAX_BACKTRACKS {
                for v in 0..nv {
                    state.trial[v] = state.values[v] + step * state.dir[v];
                }
                let m_trial = fem::mass_values(&state.mesh, &state.trial, p);
                if m_trial > 1e-300 {
                    let e_trial =
                        fem::energy_cached(&state.mesh, &state.cache, &state.trial, p, eps);
                    let r_trial = e_trial / m_trial;
                    if r_trial <= rayleigh + ARMIJO_DECREASE * step * slope + ARMIJO_FP_SLACK * rayleigh.abs() {
                        prev_rayleigh = rayleigh;
                        rayleigh = r_trial;
                        std::mem::swap(&mut state.values, &mut state.trial);
                        let scale = m_trial.powf(-1.0 / p);
                        for v in &mut state.values {
                            *v *= scale;
                        }
                        accepted = true;
                        break;
                    }
                }
                step *= ARMIJO_SHRINK;
            }
            if !accepted {
                status = SolveStatus::LineSearchStall;
                stage_done = true;
            } else {
                total_iters += 1;
                records.push(IterationRecord {
                    rayleigh,
                    stationarity,
                    step,
                });
            }
        }
        if status == SolveStatus::MaxIterations {
            break;
        }
        if status == SolveStatus::LineSearchStall && stage == last_stage {
            break;
        }
        if status == SolveStatus::LineSearchStall {
            status = SolveStatus::Converged; // retry at the next stage
        }
    }

    // Final diagnostics at the terminal regularization.
    let eps_final = *stages.last().unwrap();
    state.normalize(p);
    fem::grad_energy_into(
        &state.mesh,
        &state.cache,
        &state.values,
        p,
        eps_final,
        true,
        &mut state.grad_e,
    );
    fem::grad_mass_into(
        &state.mesh,
        &state.cache,
        &state.values,
        p,
        true,
        &mut state.grad_m,
    );
    let lambda = fem::energy_cached(&state.mesh, &state.cache, &state.values, p, 0.0)
        / fem::mass_values(&state.mesh, &state.values, p);
    stationarity = fem::residual_from_grads(&state.mesh, &state.grad_e, &state.grad_m, lambda);
    let converged = status == SolveStatus::Converged && stationarity <= cfg.tol_grad;
    log::debug!(
        "solve finished: lambda = {lambda:.10}, residual = {stationarity:.2e}, \
         {total_iters} iterations, status {status:?}"
    );

    // Sign convention: the vertex of maximum |u| is positive.
    let mut max_abs = 0.0;
    let mut flip = 1.0;
    for &v in &state.values {
        if v.abs() > max_abs {
            max_abs = v.abs();
            flip = v.signum();
        }
    }
    if flip < 0.0 {
        for v in &mut state.values {
            *v = -*v;
        }
    }
    if converged {
        let negative = state
            .values
            .iter()
            .zip(&mesh.boundary)
            .filter(|(v, &b)| !b && **v < -SIGN_PURITY_TOL * max_abs)
            .count();
        if negative > 0 {
            return Err(Error::SignChanging {
                negative,
                interior: n_interior,
            });
        }
    }

    let field = ScalarField::from_values(mesh, state.values, true)?;
    let pair = EigenPair {
        lambda,
        field: EigenField::Mesh(field),
        iterations: total_iters,
        residual: stationarity,
        converged,
    };
    let trace = ConvergenceTrace {
        records,
        wall_time: start.elapsed(),
        status,
    };
    Ok((pair, trace))
}

/// One refinement level of [`lambda1_extrapolated`].
#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    pub h: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub stationarity: f64,
    pub converged: bool,
}

/// Mesh-refinement ladder result with Richardson extrapolation.
#[derive(Debug, Clone)]
pub struct ExtrapolatedEigenvalue {
    /// Extrapolated eigenvalue (the finest-level value when fewer than two
    /// levels are available).
    pub lambda: f64,
    /// Difference between the last two extrapolants (0 with one level).
    pub error_bar: f64,
    /// Convergence rate used: fixed 2 for p = 2, otherwise measured from
    /// the last three levels.
    pub rate: f64,
    pub levels: Vec<LevelResult>,
    /// Eigenpair on the finest mesh.
    pub finest: EigenPair,
}

/// Solves `lambda_1` on a ladder of `refinements + 1` nested meshes
/// (coarsest at `cfg.mesh_h`), warm-starting each level with the prolonged
/// coarse solution, and Richardson-extrapolates the eigenvalues.
///
/// For p = 2 the P1 eigenvalue converges at the known O(h^2) rate; for
/// other p the observed rate from the last three levels is used.
pub fn lambda1_extrapolated(
    domain: &DomainSpec,
    p: f64,
    cfg: &SolverConfig,
    refinements: usize,
) -> Result<ExtrapolatedEigenvalue> {
    let mut mesh = Arc::new(build_mesh(domain, cfg.mesh_h)?);
    let (mut pair, _) = first_eigenpair_with_trace(&mesh, p, cfg)?;
    let mut levels = vec![level_of(&mesh, &pair)];

    for _ in 0..refinements {
        let (fine, parents) = mesh.refine_with_map();
        let fine = Arc::new(fine);
        let coarse_values = match &pair.field {
            EigenField::Mesh(f) => &f.values,
            EigenField::Radial(_) => unreachable!("FEM solve returns a mesh field"),
        };
        let mut init = Vec::with_capacity(fine.vertex_count());
        init.extend_from_slice(coarse_values);
        for &(i, j) in &parents {
            init.push(0.5 * (coarse_values[i] + coarse_values[j]));
        }
        for (v, &b) in fine.boundary.iter().enumerate() {
            if b {
                init[v] = 0.0;
            }
        }
        let (next, _) = first_eigenpair_from(&fine, p, cfg, init)?;
        levels.push(level_of(&fine, &next));
        mesh = fine;
        pair = next;
    }

    let (lambda, error_bar, rate) = extrapolate(p, &levels);
    Ok(ExtrapolatedEigenvalue {
        lambda,
        error_bar,
        rate,
        levels,
        finest: pair,
    })
}

fn level_of(mesh: &TriMesh, pair: &EigenPair) -> LevelResult {
    LevelResult {
        h: mesh.h,
        lambda: pair.lambda,
        iterations: pair.iterations,
        stationarity: pair.residual,
        converged: pair.converged,
    }
}

fn measured_rate(l0: f64, l1: f64, l2: f64) -> Option<f64> {
    let d1 = l0 - l1;
    let d2 = l1 - l2;
    (d1.abs() > 0.0 && d2.abs() > 0.0 && d1 / d2 > 1.0)
        .then(|| (d1 / d2).log2().clamp(0.5, 4.0))
}

fn extrapolate(p: f64, levels: &[LevelResult]) -> (f64, f64, f64) {
    let lams: Vec<f64> = levels.iter().map(|l| l.lambda).collect();
    let n = lams.len();
    if n < 2 {
        return (lams[0], 0.0, 0.0);
    }
    let extrap =
        |coarse: f64, fine: f64, rate: f64| fine + (fine - coarse) / ((2.0f64).powf(rate) - 1.0);
    if p == 2.0 || n < 3 {
        let last = extrap(lams[n - 2], lams[n - 1], 2.0);
        let prev = if n >= 3 {
            extrap(lams[n - 3], lams[n - 2], 2.0)
        } else {
            lams[n - 1]
        };
        return (last, (last - prev).abs(), 2.0);
    }
    // Each extrapolant measures its rate from its own three-level window,
    // so their difference reflects the extrapolation's actual stability
    // (a shared exact-fit rate would make them coincide identically).
    let rate_last = measured_rate(lams[n - 3], lams[n - 2], lams[n - 1]).unwrap_or(2.0);
    let last = extrap(lams[n - 2], lams[n - 1], rate_last);
    let rate_prev = if n >= 4 {
        measured_rate(lams[n - 4], lams[n - 3], lams[n - 2]).unwrap_or(2.0)
    } else {
        2.0
    };
    let prev = extrap(lams[n - 3], lams[n - 2], rate_prev);
    (last, (last - prev).abs(), rate_last)
}

/// `tau_n`: the first Dirichlet eigenvalue of the sector of opening
/// `pi / n` in the unit disk, on a single mesh at `cfg.mesh_h`.
pub fn sector_eigenvalue(n: usize, p: f64, cfg: &SolverConfig) -> Result<EigenPair> {
    if n < 1 {
        return Err(Error::InvalidConfig("sector index n must be >= 1".into()));
    }
    let spec = DomainSpec::sector(0.0, std::f64::consts::PI / n as f64)?;
    let mesh = Arc::new(build_mesh(&spec, cfg.mesh_h)?);
    first_eigenpair(&mesh, p, cfg)
}

/// Verdict of [`certify_nonradial`]. A numerical run can only confirm the
/// strict gap or report inconclusive resolution, never refute it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Confirmed,
    Inconclusive,
}

/// Numerical certificate for the gap `tau_1 < gamma_2`.
///
/// `tau_1` (first eigenvalue of the half-disk) upper-bounds the second
/// Dirichlet eigenvalue of the disk: the odd reflection of its
/// eigenfunction spans a two-nodal-domain set over which the Rayleigh
/// quotient never exceeds `tau_1`. The second radial eigenvalue `gamma_2`
/// is the smallest eigenvalue a radial second eigenfunction could have, so
/// `tau_1 < gamma_2` certifies that second eigenfunctions are not radial.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub p: f64,
    /// Richardson-extrapolated half-disk eigenvalue.
    pub tau_1: f64,
    /// Extrapolation error bar (difference of the last two extrapolants).
    pub tau_1_error: f64,
    /// Second radial eigenvalue from the shooting solver.
    pub gamma_2: f64,
    /// `gamma_2 - tau_1`.
    pub margin: f64,
    pub verdict: Verdict,
    /// Mesh sizes of the refinement ladder behind `tau_1`.
    pub meshes: Vec<f64>,
    pub note: String,
}

/// Number of refinements behind each certificate's `tau_1`.
const CERTIFY_REFINEMENTS: usize = 3;

pub fn certify_nonradial(p: f64, cfg: &SolverConfig) -> Result<Certificate> {
    let tau = lambda1_extrapolated(&DomainSpec::HalfBall, p, cfg, CERTIFY_REFINEMENTS)?;
    let gamma_pair = radial_eigenvalue(p, 2, 2, 1e-8)?;
    let gamma_2 = gamma_pair.lambda;
    let all_converged = tau.levels.iter().all(|l| l.converged) && gamma_pair.converged;
    let verdict = if all_converged && tau.lambda + tau.error_bar < gamma_2 {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        p,
        tau_1: tau.lambda,
        tau_1_error: tau.error_bar,
        gamma_2,
        margin: gamma_2 - tau.lambda,
        verdict,
        meshes: tau.levels.iter().map(|l| l.h).collect(),
        note: "tau_1 upper-bounds the second Dirichlet eigenvalue of the disk; whether \
               they coincide for p != 2 is an open question, so tau_1 is reported as a \
               bound, not as lambda_2 itself."
            .to_string(),
    })
}

/// One entry of [`obstacle_sweep`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    /// Obstacle offset along the first coordinate axis.
    pub t: f64,
    /// First eigenvalue of the eccentric annulus, when the solve succeeded.
    pub lambda1: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Failure reason for this entry (the sweep continues past failures).
    pub error: Option<String>,
}

/// First eigenvalue of `B_1` minus a radius-`r` obstacle centred at
/// `(t, 0)`, for each offset `t`. Entries run in parallel; the output is
/// ordered by `t`. Per-entry failures (e.g. a gap finer than the mesh) are
/// recorded without aborting the sweep.
pub fn obstacle_sweep(
    r: f64,
    offsets: &[f64],
    p: f64,
    cfg: &SolverConfig,
) -> Result<Vec<SweepPoint>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidDomain(format!(
            "obstacle radius must lie in (0, 1), got {r}"
        )));
    }
    let mut ts: Vec<f64> = offsets.to_vec();
    ts.sort_by(f64::total_cmp);
    let points: Vec<SweepPoint> = ts
        .par_iter()
        .map(|&t| {
            let solve = || -> Result<EigenPair> {
                let spec = DomainSpec::eccentric_annulus(r, t)?;
                let mesh = Arc::new(build_mesh(&spec, cfg.mesh_h)?);
                first_eigenpair(&mesh, p, cfg)
            };
            match solve() {
                Ok(pair) => SweepPoint {
                    t,
                    lambda1: Some(pair.lambda),
                    iterations: pair.iterations,
                    converged: pair.converged,
                    error: None,
                },
                Err(e) => SweepPoint {
                    t,
                    lambda1: None,
                    iterations: 0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(points)
}
