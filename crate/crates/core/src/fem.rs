//! P1 finite-element fields and the two functionals driving every solve:
//! the gradient energy `E_p(u) = integral |grad u|^p` and the mass
//! `M_p(u) = integral |u|^p`, together with their first variations.
//!
//! P1 gradients are piecewise constant, so `energy` is evaluated exactly.
//! The mass term uses the 3-point edge-midpoint rule (degree-2 exact; a
//! documented approximation for non-integer p that vanishes under
//! refinement). For p < 2 the energy gradient is regularized by
//! `(|grad u|^2 + eps^2)^{(p-2)/2}`; the eigensolver drives `eps -> 0` by
//! continuation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Per-vertex values on a [`TriMesh`], optionally Dirichlet-constrained
/// (values vanish on boundary-flagged vertices).
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub mesh: Arc<TriMesh>,
    pub values: Vec<f64>,
    /// When true, `values` vanish (within 1e-14) at boundary vertices.
    pub constrained: bool,
}

impl ScalarField {
    pub fn zeros(mesh: &Arc<TriMesh>, constrained: bool) -> Self {
        ScalarField {
            mesh: Arc::clone(mesh),
            values: vec![0.0; mesh.vertex_count()],
            constrained,
        }
    }

    /// Interpolates `f` at the vertices; boundary values are zeroed when
    /// `constrained` is set.
    pub fn from_fn<F: Fn([f64; 2]) -> f64>(mesh: &Arc<TriMesh>, f: F, constrained: bool) -> Self {
        let mut values: Vec<f64> = mesh.vertices.iter().map(|&p| f(p)).collect();
        if constrained {
            for (v, b) in mesh.boundary.iter().enumerate() {
                if *b {
                    values[v] = 0.0;
                }
            }
        }
        ScalarField {
            mesh: Arc::clone(mesh),
            values,
            constrained,
        }
    }

    /// Wraps explicit vertex values, validating the length and (for
    /// constrained fields) the boundary mask.
    pub fn from_values(mesh: &Arc<TriMesh>, values: Vec<f64>, constrained: bool) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::Mesh(format!(
                "field has {} values for {} vertices",
                values.len(),
                mesh.vertex_count()
            )));
        }
        if constrained {
            for (v, b) in mesh.boundary.iter().enumerate() {
                if *b && values[v].abs() > 1e-14 {
                    return Err(Error::Mesh(format!(
                        "constrained field is nonzero ({:.3e}) at boundary vertex {v}",
                        values[v]
                    )));
                }
            }
        }
        Ok(ScalarField {
            mesh: Arc::clone(mesh),
            values,
            constrained,
        })
    }

    /// Largest absolute vertex value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Precomputed per-triangle geometry: area and the constant gradients of the
/// three hat functions.
#[derive(Debug, Clone)]
pub struct ElementCache {
    pub area: Vec<f64>,
    pub grad_phi: Vec<[[f64; 2]; 3]>,
}

impl ElementCache {
    pub fn build(mesh: &TriMesh) -> Self {
        let nt = mesh.triangle_count();
        let mut area = Vec::with_capacity(nt);
        let mut grad_phi = Vec::with_capacity(nt);
        for t in 0..nt {
            let [a, b, c] = mesh.triangles[t];
            let pa = mesh.vertices[a];
            let pb = mesh.vertices[b];
            let pc = mesh.vertices[c];
            let two_a = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
            area.push(0.5 * two_a);
            grad_phi.push([
                [(pb[1] - pc[1]) / two_a, (pc[0] - pb[0]) / two_a],
                [(pc[1] - pa[1]) / two_a, (pa[0] - pc[0]) / two_a],
                [(pa[1] - pb[1]) / two_a, (pb[0] - pa[0]) / two_a],
            ]);
        }
        ElementCache { area, grad_phi }
    }

    /// Constant gradient of `values` on triangle `t`.
    pub fn gradient(&self, mesh: &TriMesh, values: &[f64], t: usize) -> [f64; 2] {
        let tri = mesh.triangles[t];
        let g = &self.grad_phi[t];
        let mut gx = 0.0;
        let mut gy = 0.0;
        for k in 0..3 {
            gx += values[tri[k]] * g[k][0];
            gy += values[tri[k]] * g[k][1];
        }
        [gx, gy]
    }
}

/// `integral |grad u|^p`, exact for P1 fields.
pub fn energy(u: &ScalarField, p: f64) -> f64 {
    let cache = ElementCache::build(&u.mesh);
    energy_cached(&u.mesh, &cache, &u.values, p, 0.0)
}

/// Energy with the p<2 regularization `(|grad u|^2 + eps^2)^{p/2}`; equals
/// [`energy`] at `eps = 0`. This is the line-search objective the
/// eigensolver decreases.
pub fn energy_cached(mesh: &TriMesh, cache: &ElementCache, values: &[f64], p: f64, eps: f64) -> f64 {
    let e2 = eps * eps;
    let mut total = 0.0;
    for t in 0..mesh.triangle_count() {
        let g = cache.gradient(mesh, values, t);
        let g2 = g[0] * g[0] + g[1] * g[1] + e2;
        let integrand = if p == 2.0 { g2 } else { g2.powf(0.5 * p) };
        total += cache.area[t] * integrand;
    }
    total
}

/// `integral |u|^p` by the 3-point edge-midpoint rule.
pub fn mass(u: &ScalarField, p: f64) -> f64 {
    mass_values(&u.mesh, &u.values, p)
}

pub(crate) fn mass_values(mesh: &TriMesh, values: &[f64], p: f64) -> f64 {
    let mut total = 0.0;
    for t in 0..mesh.triangle_count() {
        let [a, b, c] = mesh.triangles[t];
        let area = {
            let pa = mesh.vertices[a];
            let pb = mesh.vertices[b];
            let pc = mesh.vertices[c];
            0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]))
        };
        total += area / 3.0 * edge_midpoint_sum(values[a], values[b], values[c], p);
    }
    total
}

#[inline]
fn edge_midpoint_sum(ua: f64, ub: f64, uc: f64, p: f64) -> f64 {
    let m0 = 0.5 * (ua + ub);
    let m1 = 0.5 * (ub + uc);
    let m2 = 0.5 * (uc + ua);
    if p == 2.0 {
        m0 * m0 + m1 * m1 + m2 * m2
    } else {
        m0.abs().powf(p) + m1.abs().powf(p) + m2.abs().powf(p)
    }
}

/// `phi_p(s) = |s|^{p-2} s`, extended by 0 at the origin.
#[inline]
pub fn phi_p(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        s
    } else {
        s.abs().powf(p - 1.0) * s.signum()
    }
}

/// First variation of the (regularized) energy: component at vertex `v` is
/// `p * sum_T |T| (|grad u|^2 + eps^2)^{(p-2)/2} grad u . grad phi_v`.
/// Boundary rows are zeroed for constrained fields.
pub fn grad_energy(u: &ScalarField, p: f64, eps: f64) -> ScalarField {
    let cache = ElementCache::build(&u.mesh);
    let mut out = vec![0.0; u.values.len()];
    grad_energy_into(&u.mesh, &cache, &u.values, p, eps, u.constrained, &mut out);
    ScalarField {
        mesh: Arc::clone(&u.mesh),
        values: out,
        constrained: true,
    }
}

pub(crate) fn grad_energy_into(
    mesh: &TriMesh,
    cache: &ElementCache,
    values: &[f64],
    p: f64,
    eps: f64,
    constrained: bool,
    out: &mut [f64],
) {
    out.fill(0.0);
    let e2 = eps * eps;
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangles[t];
        let g = cache.gradient(mesh, values, t);
        let g2 = g[0] * g[0] + g[1] * g[1] + e2;
        if g2 < 1e-300 {
            continue;
        }
        let weight = if p == 2.0 {
            p * cache.area[t]
        } else {
            p * cache.area[t] * g2.powf(0.5 * (p - 2.0))
        };
        let gp = &cache.grad_phi[t];
        for k in 0..3 {
            out[tri[k]] += weight * (g[0] * gp[k][0] + g[1] * gp[k][1]);
        }
    }
    if constrained {
        for (v, b) in mesh.boundary.iter().enumerate() {
            if *b {
                out[v] = 0.0;
            }
        }
    }
}

/// First variation of the mass: `p * integral |u|^{p-2} u phi_v` under the
/// same edge-midpoint quadrature as [`mass`].
pub fn grad_mass(u: &ScalarField, p: f64) -> ScalarField {
    let cache = ElementCache::build(&u.mesh);
    let mut out = vec![0.0; u.values.len()];
    grad_mass_into(&u.mesh, &cache, &u.values, p, u.constrained, &mut out);
    ScalarField {
        mesh: Arc::clone(&u.mesh),
        values: out,
        constrained: true,
    }
}

pub(crate) fn grad_mass_into(
    mesh: &TriMesh,
    cache: &ElementCache,
    values: &[f64],
    p: f64,
    constrained: bool,
    out: &mut [f64],
) {
    out.fill(0.0);
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangles[t];
        let w = cache.area[t] / 3.0 * p * 0.5;
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            let m = 0.5 * (values[i] + values[j]);
            let f = w * phi_p(m, p);
            out[i] += f;
            out[j] += f;
        }
    }
    if constrained {
        for (v, b) in mesh.boundary.iter().enumerate() {
            if *b {
                out[v] = 0.0;
            }
        }
    }
}

/// Rayleigh quotient `energy / mass`.
pub fn rayleigh(u: &ScalarField, p: f64) -> f64 {
    energy(u, p) / mass(u, p)
}

/// Normalized stationarity residual of the discrete weak equation at
/// `(lambda, u)`: `max_v |a_v - lambda b_v| / max_v (|a_v| + |lambda b_v|)`
/// over interior vertices, where `a_v` and `b_v` are the energy and mass
/// forms tested against the hat function of `v`. Zero fields give 0.
pub fn stationarity_residual(u: &ScalarField, lambda: f64, p: f64, eps: f64) -> f64 {
    let cache = ElementCache::build(&u.mesh);
    let mut ga = vec![0.0; u.values.len()];
    let mut gb = vec![0.0; u.values.len()];
    grad_energy_into(&u.mesh, &cache, &u.values, p, eps, true, &mut ga);
    grad_mass_into(&u.mesh, &cache, &u.values, p, true, &mut gb);
    residual_from_grads(&u.mesh, &ga, &gb, lambda)
}

pub(crate) fn residual_from_grads(mesh: &TriMesh, ga: &[f64], gb: &[f64], lambda: f64) -> f64 {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for v in 0..mesh.vertex_count() {
        if mesh.boundary[v] {
            continue;
        }
        worst = worst.max((ga[v] - lambda * gb[v]).abs());
        scale = scale.max(ga[v].abs() + (lambda * gb[v]).abs());
    }
    if scale < 1e-300 {
        0.0
    } else {
        worst / scale
    }
}
