//! Structured mesh generators for the disk, sector, annulus and eccentric
//! annulus.
//!
//! All generators lay vertices on concentric rings and triangulate
//! neighbouring rings with an angle-ordered zip, which keeps the
//! construction deterministic and the boundary vertices exactly on the
//! analytic curves. The eccentric annulus is meshed as the Moebius image of
//! a concentric annulus sampled uniformly in (log r, theta); the map is
//! conformal, so the image triangles stay near-isotropic while their size
//! grades with the gap width.

use std::f64::consts::PI;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

use super::TriMesh;

/// A run of vertex indices ordered by an angular parameter.
struct Chain {
    idx: Vec<usize>,
    param: Vec<f64>,
}

impl Chain {
    fn single(idx: usize) -> Self {
        Chain {
            idx: vec![idx],
            param: vec![0.0],
        }
    }

    /// Closes the chain by re-appending its first vertex one period later.
    fn closed(mut self, period: f64) -> Self {
        self.idx.push(self.idx[0]);
        self.param.push(self.param[0] + period);
        self
    }
}

/// Triangulates the strip between two parameter-ordered chains.
///
/// Both chains must advance over the same parameter range. Produces
/// `(inner.len() - 1) + (outer.len() - 1)` counter-clockwise triangles.
fn zip_strip(tris: &mut Vec<[usize; 3]>, inner: &Chain, outer: &Chain) {
    let mut i = 0;
    let mut j = 0;
    while i + 1 < inner.idx.len() || j + 1 < outer.idx.len() {
        let advance_inner = if j + 1 >= outer.idx.len() {
            true
        } else if i + 1 >= inner.idx.len() {
            false
        } else {
            // Ties advance the inner chain, which keeps the angular lag
            // between the two walkers below one spacing.
            inner.param[i + 1] <= outer.param[j + 1] + 1e-12
        };
        if advance_inner {
            tris.push([inner.idx[i], outer.idx[j], inner.idx[i + 1]]);
            i += 1;
        } else {
            tris.push([inner.idx[i], outer.idx[j], outer.idx[j + 1]]);
            j += 1;
        }
    }
}

/// Builds a triangulation of `spec` with target edge length `h`.
///
/// The achieved maximum edge length is at most `1.5 * h`; boundary vertices
/// lie on the analytic boundary to within roundoff.
pub fn build_mesh(spec: &DomainSpec, h: f64) -> Result<TriMesh> {
    spec.validate()?;
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::Mesh(format!(
            "target edge length must lie in (0, 0.5], got {h}"
        )));
    }
    let mut mesh = match *spec {
        DomainSpec::Ball { dim: 2, radius } => disk(radius, h),
        DomainSpec::Ball { dim, .. } => {
            return Err(Error::Mesh(format!(
                "only 2-D balls are meshable (got dim = {dim}); use the radial solver instead"
            )));
        }
        DomainSpec::Annulus { inner, outer } => annulus(inner, outer, h),
        DomainSpec::Sector { angle_lo, angle_hi } => sector(angle_lo, angle_hi, h)?,
        DomainSpec::HalfBall => sector(0.0, PI, h)?,
        DomainSpec::EccentricAnnulus {
            obstacle_radius,
            offset,
        } => eccentric_annulus(obstacle_radius, offset, h)?,
    };
    mesh.domain = Some(spec.clone());
    mesh.h = mesh.max_edge_length();
    Ok(mesh)
}

fn disk(radius: f64, h: f64) -> TriMesh {
    let rings = (radius / h).ceil().max(2.0) as usize;
    let mut vertices = vec![[0.0, 0.0]];
    let mut boundary = vec![false];
    let mut ring_chains: Vec<Chain> = Vec::with_capacity(rings);

    for k in 1..=rings {
        let r = radius * k as f64 / rings as f64;
        let count = 6 * k;
        let mut idx = Vec::with_capacity(count);
        let mut param = Vec::with_capacity(count);
        for j in 0..count {
            let theta = 2.0 * PI * (j as f64 / count as f64);
            vertices.push([r * theta.cos(), r * theta.sin()]);
            boundary.push(k == rings);
            idx.push(vertices.len() - 1);
            param.push(theta);
        }
        ring_chains.push(Chain { idx, param });
    }

    let mut triangles = Vec::new();
    let period = 2.0 * PI;
    let first = Chain {
        idx: ring_chains[0].idx.clone(),
        param: ring_chains[0].param.clone(),
    }
    .closed(period);
    zip_strip(&mut triangles, &Chain::single(0), &first);
    for k in 1..rings {
        let inner = Chain {
            idx: ring_chains[k - 1].idx.clone(),
            param: ring_chains[k - 1].param.clone(),
        }
        .closed(period);
        let outer = Chain {
            idx: ring_chains[k].idx.clone(),
            param: ring_chains[k].param.clone(),
        }
        .closed(period);
        zip_strip(&mut triangles, &inner, &outer);
    }

    TriMesh {
        vertices,
        triangles,
        boundary,
        h: 0.0,
        domain: None,
    }
}

fn sector(angle_lo: f64, angle_hi: f64, h: f64) -> Result<TriMesh> {
    let width = angle_hi - angle_lo;
    if width >= 2.0 * PI - 1e-12 {
        return Err(Error::Mesh(
            "full-angle sector (slit disk) is not meshable; use a ball domain".into(),
        ));
    }
    let rings = (1.0 / h).ceil().max(2.0) as usize;
    let mut vertices = vec![[0.0, 0.0]];
    let mut boundary = vec![true]; // apex is Dirichlet for any opening < 2*pi
    let mut chains: Vec<Chain> = Vec::with_capacity(rings);

    for k in 1..=rings {
        let r = k as f64 / rings as f64;
        let segments = ((width * r / h).ceil() as usize).max(1);
        let mut idx = Vec::with_capacity(segments + 1);
        let mut param = Vec::with_capacity(segments + 1);
        for j in 0..=segments {
            let theta = angle_lo + width * (j as f64 / segments as f64);
            vertices.push([r * theta.cos(), r * theta.sin()]);
            boundary.push(k == rings || j == 0 || j == segments);
            idx.push(vertices.len() - 1);
            param.push(theta);
        }
        chains.push(Chain { idx, param });
    }

    let mut triangles = Vec::new();
    let mut apex = Chain::single(0);
    apex.param[0] = angle_lo;
    zip_strip(&mut triangles, &apex, &chains[0]);
    for k in 1..rings {
        zip_strip(&mut triangles, &chains[k - 1], &chains[k]);
    }

    Ok(TriMesh {
        vertices,
        triangles,
        boundary,
        h: 0.0,
        domain: None,
    })
}

fn annulus(inner: f64, outer: f64, h: f64) -> TriMesh {
    let bands = ((outer - inner) / h).ceil().max(1.0) as usize;
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();
    let mut chains: Vec<Chain> = Vec::with_capacity(bands + 1);

    for k in 0..=bands {
        let r = inner + (outer - inner) * k as f64 / bands as f64;
        let count = ((2.0 * PI * r / h).ceil() as usize).max(6);
        let mut idx = Vec::with_capacity(count);
        let mut param = Vec::with_capacity(count);
        for j in 0..count {
            let theta = 2.0 * PI * (j as f64 / count as f64);
            vertices.push([r * theta.cos(), r * theta.sin()]);
            boundary.push(k == 0 || k == bands);
            idx.push(vertices.len() - 1);
            param.push(theta);
        }
        chains.push(Chain { idx, param });
    }

    let mut triangles = Vec::new();
    for k in 0..bands {
        let inner_chain = Chain {
            idx: chains[k].idx.clone(),
            param: chains[k].param.clone(),
        }
        .closed(2.0 * PI);
        let outer_chain = Chain {
            idx: chains[k + 1].idx.clone(),
            param: chains[k + 1].param.clone(),
        }
        .closed(2.0 * PI);
        zip_strip(&mut triangles, &inner_chain, &outer_chain);
    }

    TriMesh {
        vertices,
        triangles,
        boundary,
        h: 0.0,
        domain: None,
    }
}

/// Moebius coefficient `a` such that `z -> (z - a) / (1 - a z)` maps the
/// obstacle circle (centre `t`, radius `r`) to a circle centred at the
/// origin. The two roots of the defining quadratic multiply to 1; the one
/// in (0, 1) is the valid coefficient.
fn moebius_coefficient(r: f64, t: f64) -> f64 {
    if t < 1e-14 {
        return 0.0;
    }
    let s = 2.0 * t;
    let p = t * t - r * r;
    let disc = ((1.0 + p) * (1.0 + p) - s * s).sqrt();
    (1.0 + p - disc) / s
}

fn eccentric_annulus(r: f64, t: f64, h: f64) -> Result<TriMesh> {
    let gap = 1.0 - t - r;
    if gap < 2.0 * h {
        return Err(Error::MeshTooCoarse { gap, h });
    }
    let a = moebius_coefficient(r, t);
    let rho = (t + r - a) / (1.0 - a * (t + r));

    // Uniform (log s, theta) grid in the concentric model annulus
    // rho < |w| < 1; the conformal factor of w -> (w + a)/(1 + a w) peaks at
    // w = -1, which fixes the grid spacing needed for max edge length h.
    let delta = h * (1.0 - a) / (1.0 + a);
    let n_theta = ((2.0 * PI / delta).ceil() as usize).max(8);
    let n_rad = (((1.0 / rho).ln() / delta).ceil() as usize).max(1);

    let mut vertices = Vec::with_capacity((n_rad + 1) * n_theta);
    let mut boundary = Vec::with_capacity((n_rad + 1) * n_theta);
    for k in 0..=n_rad {
        let s = (rho.ln() * (n_rad - k) as f64 / n_rad as f64).exp();
        for j in 0..n_theta {
            let theta = 2.0 * PI * (j as f64 / n_theta as f64);
            let (wx, wy) = (s * theta.cos(), s * theta.sin());
            // z = (w + a) / (1 + a w)
            let (nx, ny) = (wx + a, wy);
            let (dx, dy) = (1.0 + a * wx, a * wy);
            let den = dx * dx + dy * dy;
            vertices.push([(nx * dx + ny * dy) / den, (ny * dx - nx * dy) / den]);
            boundary.push(k == 0 || k == n_rad);
        }
    }

    let mut triangles = Vec::with_capacity(2 * n_rad * n_theta);
    for k in 0..n_rad {
        for j in 0..n_theta {
            let jn = (j + 1) % n_theta;
            let v00 = k * n_theta + j;
            let v01 = k * n_theta + jn;
            let v10 = (k + 1) * n_theta + j;
            let v11 = (k + 1) * n_theta + jn;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }

    Ok(TriMesh {
        vertices,
        triangles,
        boundary,
        h: 0.0,
        domain: None,
    })
}
