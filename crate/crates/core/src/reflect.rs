//! Nonradial eigenfunctions on the disk by iterated odd reflection.
//!
//! A first eigenfunction `u_1` of the sector of opening `pi/n` extends to an
//! eigenfunction `Psi_n` of the whole disk: reflecting oddly across the rays
//! `theta = k pi/n` glues 2n signed copies of `u_1` into a single weak
//! solution with the same eigenvalue `tau_n` and exactly `2n` sector nodal
//! domains. The reflections `sigma_H(x) = x - 2 (x . a) a` are linear
//! involutive isometries with `det = -1`, so energy and mass decompose into
//! `2n` identical sector integrals and the gluing is exact.
//!
//! The disk mesh is generated by reflecting the sector mesh itself, which
//! matches vertices across the internal rays and makes the reflected field
//! an exact copy (no interpolation). [`weak_residual`] then checks the
//! discrete weak equation across the reflection interfaces.

use std::collections::HashMap;
use std::sync::Arc;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::fem::{self, ScalarField};
use crate::mesh::{build_mesh, TriMesh};

/// Merge tolerance for vertices shared across reflected copies.
const MATCH_TOL: f64 = 1e-10;

/// Reflection `sigma_H` about the line through the origin with unit normal
/// `a`: `x - 2 (x . a) a`.
#[inline]
pub fn reflect_point(x: [f64; 2], a: [f64; 2]) -> [f64; 2] {
    let d = 2.0 * (x[0] * a[0] + x[1] * a[1]);
    [x[0] - d * a[0], x[1] - d * a[1]]
}

/// Unit normals of the `n` distinct reflection lines `theta = k pi / n`,
/// `k = 0, ..., n-1`.
pub fn hyperplane_normals(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let alpha = std::f64::consts::PI * (k as f64 / n as f64);
            [-alpha.sin(), alpha.cos()]
        })
        .collect()
}

/// Matched sector/disk mesh pair for the 2n-fold odd reflection.
#[derive(Debug, Clone)]
pub struct ReflectionPlan {
    pub n: usize,
    /// Unit normals of the reflection lines (see [`hyperplane_normals`]).
    pub normals: Vec<[f64; 2]>,
    /// Base mesh of the sector `0 < theta < pi/n`.
    pub sector_mesh: Arc<TriMesh>,
    /// Disk mesh assembled from the 2n reflected copies of the sector mesh.
    pub disk_mesh: Arc<TriMesh>,
    /// `vertex_maps[k][v]` = disk vertex carrying sector vertex `v` of copy
    /// `k` (0-based; copy 0 is the base sector).
    vertex_maps: Vec<Vec<usize>>,
}

/// Quantized spatial lookup used to merge coincident vertices.
struct PointIndex {
    cells: HashMap<(i64, i64), Vec<usize>>,
    inv_cell: f64,
}

impl PointIndex {
    fn new() -> Self {
        PointIndex {
            cells: HashMap::new(),
            inv_cell: 1e6,
        }
    }

    fn key(&self, p: [f64; 2]) -> (i64, i64) {
        ((p[0] * self.inv_cell).round() as i64, (p[1] * self.inv_cell).round() as i64)
    }

    fn find(&self, p: [f64; 2], points: &[[f64; 2]], tol: f64) -> Option<usize> {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(kx + dx, ky + dy)) {
                    for &idx in bucket {
                        let q = points[idx];
                        if (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol {
                            return Some(idx);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: [f64; 2], idx: usize) {
        self.cells.entry(self.key(p)).or_default().push(idx);
    }
}

/// Builds the reflection plan for `Psi_n` at mesh size `h`.
///
/// The disk mesh is the union of the images of the base sector mesh under
/// `T_1 = id`, `T_{k+1} = sigma_{H_k} T_k`; shared-ray vertices are merged
/// (they coincide up to roundoff) and a failed merge is a construction
/// error.
pub fn reflection_plan(n: usize, h: f64) -> Result<ReflectionPlan> {
    if n < 1 {
        return Err(Error::InvalidConfig("reflection order n must be >= 1".into()));
    }
    let sector = Arc::new(build_mesh(
        &DomainSpec::sector(0.0, std::f64::consts::PI / n as f64)?,
        h,
    )?);

    // Orthogonal transforms onto the 2n sectors.
    let copies = 2 * n;
    let mut transforms: Vec<[[f64; 2]; 2]> = Vec::with_capacity(copies);
    transforms.push([[1.0, 0.0], [0.0, 1.0]]);
    for k in 1..copies {
        let alpha = std::f64::consts::PI * (k as f64 / n as f64);
        let a = [-alpha.sin(), alpha.cos()];
        // sigma = I - 2 a a^T, composed with the previous transform.
        let sigma = [
            [1.0 - 2.0 * a[0] * a[0], -2.0 * a[0] * a[1]],
            [-2.0 * a[0] * a[1], 1.0 - 2.0 * a[1] * a[1]],
        ];
        let prev = transforms[k - 1];
        let mut composed = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                composed[i][j] = sigma[i][0] * prev[0][j] + sigma[i][1] * prev[1][j];
            }
        }
        transforms.push(composed);
    }

    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut index = PointIndex::new();
    let mut vertex_maps: Vec<Vec<usize>> = Vec::with_capacity(copies);
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for (k, m) in transforms.iter().enumerate() {
        let mut map = Vec::with_capacity(sector.vertex_count());
        for &p in &sector.vertices {
            let q = [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]];
            let idx = match index.find(q, &vertices, MATCH_TOL) {
                Some(existing) => existing,
                None => {
                    vertices.push(q);
                    index.insert(q, vertices.len() - 1);
                    vertices.len() - 1
                }
            };
            map.push(idx);
        }
        // Odd copies (one more reflection) flip orientation.
        let swap = k % 2 == 1;
        for tri in &sector.triangles {
            let t = [map[tri[0]], map[tri[1]], map[tri[2]]];
            triangles.push(if swap { [t[0], t[2], t[1]] } else { t });
        }
        vertex_maps.push(map);
    }

    // Boundary flags from scratch: after a correct merge, the only boundary
    // edges left are on the unit circle.
    let mut mesh = TriMesh {
        boundary: vec![false; vertices.len()],
        vertices,
        triangles,
        h: 0.0,
        domain: Some(DomainSpec::unit_ball(2)),
    };
    for ((i, j), count) in mesh.edge_incidence() {
        if count == 1 {
            mesh.boundary[i] = true;
            mesh.boundary[j] = true;
        }
    }
    mesh.h = mesh.max_edge_length();
    for (v, &b) in mesh.boundary.iter().enumerate() {
        if b {
            let r = (mesh.vertices[v][0].powi(2) + mesh.vertices[v][1].powi(2)).sqrt();
            if (r - 1.0).abs() > 1e-9 {
                return Err(Error::Reflection(format!(
                    "vertex mismatch across a shared edge: interior vertex {v} at radius \
                     {r:.12} was not merged"
                )));
            }
        }
    }
    mesh.validate()
        .map_err(|e| Error::Reflection(format!("assembled disk mesh is invalid: {e}")))?;

    Ok(ReflectionPlan {
        n,
        normals: hyperplane_normals(n),
        sector_mesh: sector,
        disk_mesh: Arc::new(mesh),
        vertex_maps,
    })
}

impl ReflectionPlan {
    /// Disk vertex closest to `point` within `tol`, by linear scan.
    pub fn find_disk_vertex(&self, point: [f64; 2], tol: f64) -> Option<usize> {
        self.disk_mesh
            .vertices
            .iter()
            .position(|q| (q[0] - point[0]).abs() <= tol && (q[1] - point[1]).abs() <= tol)
    }
}

/// Extends a Dirichlet-constrained sector field to the disk by the
/// recursive odd reflection `u_k = -u_{k-1}(sigma_{H_{k-1}} x)`.
///
/// Values are copied exactly (the meshes are vertex-matched); vertices on
/// the internal rays carry 0. Conflicting values at a shared vertex are a
/// construction error.
pub fn reflect_odd(u1: &ScalarField, plan: &ReflectionPlan) -> Result<ScalarField> {
    if !u1.constrained {
        return Err(Error::Reflection(
            "sector field must be Dirichlet-constrained".into(),
        ));
    }
    if !Arc::ptr_eq(&u1.mesh, &plan.sector_mesh) && *u1.mesh != *plan.sector_mesh {
        return Err(Error::Reflection(
            "field is not defined on the plan's sector mesh".into(),
        ));
    }
    let scale = u1.max_abs().max(1e-300);
    let mut values = vec![f64::NAN; plan.disk_mesh.vertex_count()];
    for (k, map) in plan.vertex_maps.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (v, &dv) in map.iter().enumerate() {
            let val = sign * u1.values[v];
            if values[dv].is_nan() {
                values[dv] = val;
            } else if (values[dv] - val).abs() > MATCH_TOL * scale {
                return Err(Error::Reflection(format!(
                    "field mismatch across a shared edge at disk vertex {dv}: \
                     {:.3e} vs {val:.3e}",
                    values[dv]
                )));
            }
        }
    }
    ScalarField::from_values(&plan.disk_mesh, values, true)
}

/// Number of nodal domains of `u`: connected components of the positive and
/// negative vertex classes, connecting through mesh edges whose endpoints
/// share a sign class. Values with `|u| <= threshold` are neutral.
pub fn count_nodal_domains(u: &ScalarField, threshold: f64) -> usize {
    let threshold = threshold.max(0.0);
    let mesh = &u.mesh;
    let nv = mesh.vertex_count();
    let sign_of = |v: usize| -> i8 {
        if u.values[v] > threshold {
            1
        } else if u.values[v] < -threshold {
            -1
        } else {
            0
        }
    };
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for tri in &mesh.triangles {
        for e in 0..3 {
            let (i, j) = (tri[e], tri[(e + 1) % 3]);
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    let mut visited = vec![false; nv];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..nv {
        let s = sign_of(start);
        if s == 0 || visited[start] {
            continue;
        }
        components += 1;
        visited[start] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !visited[w] && sign_of(w) == s {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// Discrete weak-equation residual of `(lambda, u)`: the normalized maximum
/// over interior hat functions of the energy form minus `lambda` times the
/// mass form. For a field glued by [`reflect_odd`] from a converged sector
/// eigenpair this stays at the sector solver's stationarity level, which is
/// the numerical content of the gluing argument.
pub fn weak_residual(u: &ScalarField, lambda: f64, p: f64) -> f64 {
    fem::stationarity_residual(u, lambda, p, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn reflections_are_involutive_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [1usize, 2, 3, 4] {
            for a in hyperplane_normals(n) {
                for _ in 0..250 {
                    let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    let y = reflect_point(x, a);
                    let z = reflect_point(y, a);
                    assert!((z[0] - x[0]).abs() < 1e-14 && (z[1] - x[1]).abs() < 1e-14);
                    let rx = (x[0] * x[0] + x[1] * x[1]).sqrt();
                    let ry = (y[0] * y[0] + y[1] * y[1]).sqrt();
                    assert!((rx - ry).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn plan_tiles_the_disk() {
        for n in [1usize, 2, 3] {
            let plan = reflection_plan(n, 0.1).unwrap();
            let area = plan.disk_mesh.area();
            assert!(
                (area - PI).abs() < 0.01 * PI,
                "n={n}: disk area {area} vs {PI}"
            );
            assert_eq!(plan.disk_mesh.euler_characteristic(), 1);
            assert_eq!(
                plan.disk_mesh.triangle_count(),
                2 * n * plan.sector_mesh.triangle_count()
            );
            // Copy areas are exact isometric images of the base sector.
            let sector_area = plan.sector_mesh.area();
            assert!((area - 2.0 * n as f64 * sector_area).abs() < 1e-10 * area);
        }
    }

    #[test]
    fn zero_field_reflects_to_zero() {
        let plan = reflection_plan(2, 0.2).unwrap();
        let zero = ScalarField::zeros(&plan.sector_mesh, true);
        let psi = reflect_odd(&zero, &plan).unwrap();
        assert!(psi.values.iter().all(|&v| v == 0.0));
        assert_eq!(count_nodal_domains(&psi, 1e-12), 0);
        assert_eq!(weak_residual(&psi, 3.0, 2.0), 0.0);
    }

    #[test]
    fn coordinate_field_has_two_nodal_domains() {
        let mesh = Arc::new(build_mesh(&DomainSpec::unit_ball(2), 0.15).unwrap());
        let u = ScalarField::from_fn(&mesh, |p| p[0], false);
        assert_eq!(count_nodal_domains(&u, 1e-12), 2);
    }

    #[test]
    fn odd_reflection_structure_n1() {
        let plan = reflection_plan(1, 0.15).unwrap();
        // A synthetic positive sector profile stands in for the
        // eigenfunction: nodal structure only needs a one-signed u1.
        let u1 = ScalarField::from_fn(
            &plan.sector_mesh,
            |p| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                (1.0 - r) * r * p[1].max(0.0)
            },
            true,
        );
        let psi = reflect_odd(&u1, &plan).unwrap();
        assert_eq!(count_nodal_domains(&psi, 1e-10 * psi.max_abs()), 2);
        // Odd under (x, y) -> (x, -y).
        for (v, p) in plan.disk_mesh.vertices.iter().enumerate() {
            let mirrored = plan.find_disk_vertex([p[0], -p[1]], 1e-9).unwrap();
            assert!(
                (psi.values[v] + psi.values[mirrored]).abs() <= 1e-12 * psi.max_abs().max(1.0)
            );
        }
    }

    #[test]
    fn dihedral_equivariance_negates_field() {
        let plan = reflection_plan(3, 0.2).unwrap();
        let u1 = ScalarField::from_fn(
            &plan.sector_mesh,
            |p| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                ((1.0 - r) * r).max(0.0)
            },
            true,
        );
        let psi = reflect_odd(&u1, &plan).unwrap();
        for a in &plan.normals {
            for (v, p) in plan.disk_mesh.vertices.iter().enumerate() {
                let image = reflect_point(*p, *a);
                let iv = plan.find_disk_vertex(image, 1e-9).unwrap();
                assert!(
                    (psi.values[v] + psi.values[iv]).abs() <= 1e-12 * psi.max_abs().max(1.0),
                    "normal {a:?}, vertex {v}"
                );
            }
        }
    }

    #[test]
    fn rejects_mismatched_field() {
        let plan = reflection_plan(2, 0.2).unwrap();
        let other = Arc::new(build_mesh(&DomainSpec::sector(0.0, PI / 3.0).unwrap(), 0.2).unwrap());
        let u = ScalarField::zeros(&other, true);
        assert!(reflect_odd(&u, &plan).is_err());
        let unconstrained = ScalarField::from_fn(&plan.sector_mesh, |_| 1.0, false);
        assert!(reflect_odd(&unconstrained, &plan).is_err());
    }
}
