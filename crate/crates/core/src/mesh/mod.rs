//! Planar triangulations of the computational domains.
//!
//! All meshes are structured polar/sector templates built directly from a
//! [`DomainSpec`], so identical inputs produce byte-identical meshes.
//! Triangles are counter-clockwise, boundary vertices sit on the analytic
//! boundary curves, and `boundary[v]` marks the Dirichlet mask used by the
//! FEM layer.

mod build;
mod io;

pub use build::build_mesh;

use std::collections::BTreeMap;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// Triangulation of a 2-D domain with Dirichlet boundary flags.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    /// Vertex coordinates.
    pub vertices: Vec<[f64; 2]>,
    /// Counter-clockwise vertex-index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Per-vertex Dirichlet flag (true = on the domain boundary).
    pub boundary: Vec<bool>,
    /// Achieved maximum edge length.
    pub h: f64,
    /// Generating domain, when known; used to project refined boundary
    /// vertices back onto the analytic boundary. `None` for imported meshes.
    pub domain: Option<DomainSpec>,
}

impl TriMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Indices of vertices not on the Dirichlet boundary.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Signed area of triangle `t` (positive for CCW orientation).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]))
    }

    /// Sum of triangle areas.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    /// Distinct undirected edges with the number of incident triangles.
    pub fn edge_incidence(&self) -> BTreeMap<(usize, usize), u32> {
        let mut edges = BTreeMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                let key = (i.min(j), i.max(j));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
        edges
    }

    /// Edges incident to exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        self.edge_incidence()
            .into_iter()
            .filter_map(|(e, n)| (n == 1).then_some(e))
            .collect()
    }

    /// Euler characteristic `V - E + T` (1 for simply connected domains,
    /// 0 for domains with one hole).
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edge_incidence().len() as i64;
        let t = self.triangles.len() as i64;
        v - e + t
    }

    /// Maximum edge length over all triangles.
    pub fn max_edge_length(&self) -> f64 {
        let mut h: f64 = 0.0;
        for tri in &self.triangles {
            for k in 0..3 {
                let a = self.vertices[tri[k]];
                let b = self.vertices[tri[(k + 1) % 3]];
                h = h.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        h
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for tri in &self.triangles {
            for k in 0..3 {
                let p = self.vertices[tri[k]];
                let q = self.vertices[tri[(k + 1) % 3]];
                let r = self.vertices[tri[(k + 2) % 3]];
                let u = [q[0] - p[0], q[1] - p[1]];
                let v = [r[0] - p[0], r[1] - p[1]];
                let dot = u[0] * v[0] + u[1] * v[1];
                let cross = u[0] * v[1] - u[1] * v[0];
                worst = worst.min(cross.atan2(dot).abs());
            }
        }
        worst.to_degrees()
    }

    /// Checks all mesh invariants: positive triangle areas, boundary edges
    /// fully flagged, connectivity, and absence of duplicate vertices.
    pub fn validate(&self) -> Result<()> {
        if self.boundary.len() != self.vertices.len() {
            return Err(Error::Mesh(format!(
                "boundary mask length {} != vertex count {}",
                self.boundary.len(),
                self.vertices.len()
            )));
        }
        if self.vertices.is_empty() || self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no vertices or no triangles".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= self.vertices.len() {
                    return Err(Error::Mesh(format!(
                        "triangle {t} references missing vertex {v}"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Mesh(format!("triangle {t} has repeated vertices")));
            }
            let area = self.signed_area(t);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!(
                    "triangle {t} has nonpositive signed area {area:.3e}"
                )));
            }
        }
        for ((i, j), count) in self.edge_incidence() {
            if count > 2 {
                return Err(Error::Mesh(format!(
                    "edge ({i}, {j}) belongs to {count} triangles"
                )));
            }
            if count == 1 && !(self.boundary[i] && self.boundary[j]) {
                return Err(Error::Mesh(format!(
                    "boundary edge ({i}, {j}) has an unflagged endpoint"
                )));
            }
        }
        self.check_connected()?;
        self.check_no_duplicates()?;
        Ok(())
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for tri in &self.triangles {
            for k in 0..3 {
                adj[tri[k]].push(tri[(k + 1) % 3]);
                adj[tri[k]].push(tri[(k + 2) % 3]);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Mesh("mesh is not connected".into()));
        }
        Ok(())
    }

    fn check_no_duplicates(&self) -> Result<()> {
        const TOL: f64 = 1e-12;
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            self.vertices[a][0]
                .total_cmp(&self.vertices[b][0])
                .then(self.vertices[a][1].total_cmp(&self.vertices[b][1]))
        });
        for (rank, &a) in order.iter().enumerate() {
            for &b in order[rank + 1..].iter() {
                let pa = self.vertices[a];
                let pb = self.vertices[b];
                if pb[0] - pa[0] > TOL {
                    break;
                }
                if (pb[1] - pa[1]).abs() <= TOL && (pb[0] - pa[0]).abs() <= TOL {
                    return Err(Error::Mesh(format!(
                        "vertices {a} and {b} coincide within {TOL:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Uniform refinement: each triangle splits into 4 via edge midpoints.
    ///
    /// Midpoints of boundary edges are projected back onto the analytic
    /// boundary (when the generating domain is known) and inherit the
    /// Dirichlet flag. The achieved edge length halves up to the projection
    /// perturbation.
    pub fn refine(&self) -> TriMesh {
        self.refine_with_map().0
    }

    /// Like [`refine`](Self::refine), also returning, for each new vertex
    /// (indices `>= self.vertex_count()`), the parent edge it bisects.
    /// Parent vertices keep their indices, which makes prolongation of
    /// fields onto the refined mesh trivial.
    pub fn refine_with_map(&self) -> (TriMesh, Vec<(usize, usize)>) {
        let boundary_edges: std::collections::BTreeSet<(usize, usize)> = self
            .edge_incidence()
            .into_iter()
            .filter_map(|(e, n)| (n == 1).then_some(e))
            .collect();

        let mut vertices = self.vertices.clone();
        let mut boundary = self.boundary.clone();
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut parent_edges: Vec<(usize, usize)> = Vec::new();
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());

        let mut get_mid = |i: usize,
                           j: usize,
                           vertices: &mut Vec<[f64; 2]>,
                           boundary: &mut Vec<bool>| {
            let key = (i.min(j), i.max(j));
            if let Some(&m) = midpoint.get(&key) {
                return m;
            }
            let a = vertices[i];
            let b = vertices[j];
            let mut m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let on_boundary = boundary_edges.contains(&key);
            if on_boundary {
                if let Some(spec) = &self.domain {
                    m = project_to_boundary(spec, a, b, m);
                }
            }
            vertices.push(m);
            boundary.push(on_boundary);
            parent_edges.push(key);
            let idx = vertices.len() - 1;
            midpoint.insert(key, idx);
            idx
        };

        for tri in &self.triangles {
            let [a, b, c] = *tri;
            let mab = get_mid(a, b, &mut vertices, &mut boundary);
            let mbc = get_mid(b, c, &mut vertices, &mut boundary);
            let mca = get_mid(c, a, &mut vertices, &mut boundary);
            triangles.push([a, mab, mca]);
            triangles.push([b, mbc, mab]);
            triangles.push([c, mca, mbc]);
            triangles.push([mab, mbc, mca]);
        }

        let mut mesh = TriMesh {
            vertices,
            triangles,
            boundary,
            h: 0.0,
            domain: self.domain.clone(),
        };
        mesh.h = mesh.max_edge_length();
        (mesh, parent_edges)
    }
}

/// Projects the midpoint of a boundary edge onto the boundary curve the
/// edge approximates.
fn project_to_boundary(spec: &DomainSpec, a: [f64; 2], b: [f64; 2], m: [f64; 2]) -> [f64; 2] {
    let scale_to = |p: [f64; 2], c: [f64; 2], r: f64| -> [f64; 2] {
        let d = [p[0] - c[0], p[1] - c[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if len < 1e-300 {
            return p;
        }
        [c[0] + d[0] * r / len, c[1] + d[1] * r / len]
    };
    let radius = |p: [f64; 2]| (p[0] * p[0] + p[1] * p[1]).sqrt();
    match *spec {
        DomainSpec::Ball { radius: r, .. } => scale_to(m, [0.0, 0.0], r),
        DomainSpec::Annulus { inner, outer } => {
            let rm = radius(m);
            if (rm - inner).abs() <= (rm - outer).abs() {
                scale_to(m, [0.0, 0.0], inner)
            } else {
                scale_to(m, [0.0, 0.0], outer)
            }
        }
        DomainSpec::Sector { .. } | DomainSpec::HalfBall => {
            // Arc edges have both endpoints at radius 1; ray edges are
            // straight, so their midpoints are already exact.
            let on_arc = (radius(a) - 1.0).abs() <= 1e-9 && (radius(b) - 1.0).abs() <= 1e-9;
            if on_arc {
                scale_to(m, [0.0, 0.0], 1.0)
            } else {
                m
            }
        }
        DomainSpec::EccentricAnnulus {
            obstacle_radius,
            offset,
        } => {
            let c = [offset, 0.0];
            let d_inner = ((m[0] - c[0]).powi(2) + (m[1] - c[1]).powi(2)).sqrt() - obstacle_radius;
            let d_outer = radius(m) - 1.0;
            if d_inner.abs() <= d_outer.abs() {
                scale_to(m, c, obstacle_radius)
            } else {
                scale_to(m, [0.0, 0.0], 1.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::build_mesh;
    use crate::domain::DomainSpec;
    use std::f64::consts::PI;

    #[test]
    fn disk_mesh_area_and_quality() {
        let mesh = build_mesh(&DomainSpec::unit_ball(2), 0.1).unwrap();
        mesh.validate().unwrap();
        assert!((mesh.area() - PI).abs() < 0.005 * PI, "area {}", mesh.area());
        assert!(mesh.h <= 1.5 * 0.1, "h = {}", mesh.h);
        assert!(mesh.min_angle_deg() >= 20.0, "min angle {}", mesh.min_angle_deg());
        assert_eq!(mesh.euler_characteristic(), 1);
        for (v, &b) in mesh.boundary.iter().enumerate() {
            let r = (mesh.vertices[v][0].powi(2) + mesh.vertices[v][1].powi(2)).sqrt();
            if b {
                assert!((r - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn half_disk_mesh() {
        let mesh = build_mesh(&DomainSpec::sector(0.0, PI).unwrap(), 0.1).unwrap();
        mesh.validate().unwrap();
        assert!((mesh.area() - PI / 2.0).abs() < 0.005 * PI / 2.0);
        assert!(mesh.vertices.iter().all(|v| v[1] >= -1e-12));
        assert_eq!(mesh.euler_characteristic(), 1);
        assert!(mesh.min_angle_deg() >= 20.0, "min angle {}", mesh.min_angle_deg());
    }

    #[test]
    fn annulus_mesh_topology() {
        let mesh = build_mesh(&DomainSpec::annulus(0.4, 1.0).unwrap(), 0.1).unwrap();
        mesh.validate().unwrap();
        let exact = PI * (1.0 - 0.16);
        assert!((mesh.area() - exact).abs() < 0.005 * exact);
        assert_eq!(mesh.euler_characteristic(), 0);
        assert!(mesh.min_angle_deg() >= 20.0, "min angle {}", mesh.min_angle_deg());
    }

    #[test]
    fn eccentric_annulus_mesh() {
        let spec = DomainSpec::eccentric_annulus(0.3, 0.2).unwrap();
        let mesh = build_mesh(&spec, 0.05).unwrap();
        mesh.validate().unwrap();
        let exact = PI * (1.0 - 0.09);
        assert!(
            (mesh.area() - exact).abs() < 0.005 * exact,
            "area {} vs {exact}",
            mesh.area()
        );
        assert_eq!(mesh.euler_characteristic(), 0);
        assert!(mesh.min_angle_deg() >= 20.0, "min angle {}", mesh.min_angle_deg());
        assert!(mesh.h <= 1.5 * 0.05, "h = {}", mesh.h);
        // No vertex strictly inside the obstacle.
        for v in &mesh.vertices {
            let d = ((v[0] - 0.2).powi(2) + v[1].powi(2)).sqrt();
            assert!(d >= 0.3 - 1e-12, "vertex {v:?} inside obstacle");
        }
    }

    #[test]
    fn eccentric_gap_too_coarse() {
        let spec = DomainSpec::eccentric_annulus(0.3, 0.6).unwrap();
        let err = build_mesh(&spec, 0.06).unwrap_err();
        assert!(err.to_string().contains("too coarse"), "{err}");
    }

    #[test]
    fn refine_arithmetic_and_convergence() {
        let mesh = build_mesh(&DomainSpec::unit_ball(2), 0.2).unwrap();
        let fine = mesh.refine();
        fine.validate().unwrap();
        assert_eq!(fine.triangle_count(), 4 * mesh.triangle_count());
        // Boundary vertex count doubles (+/- 1).
        let nb = mesh.boundary.iter().filter(|&&b| b).count();
        let nb_fine = fine.boundary.iter().filter(|&&b| b).count();
        assert!((nb_fine as i64 - 2 * nb as i64).abs() <= 1);
        // h halves within 10%.
        assert!((fine.h - 0.5 * mesh.h).abs() <= 0.1 * 0.5 * mesh.h);
        // Area error shrinks ~4x.
        let err0 = (mesh.area() - PI).abs();
        let err1 = (fine.area() - PI).abs();
        assert!(err1 < err0 / 3.0, "err0={err0:.3e} err1={err1:.3e}");
        // Refined boundary vertices were projected onto the circle.
        for (v, &b) in fine.boundary.iter().enumerate() {
            if b {
                let r = (fine.vertices[v][0].powi(2) + fine.vertices[v][1].powi(2)).sqrt();
                assert!((r - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn meshes_are_deterministic() {
        let spec = DomainSpec::eccentric_annulus(0.3, 0.2).unwrap();
        let a = build_mesh(&spec, 0.07).unwrap();
        let b = build_mesh(&spec, 0.07).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ball_radius_other_than_one() {
        let mesh = build_mesh(&DomainSpec::ball(2, 0.5).unwrap(), 0.05).unwrap();
        mesh.validate().unwrap();
        let exact = PI * 0.25;
        assert!((mesh.area() - exact).abs() < 0.005 * exact);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(build_mesh(&DomainSpec::unit_ball(3), 0.1).is_err());
        assert!(build_mesh(&DomainSpec::unit_ball(2), 0.0).is_err());
        assert!(build_mesh(&DomainSpec::unit_ball(2), 0.6).is_err());
    }
}

