//! Minimal CSR matrix and Jacobi-preconditioned conjugate gradients,
//! used to apply the stiffness preconditioner inside the eigensolver.

use crate::fem::ElementCache;
use crate::mesh::TriMesh;

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Csr {
        triplets.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut rows = Vec::with_capacity(triplets.len());
        let mut col = Vec::with_capacity(triplets.len());
        let mut val = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            if rows.last() == Some(&i) && col.last() == Some(&j) {
                *val.last_mut().unwrap() += v;
            } else {
                rows.push(i);
                col.push(j);
                val.push(v);
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &i in &rows {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col, val }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col[k] == i {
                    d[i] += self.val[k];
                }
            }
        }
        d
    }
}

/// Assembles the weighted stiffness matrix `K_ij = sum_T w_T |T| grad
/// phi_i . grad phi_j` with Dirichlet rows/columns replaced by identity.
pub(crate) fn assemble_weighted_stiffness(
    mesh: &TriMesh,
    cache: &ElementCache,
    tri_weights: &[f64],
) -> Csr {
    let n = mesh.vertex_count();
    let mut triplets = Vec::with_capacity(9 * mesh.triangle_count() + n);
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangles[t];
        let w = tri_weights[t] * cache.area[t];
        let g = &cache.grad_phi[t];
        for i in 0..3 {
            if mesh.boundary[tri[i]] {
                continue;
            }
            for j in 0..3 {
                if mesh.boundary[tri[j]] {
                    continue;
                }
                triplets.push((tri[i], tri[j], w * (g[i][0] * g[j][0] + g[i][1] * g[j][1])));
            }
        }
    }
    for v in 0..n {
        if mesh.boundary[v] {
            triplets.push((v, v, 1.0));
        }
    }
    Csr::from_triplets(n, triplets)
}

/// Jacobi-preconditioned CG. Returns the approximate solution of `A x = b`
/// after reducing the residual norm by `rel_tol` (or hitting `max_iter`).
pub(crate) fn pcg(a: &Csr, b: &[f64], rel_tol: f64, max_iter: usize) -> Vec<f64> {
    let n = a.n;
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 1e-300 { 1.0 / d } else { 0.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];

    let b_norm = norm(b);
    if b_norm < 1e-300 {
        return x;
    }
    let target = rel_tol * b_norm;
    let mut rz = dot(&r, &z);

    for _ in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= target {
            break;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
