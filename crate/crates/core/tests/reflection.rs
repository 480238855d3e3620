//! Odd-reflection eigenfunctions built from converged sector eigenpairs:
//! nodal structure, Rayleigh-quotient equality and the weak-form residual
//! across the reflection interfaces.

mod common;

use plap_core::eigensolver::first_eigenpair;
use plap_core::fem::rayleigh;
use plap_core::reflect::{count_nodal_domains, reflect_odd, reflection_plan, weak_residual};
use plap_core::SolverConfig;

fn cfg(p: f64) -> SolverConfig {
    SolverConfig {
        p,
        ..SolverConfig::default()
    }
}

#[test]
fn reflected_eigenfunctions_have_2n_nodal_domains() {
    for &p in &[2.0, 3.0] {
        for n in [1usize, 2, 3] {
            let plan = reflection_plan(n, 0.08).unwrap();
            let pair = first_eigenpair(&plan.sector_mesh, p, &cfg(p)).unwrap();
            assert!(pair.converged);
            let u1 = pair.mesh_field().unwrap();
            let psi = reflect_odd(u1, &plan).unwrap();
            let threshold = 1e-10 * psi.max_abs();
            assert_eq!(
                count_nodal_domains(&psi, threshold),
                2 * n,
                "p={p} n={n}"
            );
        }
    }
}

#[test]
fn reflected_rayleigh_equals_sector_eigenvalue() {
    // Energy and mass both split into 2n congruent sector integrals, so the
    // quotient is preserved to roundoff.
    for &p in &[1.5, 2.0, 3.0] {
        let n = 2;
        let plan = reflection_plan(n, 0.1).unwrap();
        let pair = first_eigenpair(&plan.sector_mesh, p, &cfg(p)).unwrap();
        let psi = reflect_odd(pair.mesh_field().unwrap(), &plan).unwrap();
        let r = rayleigh(&psi, p);
        let rel = (r - pair.lambda).abs() / pair.lambda;
        assert!(rel <= 1e-10, "p={p}: Rayleigh {r} vs tau {} (rel {rel:.2e})", pair.lambda);
    }
}

#[test]
fn weak_residual_tracks_solver_stationarity() {
    let plan = reflection_plan(1, 0.08).unwrap();
    let c = cfg(2.0);
    let pair = first_eigenpair(&plan.sector_mesh, 2.0, &c).unwrap();
    assert!(pair.converged);
    let psi = reflect_odd(pair.mesh_field().unwrap(), &plan).unwrap();
    let res = weak_residual(&psi, pair.lambda, 2.0);
    assert!(
        res <= 10.0 * c.tol_grad,
        "residual {res:.3e} vs 10 * tol_grad {:.3e}",
        10.0 * c.tol_grad
    );
    // A deliberately wrong eigenvalue inflates the residual by >= 10x.
    let wrong = weak_residual(&psi, pair.lambda * 1.1, 2.0);
    assert!(wrong >= 10.0 * res, "wrong {wrong:.3e} vs right {res:.3e}");
}

#[test]
fn nodal_domains_are_equal_sectors() {
    // Each nodal domain of Psi_3 is a sector of area pi/6. Triangles are
    // classified by the sign of their vertex sum (interface vertices carry
    // 0), which reproduces the copy decomposition.
    let n = 3;
    let plan = reflection_plan(n, 0.08).unwrap();
    let pair = first_eigenpair(&plan.sector_mesh, 2.0, &cfg(2.0)).unwrap();
    let psi = reflect_odd(pair.mesh_field().unwrap(), &plan).unwrap();
    let mesh = &plan.disk_mesh;

    // Label vertices by sign component (same traversal as the public count).
    let threshold = 1e-10 * psi.max_abs();
    let nv = mesh.vertex_count();
    let sign_of = |v: usize| -> i8 {
        if psi.values[v] > threshold {
            1
        } else if psi.values[v] < -threshold {
            -1
        } else {
            0
        }
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for tri in &mesh.triangles {
        for e in 0..3 {
            adj[tri[e]].push(tri[(e + 1) % 3]);
            adj[tri[(e + 1) % 3]].push(tri[e]);
        }
    }
    let mut label = vec![usize::MAX; nv];
    let mut components = 0usize;
    for start in 0..nv {
        if sign_of(start) == 0 || label[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        label[start] = components;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if label[w] == usize::MAX && sign_of(w) == sign_of(start) {
                    label[w] = components;
                    stack.push(w);
                }
            }
        }
        components += 1;
    }
    assert_eq!(components, 2 * n);

    // Triangle -> component through its signed vertices. Corner triangles
    // whose three vertices all sit on nodal lines carry no sign and are
    // skipped; they cover O(h^2) area per component.
    let mut areas = vec![0.0f64; components];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if let Some(lab) = tri.iter().find_map(|&v| (sign_of(v) != 0).then(|| label[v])) {
            areas[lab] += mesh.signed_area(t);
        }
    }
    let sector_area = std::f64::consts::PI / (2 * n) as f64;
    for (k, &a) in areas.iter().enumerate() {
        assert!(
            (a - sector_area).abs() < 0.03 * sector_area,
            "component {k}: area {a} vs {sector_area}"
        );
    }
}
