//! Shared domain descriptors, eigenpair records and solver configuration.
//!
//! Every solver in this crate works on one of the domains below, all
//! normalized so that the outer boundary is the unit circle/sphere.
//! Eigenvalues on rescaled copies follow from [`scale_eigenvalue`].
//!
//! All types here are plain immutable values: construct, then share freely
//! across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::ScalarField;
use crate::radial::RadialSolution;

/// Smallest exponent `p` the floating-point solvers support.
///
/// The eigenvalue problem is defined for every p > 1, but the gradient of
/// the energy degenerates as p -> 1 and overflows quickly for large p, so
/// the toolkit restricts itself to a band where double precision holds up.
pub const P_MIN: f64 = 1.1;
/// Largest supported exponent `p`.
pub const P_MAX: f64 = 10.0;

/// Symbolic description of a computational domain.
///
/// Geometry is always relative to the unit disk/ball `B1` centred at the
/// origin: sectors have outer radius 1, the eccentric annulus is `B1` minus
/// a disk of radius `obstacle_radius` centred at `(offset, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Ball of dimension `dim` with the given radius. Only `dim = 2` is
    /// meshable; other dimensions are served by the radial solver.
    Ball { dim: u32, radius: f64 },
    /// Concentric annulus `inner < |x| < outer` in the plane.
    Annulus { inner: f64, outer: f64 },
    /// Circular sector of the unit disk, `angle_lo < theta < angle_hi`.
    Sector { angle_lo: f64, angle_hi: f64 },
    /// Unit disk minus the closed disk of radius `obstacle_radius` centred
    /// at `(offset, 0)`.
    EccentricAnnulus { obstacle_radius: f64, offset: f64 },
    /// Upper half of the unit disk (dimension 2).
    HalfBall,
}

impl DomainSpec {
    /// Ball of dimension `dim >= 1` and positive radius.
    pub fn ball(dim: u32, radius: f64) -> Result<Self> {
        let spec = DomainSpec::Ball { dim, radius };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit ball of dimension `dim`.
    pub fn unit_ball(dim: u32) -> Self {
        DomainSpec::Ball { dim, radius: 1.0 }
    }

    /// Annulus with `0 < inner < outer`.
    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        let spec = DomainSpec::Annulus { inner, outer };
        spec.validate()?;
        Ok(spec)
    }

    /// Sector with `0 <= angle_lo < angle_hi <= 2*pi`.
    pub fn sector(angle_lo: f64, angle_hi: f64) -> Result<Self> {
        let spec = DomainSpec::Sector { angle_lo, angle_hi };
        spec.validate()?;
        Ok(spec)
    }

    /// Eccentric annulus with obstacle strictly inside the unit disk.
    pub fn eccentric_annulus(obstacle_radius: f64, offset: f64) -> Result<Self> {
        let spec = DomainSpec::EccentricAnnulus {
            obstacle_radius,
            offset,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the per-variant parameter invariants.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::Ball { dim, radius } => {
                if dim < 1 {
                    return Err(Error::InvalidDomain("ball dimension must be >= 1".into()));
                }
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidDomain(format!(
                        "ball radius must be positive and finite, got {radius}"
                    )));
                }
            }
            DomainSpec::Annulus { inner, outer } => {
                if !(0.0 < inner && inner < outer) || !outer.is_finite() {
                    return Err(Error::InvalidDomain(format!(
                        "annulus requires 0 < inner < outer, got inner={inner}, outer={outer}"
                    )));
                }
            }
            DomainSpec::Sector { angle_lo, angle_hi } => {
                let two_pi = 2.0 * std::f64::consts::PI;
                if !(0.0 <= angle_lo && angle_lo < angle_hi && angle_hi <= two_pi) {
                    return Err(Error::InvalidDomain(format!(
                        "sector requires 0 <= angle_lo < angle_hi <= 2*pi, got [{angle_lo}, {angle_hi}]"
                    )));
                }
            }
            DomainSpec::EccentricAnnulus {
                obstacle_radius,
                offset,
            } => {
                if !(obstacle_radius > 0.0) {
                    return Err(Error::InvalidDomain(format!(
                        "obstacle radius must be positive, got {obstacle_radius}"
                    )));
                }
                if !(offset >= 0.0) {
                    return Err(Error::InvalidDomain(format!(
                        "obstacle offset must be nonnegative, got {offset}"
                    )));
                }
                if !(offset + obstacle_radius < 1.0) {
                    return Err(Error::InvalidDomain(format!(
                        "obstacle must lie strictly inside the unit disk: offset + radius = {} >= 1",
                        offset + obstacle_radius
                    )));
                }
            }
            DomainSpec::HalfBall => {}
        }
        Ok(())
    }

    /// Parses a domain from its JSON form (snake_case keys, `type` tag) and
    /// validates the parameters.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Exact area of the 2-D domain, if it has one.
    pub fn area(&self) -> Option<f64> {
        use std::f64::consts::PI;
        match *self {
            DomainSpec::Ball { dim: 2, radius } => Some(PI * radius * radius),
            DomainSpec::Ball { .. } => None,
            DomainSpec::Annulus { inner, outer } => Some(PI * (outer * outer - inner * inner)),
            DomainSpec::Sector { angle_lo, angle_hi } => Some(0.5 * (angle_hi - angle_lo)),
            DomainSpec::EccentricAnnulus {
                obstacle_radius, ..
            } => Some(PI * (1.0 - obstacle_radius * obstacle_radius)),
            DomainSpec::HalfBall => Some(0.5 * PI),
        }
    }
}

/// Configuration shared by the iterative solvers.
///
/// The `seed` makes every run bit-reproducible: identical configs produce
/// identical iterates, meshes and output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Exponent of the p-Laplacian; must lie in `[P_MIN, P_MAX]`.
    pub p: f64,
    /// Relative tolerance on the eigenvalue (Rayleigh-quotient change).
    pub tol_eig: f64,
    /// Tolerance on the normalized stationarity residual.
    pub tol_grad: f64,
    /// Iteration budget for a single solve.
    pub max_iter: usize,
    /// Target mesh edge length for FEM solves.
    pub mesh_h: f64,
    /// Seed for the deterministic symmetry-breaking perturbation.
    pub seed: u64,
    /// Final gradient regularization for p < 2 (`eps` in the weighted
    /// gradient); ignored for p >= 2.
    pub regularization_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 2.0,
            tol_eig: 1e-8,
            tol_grad: 1e-6,
            max_iter: 20_000,
            mesh_h: 0.1,
            seed: 0,
            regularization_eps: 1e-8,
        }
    }
}

impl SolverConfig {
    /// Returns a default config with the given exponent.
    pub fn with_p(p: f64) -> Self {
        SolverConfig {
            p,
            ..SolverConfig::default()
        }
    }

    /// Checks the parameter invariants (supported p band, positive tolerances).
    pub fn validate(&self) -> Result<()> {
        if !(P_MIN..=P_MAX).contains(&self.p) {
            return Err(Error::InvalidConfig(format!(
                "exponent p = {} outside the supported range [{P_MIN}, {P_MAX}]",
                self.p
            )));
        }
        for (name, v) in [
            ("tol_eig", self.tol_eig),
            ("tol_grad", self.tol_grad),
            ("mesh_h", self.mesh_h),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.regularization_eps >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "regularization_eps must be >= 0, got {}",
                self.regularization_eps
            )));
        }
        Ok(())
    }

    /// Parses a config from JSON (snake_case keys, missing fields defaulted).
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SolverConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Eigenfunction payload of an [`EigenPair`]: a sampled radial trajectory or
/// a finite-element field.
#[derive(Debug, Clone)]
pub enum EigenField {
    Radial(RadialSolution),
    Mesh(ScalarField),
}

/// An eigenvalue estimate together with its eigenfunction and convergence
/// diagnostics.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Eigenvalue estimate; positive for every Dirichlet domain handled here.
    pub lambda: f64,
    /// The eigenfunction (radial trajectory or FEM field).
    pub field: EigenField,
    /// Iterations spent by the solver that produced the pair.
    pub iterations: usize,
    /// Final stationarity/endpoint residual, in the producing solver's metric.
    pub residual: f64,
    /// Whether the solver met its tolerances. `converged` implies
    /// `residual <= tol_grad` for FEM pairs (bracket tolerance for radial).
    pub converged: bool,
}

impl EigenPair {
    /// The FEM field, if this pair came from a mesh solve.
    pub fn mesh_field(&self) -> Option<&ScalarField> {
        match &self.field {
            EigenField::Mesh(f) => Some(f),
            EigenField::Radial(_) => None,
        }
    }

    /// The radial trajectory, if this pair came from the shooting solver.
    pub fn radial_solution(&self) -> Option<&RadialSolution> {
        match &self.field {
            EigenField::Radial(s) => Some(s),
            EigenField::Mesh(_) => None,
        }
    }
}

/// Transplants an eigenvalue to a rescaled domain: `lambda(s*Omega) =
/// s^{-p} * lambda(Omega)`.
///
/// Both the energy and the mass functional are p-homogeneous, so dilating a
/// domain by `s` scales every Dirichlet eigenvalue by `s^{-p}`.
pub fn scale_eigenvalue(lambda: f64, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidDomain(format!(
            "scale factor must be positive and finite, got {s}"
        )));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidConfig(format!("exponent p must exceed 1, got {p}")));
    }
    Ok(lambda * s.powf(-p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scale_identity() {
        assert_eq!(scale_eigenvalue(5.783186, 1.0, 2.0).unwrap(), 5.783186);
    }

    #[test]
    fn scale_halving_at_p2() {
        // lambda1(B_{1/2}) = 4 * lambda1(B_1) for p = 2.
        let scaled = scale_eigenvalue(5.783186, 0.5, 2.0).unwrap();
        assert!((scaled - 23.132744).abs() < 1e-9, "got {scaled}");
    }

    #[test]
    fn scale_cubic() {
        let scaled = scale_eigenvalue(10.0, 2.0, 3.0).unwrap();
        assert!((scaled - 1.25).abs() < 1e-15);
    }

    #[test]
    fn scale_rejects_nonpositive_s() {
        assert!(scale_eigenvalue(1.0, 0.0, 2.0).is_err());
        assert!(scale_eigenvalue(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn scale_roundtrip_grid() {
        for &s in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            for &p in &[1.5, 2.0, 3.0, 5.0] {
                let lambda = 7.25;
                let back =
                    scale_eigenvalue(scale_eigenvalue(lambda, s, p).unwrap(), 1.0 / s, p).unwrap();
                assert!(
                    (back - lambda).abs() <= 1e-12 * lambda,
                    "p={p} s={s} back={back}"
                );
            }
        }
    }

    #[test]
    fn constructors_reject_invalid_parameters() {
        assert!(DomainSpec::ball(0, 1.0).is_err());
        assert!(DomainSpec::ball(2, 0.0).is_err());
        assert!(DomainSpec::ball(2, f64::NAN).is_err());
        assert!(DomainSpec::annulus(0.0, 1.0).is_err());
        assert!(DomainSpec::annulus(0.7, 0.5).is_err());
        assert!(DomainSpec::sector(1.0, 0.5).is_err());
        assert!(DomainSpec::sector(-0.1, 1.0).is_err());
        assert!(DomainSpec::sector(0.0, 7.0).is_err());
        assert!(DomainSpec::eccentric_annulus(0.0, 0.2).is_err());
        assert!(DomainSpec::eccentric_annulus(0.3, -0.1).is_err());
        assert!(DomainSpec::eccentric_annulus(0.5, 0.5).is_err());
        assert!(DomainSpec::eccentric_annulus(0.3, 0.6).is_ok());
    }

    #[test]
    fn domain_json_snake_case() {
        let spec = DomainSpec::eccentric_annulus(0.3, 0.2).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"eccentric_annulus\""), "{text}");
        assert!(text.contains("\"obstacle_radius\""), "{text}");
        let back = DomainSpec::from_json(&text).unwrap();
        assert_eq!(back, spec);

        let ball = DomainSpec::from_json(r#"{"type":"ball","dim":2,"radius":1.0}"#).unwrap();
        assert_eq!(ball, DomainSpec::unit_ball(2));
    }

    #[test]
    fn domain_json_rejects_invalid() {
        assert!(DomainSpec::from_json(r#"{"type":"annulus","inner":0.9,"outer":0.3}"#).is_err());
        assert!(DomainSpec::from_json(r#"{"type":"cube","side":1.0}"#).is_err());
    }

    #[test]
    fn config_json_defaults_and_validation() {
        let cfg = SolverConfig::from_json(r#"{"p": 3.0, "mesh_h": 0.05}"#).unwrap();
        assert_eq!(cfg.p, 3.0);
        assert_eq!(cfg.mesh_h, 0.05);
        assert_eq!(cfg.tol_eig, SolverConfig::default().tol_eig);
        assert!(SolverConfig::from_json(r#"{"p": 1.0}"#).is_err());
        assert!(SolverConfig::from_json(r#"{"p": 12.0}"#).is_err());
        assert!(SolverConfig::from_json(r#"{"mesh_h": -0.1}"#).is_err());
    }

    proptest! {
        #[test]
        fn scale_roundtrip_prop(lambda in 1e-3..1e3f64, s in 0.1..10.0f64, p in 1.1..10.0f64) {
            let back = scale_eigenvalue(scale_eigenvalue(lambda, s, p).unwrap(), 1.0 / s, p).unwrap();
            prop_assert!((back - lambda).abs() <= 1e-10 * lambda.abs());
        }

        #[test]
        fn annulus_constructor_total(inner in -1.0..2.0f64, outer in -1.0..2.0f64) {
            let ok = DomainSpec::annulus(inner, outer).is_ok();
            prop_assert_eq!(ok, 0.0 < inner && inner < outer);
        }
    }
}
