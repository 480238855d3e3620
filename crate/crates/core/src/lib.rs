//! Dirichlet eigenvalues of the p-Laplacian on the unit disk and related
//! domains.
//!
//! The crate combines three solver families:
//!
//! * [`radial`] — the radial spectrum `{gamma_n}` on the unit ball in any
//!   dimension, by shooting on the singular radial ODE;
//! * [`eigensolver`] — the first Dirichlet eigenvalue on meshed planar
//!   domains (disk, sectors, annuli, eccentric annuli) by Rayleigh-quotient
//!   minimization over P1 finite elements;
//! * [`reflect`] — sector eigenfunctions extended to the whole disk by
//!   iterated odd reflection, with nodal-domain counting and a weak-form
//!   residual check.
//!
//! Together these certify the ordering `tau_1 < gamma_2`: the first sector
//! eigenvalue `tau_1` upper-bounds the second Dirichlet eigenvalue of the
//! disk, so a verified gap against the second radial eigenvalue `gamma_2`
//! shows the second eigenfunctions cannot be radial.

pub mod domain;
pub mod eigensolver;
pub mod error;
pub mod fem;
mod linalg;
pub mod mesh;
pub mod radial;
pub mod reflect;

pub use domain::{scale_eigenvalue, DomainSpec, EigenField, EigenPair, SolverConfig, P_MAX, P_MIN};
pub use eigensolver::{
    certify_nonradial, first_eigenpair, lambda1_extrapolated, obstacle_sweep, sector_eigenvalue,
    Certificate, ConvergenceTrace, ExtrapolatedEigenvalue, SweepPoint, Verdict,
};
pub use error::{Error, Result};
pub use fem::{energy, grad_energy, grad_mass, mass, rayleigh, ScalarField};
pub use mesh::{build_mesh, TriMesh};
pub use radial::{integrate_radial, nodal_radius, radial_eigenvalue, RadialSolution};
pub use reflect::{count_nodal_domains, reflect_odd, reflection_plan, weak_residual, ReflectionPlan};
