//! Finite-strain phase-field fracture for crosslinked polymer networks.
//!
//! The crate couples a micromechanical viscoelastic network model (a
//! Wesslau-type chain-stretch distribution multiplying Neo-Hookean free
//! energies, with a set of Maxwell branches for rate dependence) to a
//! phase-field description of diffusive cracks, and solves the coupled
//! displacement/damage problem monolithically with Newton's method on
//! unstructured hexahedral or plane-strain quadrilateral meshes.
//!
//! Module map:
//! - [`chain`] — chain-stretch statistics: distribution densities, the
//!   closed-form cumulative distribution and the survival factor with its
//!   derivatives.
//! - [`constitutive`] — kinematic splits, micromechanical free energies,
//!   Maxwell internal-variable evolution, Kirchhoff stress and spatial
//!   tangent, homogeneous-deformation point drivers.
//! - [`phase_field`] — degradation function, crack surface density,
//!   critical energy release rate, pointwise PDE terms.
//! - [`fem`] — shape functions, assembly, linear solvers, the monolithic
//!   Newton time stepper, and structured mesh generators.
//! - [`identify`] — Nelder–Mead parameter identification against
//!   stress–stretch data.
//! - [`io`] — mesh/config file formats, VTK and CSV emitters.
//! - [`oracle`] — independent numerical checks (adaptive quadrature,
//!   finite differences) used by the `check` subcommand and the test
//!   suites.

pub mod chain;
pub mod constitutive;
pub mod error;
pub mod fem;
pub mod identify;
pub mod io;
pub mod math;
pub mod oracle;
pub mod phase_field;

pub use chain::WesslauParams;
pub use constitutive::{DeformationState, MaterialParams, MaxwellState, StressTangent};
pub use error::{Error, Result};
pub use fem::{MeshModel, SolveConfig, SolveResult, SystemState};
pub use phase_field::{EcMode, FractureParams};
