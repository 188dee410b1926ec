//! Discontinuous Galerkin isogeometric analysis (DG-IGA) for second-order
//! elliptic diffusion problems on multipatch B-spline domains whose patches
//! may overlap along non-matching interfaces.
//!
//! The crate is organized bottom-up:
//!
//! - [`bspline`]: univariate and tensor-product B-spline bases (Cox–de Boor
//!   evaluation, derivatives, uniform refinement),
//! - [`quadrature`]: Gauss–Legendre rules on parametric elements and faces,
//! - [`geometry`]: patches, multipatch topology, overlap construction and the
//!   cross-overlap point pairing,
//! - [`assembly`]: the DG stiffness matrix and load vector (volume terms,
//!   Nitsche boundary terms, interface fluxes),
//! - [`solver`]: sparse solve and evaluation of the discrete solution,
//! - [`analysis`]: DG-norm errors and convergence rates,
//! - [`harness`]: built-in manufactured-solution examples, the refinement
//!   driver and CSV/SVG output.

pub mod analysis;
pub mod assembly;
pub mod bspline;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod util;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
