//! Continuously differentiable mappings from the closed unit disk or ball onto a
//! target region, built as extensions of a boundary parametrization and then
//! improved by minimizing Jacobian-quality objectives.
//!
//! The pieces fit together as follows:
//!
//! * [`boundary`] holds the boundary parametrizations `φ` (star-like radial
//!   families, ovals of Cassini, parametric trigonometric curves, star-like
//!   surfaces).
//! * [`extend`] builds initial extensions `Φ̃` of `φ` into the ball: harmonic
//!   extension, smooth radial blends, the chord-interpolation integral operator
//!   and the radial 3D map.
//! * [`basis`] provides orthonormal polynomial bases on the disk and ball and the
//!   quadrature rules used to project onto them.
//! * [`polymap`] is the polynomial mapping artifact `Φ_n = Σ α_j ψ_j` together with
//!   its quality functionals and file format.
//! * [`optimize`] reduces the boundary-interpolation constraints with an SVD and
//!   minimizes the Jacobian ratio or the particle energy over the free
//!   coefficients.
//! * [`quality`] computes the difference-quotient injectivity diagnostics for 3D
//!   maps.

pub mod basis;
pub mod boundary;
pub mod error;
pub mod exec;
pub mod extend;
pub mod field;
pub mod optimize;
pub mod pipeline;
pub mod polymap;
pub mod quality;

pub use error::{Error, Result};
