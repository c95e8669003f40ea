//! Improvement of polynomial maps under boundary interpolation conditions.
//!
//! The conditions `A α = φ` are eliminated with an SVD of `A`, leaving an
//! unconstrained problem in the free coordinates `δ`.

pub mod constraints;
pub mod improve;
pub mod minimize;
pub mod objective;
pub mod reduce;

pub use constraints::{
    build_constraints_2d, build_constraints_3d, extremal_points, parse_points, read_points, write_points,
    ConstraintSet,
};
pub use improve::{improve, improve_reduced, ImproveResult, ObjectiveSpec, Schedule, StageRecord};
pub use minimize::{minimize, Budget, Method, MinimizeResult};
pub use objective::{
    energy_direct, lattice_points, EnergyConfig, EnergyObjective, LambdaObjective, Objective,
};
pub use reduce::ReducedParametrization;
