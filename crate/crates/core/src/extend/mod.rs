//! Initial extensions `Φ̃` of a boundary map into the disk or ball.

mod blend;
mod harmonic;
mod integral;
mod radial;

pub use blend::{blend_t, SmoothBlendMap};
pub use harmonic::{harmonic_extend_2d, HarmonicMap2D};
pub use integral::{
    chord_frame, integral_extend_2d, integral_extend_3d, kernel_pair, min_fd_det, ChordFrame, IntegralMap2D,
    IntegralMap3D, DEFAULT_OMEGA_NODES, DEFAULT_THETA_NODES, RIM_GUARD,
};
pub use radial::{radial_extend_3d, RadialMap3D};
