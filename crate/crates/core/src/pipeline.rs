//! Initial maps: build an extension of the boundary and project it onto `Π_n`.

use crate::basis::{Basis, BallQuadrature, DiskQuadrature, QuadRule};
use crate::boundary::Boundary;
use crate::extend::{harmonic_extend_2d, IntegralMap2D, IntegralMap3D, RadialMap3D, SmoothBlendMap};
use crate::field::VectorField;
use crate::polymap::PolyMap;
use crate::{Error, Result};

/// How the initial extension `Φ̃` is constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialMethod {
    /// Fourier truncation at the map degree with `nodes` trapezoid points (2D).
    Harmonic { nodes: usize },
    Blend { kappa: f64, omega: f64 },
    BlendCore { kappa: f64, delta: f64 },
    /// Chord interpolation; `nodes` azimuths, plus `polar_nodes` in 3D.
    Integral { nodes: usize, polar_nodes: usize },
    /// `ρ̂(x̂) x` (3D).
    Radial,
}

impl InitialMethod {
    pub fn name(&self) -> &'static str {
        match self {
            InitialMethod::Harmonic { .. } => "harmonic",
            InitialMethod::Blend { .. } => "blend",
            InitialMethod::BlendCore { .. } => "blend-core",
            InitialMethod::Integral { .. } => "integral",
            InitialMethod::Radial => "radial3d",
        }
    }
}

/// Projection order used when none is given: `max(30, 2n+4)` on the disk and
/// `n+8` on the ball.
pub fn default_projection_order(dim: usize, n: usize) -> usize {
    if dim == 2 {
        30.max(2 * n + 4)
    } else {
        n + 8
    }
}

pub fn projection_rule(dim: usize, p: usize) -> Result<QuadRule> {
    match dim {
        2 => Ok(DiskQuadrature::new(p).rule()),
        3 => Ok(BallQuadrature::new(p).rule()),
        d => Err(Error::invalid("dim", format!("only 2 and 3 are supported, got {d}"))),
    }
}

/// The extension `Φ̃` of `boundary` for `method`; `n` is the map degree.
pub fn initial_field(boundary: &Boundary, method: &InitialMethod, n: usize) -> Result<Box<dyn VectorField>> {
    let field: Box<dyn VectorField> = match (method, boundary) {
        (InitialMethod::Harmonic { nodes }, Boundary::Planar(b)) => Box::new(harmonic_extend_2d(b, n, *nodes)?),
        (InitialMethod::Blend { kappa, omega }, b) => Box::new(SmoothBlendMap::new(b.clone(), *kappa, *omega)?),
        (InitialMethod::BlendCore { kappa, delta }, b) => {
            Box::new(SmoothBlendMap::with_core(b.clone(), *kappa, *delta)?)
        }
        (InitialMethod::Integral { nodes, .. }, Boundary::Planar(b)) => Box::new(IntegralMap2D::new(b.clone(), *nodes)?),
        (InitialMethod::Integral { nodes, polar_nodes }, Boundary::Spatial(b)) => {
            Box::new(IntegralMap3D::new(b.clone(), *nodes, *polar_nodes)?)
        }
        (InitialMethod::Radial, Boundary::Spatial(b)) => Box::new(RadialMap3D::new(b.clone())),
        (m, b) => {
            return Err(Error::invalid(
                "method",
                format!("`{}` is not available for {}-dimensional boundaries", m.name(), b.dim()),
            ))
        }
    };
    Ok(field)
}

/// Project the extension chosen by `method` onto polynomials of degree `n`
/// using a quadrature of order `p` (default [`default_projection_order`]).
pub fn build_polymap(boundary: &Boundary, method: &InitialMethod, n: usize, p: Option<usize>) -> Result<PolyMap> {
    let dim = boundary.dim();
    let field = initial_field(boundary, method, n)?;
    let rule = projection_rule(dim, p.unwrap_or_else(|| default_projection_order(dim, n)))?;
    PolyMap::project(&field, Basis::for_dim(dim, n)?, &rule)
}
