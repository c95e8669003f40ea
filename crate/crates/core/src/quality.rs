//! Difference-quotient diagnostics for spatial maps.
//!
//! `m_K(φ) = min ‖φ(x) − φ(y)‖ / ‖x − y‖` over distinct points of a sphere grid,
//! `E₁ = min ‖Φ(x) − Φ(y)‖ / ‖x − y‖ / m_K` over distinct points of a cubic ball
//! grid, and `E₂ = min ‖Φ(x) − φ(y)‖ / ‖x − y‖ / m_K` with `x` in the ball grid
//! and `y` in the sphere grid. Small `E₁` hints at a fold, small `E₂` at an
//! image leaving the region.

use serde::Serialize;

use crate::boundary::BoundaryMap3D;
use crate::field::VectorField;
use crate::{exec, Error, Result};

/// Grid resolutions used unless configured.
pub const DEFAULT_K: usize = 40;
pub const DEFAULT_L: usize = 10;
/// Points closer than this are the same point.
pub const SAME_POINT: f64 = 1e-12;
/// Ratios below this mean the map collapses two grid points.
pub const DEGENERATE_RATIO: f64 = 1e-14;

/// `(sin(πj/K) cos(πi/K), sin(πj/K) sin(πi/K), cos(πj/K))`, `j = 0..=K`,
/// `i = 0..2K`, with coincident points (the poles) kept once.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    k: usize,
    points: Vec<[f64; 3]>,
}

impl SphereGrid {
    pub fn new(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("K", "must be at least 1"));
        }
        let h = std::f64::consts::PI / k as f64;
        let mut points: Vec<[f64; 3]> = Vec::with_capacity(2 * k * (k + 1));
        for j in 0..=k {
            let (sj, cj) = (h * j as f64).sin_cos();
            for i in 0..2 * k {
                let (si, ci) = (h * i as f64).sin_cos();
                let p = [sj * ci, sj * si, cj];
                if !points.iter().any(|q| dist(q, &p) < SAME_POINT) {
                    points.push(p);
                }
            }
        }
        Ok(Self { k, points })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(i, j, k)/L` with `i² + j² + k² ≤ L²`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct CubeBallGrid {
    l: usize,
    points: Vec<[f64; 3]>,
}

impl CubeBallGrid {
    pub fn new(l: usize) -> Result<Self> {
        if l < 1 {
            return Err(Error::invalid("L", "must be at least 1"));
        }
        let li = l as i64;
        let mut points = Vec::new();
        for i in -li..=li {
            for j in -li..=li {
                for k in -li..=li {
                    if i * i + j * j + k * k <= li * li {
                        let s = l as f64;
                        points.push([i as f64 / s, j as f64 / s, k as f64 / s]);
                    }
                }
            }
        }
        Ok(Self { l, points })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Minimum of `‖f_i − g_j‖ / ‖x_i − y_j‖` over pairs with `‖x_i − y_j‖ ≥ SAME_POINT`.
/// With `upper` only pairs `j > i` are scanned (both sets equal).
fn min_ratio(xs: &[[f64; 3]], fx: &[[f64; 3]], ys: &[[f64; 3]], fy: &[[f64; 3]], upper: bool) -> f64 {
    exec::min_over(xs.len(), |i| {
        let start = if upper { i + 1 } else { 0 };
        let mut best = f64::INFINITY;
        for j in start..ys.len() {
            let d = dist(&xs[i], &ys[j]);
            if d >= SAME_POINT {
                best = best.min(dist(&fx[i], &fy[j]) / d);
            }
        }
        best
    })
}

fn images(f: &dyn VectorField, pts: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
    if f.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: f.dim(),
        });
    }
    Ok(exec::map_indices(pts.len(), |i| {
        let mut o = [0.0; 3];
        f.eval_into(&pts[i], &mut o);
        o
    }))
}

/// `m_K`, with a flag raised when the boundary collapses two grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryModulus {
    pub value: f64,
    pub degenerate: bool,
}

pub fn boundary_modulus(b: &BoundaryMap3D, g: &SphereGrid) -> Result<BoundaryModulus> {
    if g.len() < 2 {
        return Err(Error::invalid("K", "sphere grid needs at least two points"));
    }
    let fx: Vec<[f64; 3]> = exec::map_indices(g.len(), |i| b.eval(&g.points[i]));
    let v = min_ratio(&g.points, &fx, &g.points, &fx, true);
    Ok(if v < DEGENERATE_RATIO {
        BoundaryModulus {
            value: 0.0,
            degenerate: true,
        }
    } else {
        BoundaryModulus {
            value: v,
            degenerate: false,
        }
    })
}

fn check_mk(mk: f64) -> Result<()> {
    if !(mk > 0.0 && mk.is_finite()) {
        return Err(Error::invalid("m_K", format!("must be positive, got {mk}")));
    }
    Ok(())
}

/// `E_{1,K}`.
pub fn injectivity_measure(map: &dyn VectorField, g: &CubeBallGrid, mk: f64) -> Result<f64> {
    check_mk(mk)?;
    let fx = images(map, &g.points)?;
    Ok(min_ratio(&g.points, &fx, &g.points, &fx, true) / mk)
}

/// `E_{2,K,L}`.
pub fn into_measure(
    map: &dyn VectorField,
    b: &BoundaryMap3D,
    gb: &CubeBallGrid,
    gs: &SphereGrid,
    mk: f64,
) -> Result<f64> {
    check_mk(mk)?;
    let fx = images(map, &gb.points)?;
    let fy: Vec<[f64; 3]> = exec::map_indices(gs.len(), |i| b.eval(&gs.points[i]));
    Ok(min_ratio(&gb.points, &fx, &gs.points, &fy, false) / mk)
}

/// All three measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityMeasures {
    pub m_k: f64,
    pub degenerate_boundary: bool,
    pub e1: f64,
    pub e2: f64,
    pub k: usize,
    pub l: usize,
}

pub fn stability_measures(map: &dyn VectorField, b: &BoundaryMap3D, k: usize, l: usize) -> Result<StabilityMeasures> {
    let gs = SphereGrid::new(k)?;
    let gb = CubeBallGrid::new(l)?;
    let mk = boundary_modulus(b, &gs)?;
    if mk.degenerate {
        return Err(Error::invalid("boundary", "boundary map collapses two grid points (m_K = 0)"));
    }
    Ok(StabilityMeasures {
        m_k: mk.value,
        degenerate_boundary: mk.degenerate,
        e1: injectivity_measure(map, &gb, mk.value)?,
        e2: into_measure(map, b, &gb, &gs, mk.value)?,
        k,
        l,
    })
}
