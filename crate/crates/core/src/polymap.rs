//! Polynomial mappings `Φ_n = Σ α_j ψ_j`, their Jacobian-quality functionals and
//! the mapping file format.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{project, Basis, BasisKind, BallQuadrature, DiskQuadrature, QuadRule};
use crate::boundary::{fibonacci_sphere, Boundary};
use crate::field::{det, VectorField};
use crate::{exec, Error, Result};

pub const MAP_FILE_VERSION: u32 = 1;

/// Quadrature order of the disk nodes in the standard planar grid.
pub const STANDARD_2D_ORDER: usize = 20;
/// Points on the unit circle added to the standard planar grid.
pub const STANDARD_2D_RIM: usize = 128;
/// Ball quadrature order of the standard spatial grid (12 radial shells).
pub const STANDARD_3D_ORDER: usize = 10;
/// Near-rim points added to the standard spatial grid, and their radius.
pub const STANDARD_3D_RIM: usize = 1200;
pub const STANDARD_3D_RIM_RADIUS: f64 = 0.999;

#[derive(Debug, Clone)]
pub struct PolyMap {
    basis: Basis,
    /// Row-major `size x dim`; row `j` is `α_j`.
    coeffs: Vec<f64>,
}

impl PolyMap {
    pub fn new(basis: Basis, coeffs: Vec<f64>) -> Result<Self> {
        let want = basis.size() * basis.dim();
        if coeffs.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                found: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    /// Orthogonal projection of `field` onto `Π_n` with quadrature `rule`.
    pub fn project(field: &dyn VectorField, basis: Basis, rule: &QuadRule) -> Result<Self> {
        let coeffs = project(field, &basis, rule)?;
        Self::new(basis, coeffs)
    }

    /// The identity map expressed in the basis of degree `degree ≥ 1`.
    pub fn identity(dim: usize, degree: usize) -> Result<Self> {
        let basis = Basis::for_dim(dim, degree)?;
        if degree == 0 {
            return Err(Error::invalid("degree", "the identity needs degree at least 1"));
        }
        if dim == 2 {
            // ψ for degree one are 2x/√π and 2y/√π
            let mut coeffs = vec![0.0; basis.size() * 2];
            let c = std::f64::consts::PI.sqrt() / 2.0;
            coeffs[2] = c;
            coeffs[5] = c;
            return Self::new(basis, coeffs);
        }
        let rule = BallQuadrature::new(degree + 1).rule();
        Self::project(&crate::field::Identity(dim), basis, &rule)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(self.basis.clone(), coeffs)
    }

    /// `c Φ`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|a| c * a).collect(),
        }
    }

    /// Jacobian `(DΦ)_{ik} = ∂Φ_i/∂x_k`, row-major.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let (n, d) = (self.basis.size(), self.dim());
        let mut vals = vec![0.0; n];
        let mut grads = vec![0.0; n * d];
        self.basis.eval_grad_all(x, &mut vals, &mut grads);
        jacobian_from(&self.coeffs, &grads, n, d)
    }
}

fn jacobian_from(coeffs: &[f64], grads: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut jac = vec![0.0; d * d];
    for j in 0..n {
        for i in 0..d {
            let a = coeffs[j * d + i];
            for k in 0..d {
                jac[i * d + k] += a * grads[j * d + k];
            }
        }
    }
    jac
}

impl VectorField for PolyMap {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let (n, d) = (self.basis.size(), self.dim());
        let mut vals = vec![0.0; n];
        self.basis.eval_all(x, &mut vals);
        out[..d].iter_mut().for_each(|o| *o = 0.0);
        for j in 0..n {
            for i in 0..d {
                out[i] += vals[j] * self.coeffs[j * d + i];
            }
        }
    }
}

/// Sample points in the closed unit ball at which Jacobians are inspected.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    dim: usize,
    points: Vec<f64>,
}

impl EvalGrid {
    pub fn from_points(dim: usize, points: Vec<f64>) -> Result<Self> {
        if points.len() % dim != 0 {
            return Err(Error::invalid("points", "coordinate count is not a multiple of the dimension"));
        }
        for p in points.chunks(dim) {
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 + 1e-14 {
                return Err(Error::OutsideBall { norm });
            }
        }
        Ok(Self { dim, points })
    }

    /// Nodes of the disk rule of order `p` plus `rim` equispaced points on the circle.
    pub fn disk(p: usize, rim: usize) -> Self {
        let mut points = DiskQuadrature::new(p).rule().points().to_vec();
        for i in 0..rim {
            let t = std::f64::consts::TAU * i as f64 / rim as f64;
            points.extend([t.cos(), t.sin()]);
        }
        Self { dim: 2, points }
    }

    /// Nodes of the ball rule of order `p` plus `rim` Fibonacci points at `radius`.
    pub fn ball(p: usize, rim: usize, radius: f64) -> Self {
        let mut points = BallQuadrature::new(p).rule().points().to_vec();
        for z in fibonacci_sphere(rim) {
            points.extend(z.iter().map(|c| radius * c));
        }
        Self { dim: 3, points }
    }

    pub fn standard_2d() -> Self {
        Self::disk(STANDARD_2D_ORDER, STANDARD_2D_RIM)
    }

    pub fn standard_3d() -> Self {
        Self::ball(STANDARD_3D_ORDER, STANDARD_3D_RIM, STANDARD_3D_RIM_RADIUS)
    }

    pub fn standard(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::standard_2d()),
            3 => Ok(Self::standard_3d()),
            d => Err(Error::invalid("dim", format!("only 2 and 3 are supported, got {d}"))),
        }
    }

    pub fn union(&self, other: &EvalGrid) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Ok(Self { dim: self.dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Basis values and gradients tabulated on a point set, for repeated Jacobian
/// evaluation with changing coefficients.
#[derive(Debug, Clone)]
pub struct BasisTable {
    dim: usize,
    size: usize,
    len: usize,
    vals: Vec<f64>,
    grads: Vec<f64>,
}

impl BasisTable {
    pub fn new(basis: &Basis, points: &[f64]) -> Self {
        let (d, n) = (basis.dim(), basis.size());
        let len = points.len() / d;
        let mut rows = vec![0.0; len * n * (d + 1)];
        exec::fill_rows(&mut rows, n * (d + 1), |i, row| {
            let (v, g) = row.split_at_mut(n);
            basis.eval_grad_all(&points[i * d..(i + 1) * d], v, g);
        });
        let mut vals = Vec::with_capacity(len * n);
        let mut grads = Vec::with_capacity(len * n * d);
        for row in rows.chunks(n * (d + 1)) {
            vals.extend_from_slice(&row[..n]);
            grads.extend_from_slice(&row[n..]);
        }
        Self {
            dim: d,
            size: n,
            len,
            vals,
            grads,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `ψ_j` at point `i`, all `j`.
    pub fn values(&self, i: usize) -> &[f64] {
        &self.vals[i * self.size..(i + 1) * self.size]
    }

    /// `∇ψ_j` at point `i` (`size x dim`, row-major).
    pub fn gradients(&self, i: usize) -> &[f64] {
        let w = self.size * self.dim;
        &self.grads[i * w..(i + 1) * w]
    }

    pub fn eval(&self, i: usize, coeffs: &[f64], out: &mut [f64]) {
        let d = self.dim;
        out[..d].iter_mut().for_each(|o| *o = 0.0);
        for (j, v) in self.values(i).iter().enumerate() {
            for c in 0..d {
                out[c] += v * coeffs[j * d + c];
            }
        }
    }

    pub fn jacobian(&self, i: usize, coeffs: &[f64]) -> Vec<f64> {
        jacobian_from(coeffs, self.gradients(i), self.size, self.dim)
    }

    /// `det DΦ` at every tabulated point.
    pub fn dets(&self, coeffs: &[f64]) -> Vec<f64> {
        exec::map_indices(self.len, |i| det(&self.jacobian(i, coeffs), self.dim))
    }
}

/// Extremes of `|det DΦ|` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaStats {
    /// `max |det| / min |det|`, `+inf` (serialized as `null`) when `min |det| = 0`.
    pub lambda: f64,
    pub det_min: f64,
    pub det_max: f64,
    /// Grid points whose determinant is zero or has the minority sign.
    pub sign_flips: usize,
    pub grid_points: usize,
}

impl LambdaStats {
    pub fn from_dets(dets: &[f64]) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let (mut pos, mut neg) = (0usize, 0usize);
        for &v in dets {
            let a = v.abs();
            lo = lo.min(a);
            hi = hi.max(a);
            if v > 0.0 {
                pos += 1;
            } else if v < 0.0 {
                neg += 1;
            }
        }
        let lambda = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        Self {
            lambda,
            det_min: lo,
            det_max: hi,
            sign_flips: dets.len() - pos.max(neg),
            grid_points: dets.len(),
        }
    }

    /// Whether the determinant keeps one strict sign over the grid.
    pub fn is_orientation_consistent(&self) -> bool {
        self.sign_flips == 0
    }
}

/// Quality summary written by the command line tool.
#[derive(Debug, Clone, Serialize)]
pub struct QualityReport {
    pub lambda: f64,
    pub det_min: f64,
    pub det_max: f64,
    pub sign_flips: usize,
    pub grid_points: usize,
    pub boundary_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
}

impl QualityReport {
    pub fn new(stats: LambdaStats, boundary_error: f64) -> Self {
        Self {
            lambda: stats.lambda,
            det_min: stats.det_min,
            det_max: stats.det_max,
            sign_flips: stats.sign_flips,
            grid_points: stats.grid_points,
            boundary_error,
            m_k: None,
            e1: None,
            e2: None,
            k: None,
            l: None,
        }
    }
}

/// `Λ(Φ) = max |det DΦ| / min |det DΦ|` over `grid`.
pub fn lambda_ratio(map: &PolyMap, grid: &EvalGrid) -> Result<LambdaStats> {
    if grid.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: grid.dim(),
        });
    }
    if grid.is_empty() {
        return Err(Error::invalid("grid", "evaluation grid is empty"));
    }
    let d = map.dim();
    let dets = exec::map_indices(grid.len(), |i| det(&map.jacobian(grid.point(i)), d));
    Ok(LambdaStats::from_dets(&dets))
}

/// Lambda statistics of the finite-difference Jacobian of any field.
pub fn lambda_ratio_fd(field: &dyn VectorField, grid: &EvalGrid) -> LambdaStats {
    let d = field.dim();
    let dets = exec::map_indices(grid.len(), |i| {
        det(&crate::field::fd_jacobian(field, grid.point(i), crate::field::FD_STEP), d)
    });
    LambdaStats::from_dets(&dets)
}

/// Equispaced (2D) or Fibonacci (3D) points on the unit sphere.
pub fn boundary_samples(dim: usize, samples: usize) -> Vec<f64> {
    match dim {
        2 => (0..samples)
            .flat_map(|i| {
                let t = std::f64::consts::TAU * i as f64 / samples as f64;
                [t.cos(), t.sin()]
            })
            .collect(),
        _ => fibonacci_sphere(samples).into_iter().flatten().collect(),
    }
}

/// `max |Φ(z) − φ(z)|` over `samples` points of the unit sphere.
pub fn boundary_error(map: &dyn VectorField, b: &Boundary, samples: usize) -> Result<f64> {
    if samples < 16 {
        return Err(Error::invalid("samples", format!("need at least 16 samples, got {samples}")));
    }
    let d = map.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    let pts = boundary_samples(d, samples);
    let errs = exec::map_indices(samples, |i| {
        let z = &pts[i * d..(i + 1) * d];
        let v = map.eval(z);
        let mut w = vec![0.0; d];
        b.eval_point(z, &mut w);
        v.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    });
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Error)]
pub enum MapFileError {
    #[error("malformed mapping file: {0}")]
    Malformed(String),
    #[error("mapping file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u32 },
    #[error("unsupported basis `{0}`")]
    UnsupportedBasis(String),
    #[error("basis `{basis}` describes {expected_dim}-dimensional maps, file says dim = {found_dim}")]
    DimensionMismatch {
        basis: String,
        expected_dim: usize,
        found_dim: usize,
    },
    #[error("expected {expected} coefficients for this basis, found {found}")]
    SizeMismatch { expected: usize, found: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    version: u64,
    dim: usize,
    degree: usize,
    basis: String,
    coeffs: Vec<f64>,
}

/// serde_json formatter printing every float with 17 significant digits.
pub struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize `value` as JSON with full-precision floats.
pub fn to_json_full_precision<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value
        .serialize(&mut ser)
        .map_err(|e| MapFileError::Malformed(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn map_to_json(map: &PolyMap) -> Result<String> {
    to_json_full_precision(&MapFile {
        version: MAP_FILE_VERSION as u64,
        dim: map.dim(),
        degree: map.degree(),
        basis: map.basis().tag().to_string(),
        coeffs: map.coeffs().to_vec(),
    })
}

pub fn map_from_json(text: &str) -> Result<PolyMap> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| MapFileError::Malformed(e.to_string()))?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == MAP_FILE_VERSION as u64 => {}
        Some(v) => {
            return Err(MapFileError::VersionMismatch {
                found: v,
                expected: MAP_FILE_VERSION,
            }
            .into())
        }
        None => return Err(MapFileError::Malformed("missing integer field `version`".into()).into()),
    }
    let file: MapFile = serde_json::from_value(value).map_err(|e| MapFileError::Malformed(e.to_string()))?;
    let kind: BasisKind = file.basis.parse().map_err(MapFileError::UnsupportedBasis)?;
    if kind.dim() != file.dim {
        return Err(MapFileError::DimensionMismatch {
            basis: file.basis,
            expected_dim: kind.dim(),
            found_dim: file.dim,
        }
        .into());
    }
    let basis = Basis::new(kind, file.degree);
    let expected = basis.size() * basis.dim();
    if file.coeffs.len() != expected {
        return Err(MapFileError::SizeMismatch {
            expected,
            found: file.coeffs.len(),
        }
        .into());
    }
    PolyMap::new(basis, file.coeffs)
}

pub fn save_map(map: &PolyMap, path: impl AsRef<Path>) -> Result<()> {
    let mut text = map_to_json(map)?;
    text.push('\n');
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn load_map(path: impl AsRef<Path>) -> Result<PolyMap> {
    map_from_json(&fs::read_to_string(path)?)
}
