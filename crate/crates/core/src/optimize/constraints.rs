//! Boundary interpolation conditions `Φ_n(z_j) = φ(z_j)`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::basis::Basis;
use crate::boundary::{fibonacci_sphere, Boundary};
use crate::field::VectorField;
use crate::{Error, Result};

/// `σ_min / σ_max` below this makes the interpolation matrix rank deficient.
pub const RANK_TOL: f64 = 1e-10;
/// Smallest singular value accepted for a spatial interpolation point set.
pub const MIN_SIGMA_3D: f64 = 0.5;
/// Tolerance on `|z| = 1` for points read from a file.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// Interpolation points, targets and the matrix `A[j][i] = ψ_i(z_j)`.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    dim: usize,
    /// `q x dim`, row-major.
    points: Vec<f64>,
    /// `φ(z_j)`, `q x dim`, row-major.
    targets: Vec<f64>,
    matrix: DMatrix<f64>,
    singular_values: Vec<f64>,
    basis: Basis,
}

impl ConstraintSet {
    fn assemble(b: &Boundary, basis: &Basis, points: Vec<f64>, context: String) -> Result<Self> {
        let d = basis.dim();
        if b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            });
        }
        let q = points.len() / d;
        let n = basis.size();
        if q == 0 || q > n {
            return Err(Error::invalid(
                "constraints",
                format!("need between 1 and {n} interpolation points, got {q}"),
            ));
        }
        let mut matrix = DMatrix::zeros(q, n);
        let mut targets = vec![0.0; q * d];
        let mut row = vec![0.0; n];
        for j in 0..q {
            let z = &points[j * d..(j + 1) * d];
            basis.eval_all(z, &mut row);
            for i in 0..n {
                matrix[(j, i)] = row[i];
            }
            b.eval_point(z, &mut targets[j * d..(j + 1) * d]);
        }
        let singular_values = sorted_singular_values(&matrix);
        let (smax, smin) = (singular_values[0], singular_values[q - 1]);
        if !(smin >= RANK_TOL * smax) {
            return Err(Error::RankDeficient {
                context,
                sigma_min: smin,
                sigma_max: smax,
            });
        }
        Ok(Self {
            dim: d,
            points,
            targets,
            matrix,
            singular_values,
            basis: basis.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of interpolation points `q`.
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Singular values of `A`, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn sigma_min(&self) -> f64 {
        *self.singular_values.last().unwrap()
    }

    /// `max_j |Φ(z_j) − φ(z_j)|`.
    pub fn residual(&self, map: &dyn VectorField) -> f64 {
        let d = self.dim;
        let mut v = vec![0.0; d];
        (0..self.len())
            .map(|j| {
                map.eval_into(self.point(j), &mut v);
                let t = &self.targets[j * d..(j + 1) * d];
                v.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn sorted_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `q` equispaced points `z_j = (cos 2πj/q, sin 2πj/q)` on the unit circle.
pub fn build_constraints_2d(b: &Boundary, basis: &Basis, q: usize) -> Result<ConstraintSet> {
    if basis.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: basis.dim(),
        });
    }
    let n = basis.degree();
    if q == 0 || q > 2 * n + 1 {
        return Err(Error::invalid(
            "q_n",
            format!("must lie in 1..={} for degree {n}, got {q}", 2 * n + 1),
        ));
    }
    let points = (0..q)
        .flat_map(|j| {
            let t = std::f64::consts::TAU * j as f64 / q as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    ConstraintSet::assemble(b, basis, points, format!("{q} equispaced points, degree {n}"))
}

/// Interpolation at a unisolvent set of `(n+1)²` unit vectors.
pub fn build_constraints_3d(b: &Boundary, basis: &Basis, points: &[[f64; 3]]) -> Result<ConstraintSet> {
    if basis.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: basis.dim(),
        });
    }
    let n = basis.degree();
    let want = (n + 1) * (n + 1);
    if points.len() != want {
        return Err(Error::PointFile(format!(
            "degree {n} needs exactly {want} points, got {}",
            points.len()
        )));
    }
    check_unit(points)?;
    let flat = points.iter().flatten().copied().collect();
    let c = ConstraintSet::assemble(b, basis, flat, format!("{want} sphere points, degree {n}"))?;
    if c.sigma_min() < MIN_SIGMA_3D {
        return Err(Error::IllConditionedPoints {
            sigma_min: c.sigma_min(),
            threshold: MIN_SIGMA_3D,
        });
    }
    Ok(c)
}

fn check_unit(points: &[[f64; 3]]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::PointFile(format!("point {} has norm {norm}, expected 1", i + 1)));
        }
    }
    Ok(())
}

/// Parse a point file: one `x y z` triple per line; blank lines and lines
/// starting with `#` are skipped.
pub fn parse_points(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::PointFile(format!("line {}: {e}", ln + 1)))?;
        if vals.len() != 3 {
            return Err(Error::PointFile(format!(
                "line {}: expected 3 numbers, found {}",
                ln + 1,
                vals.len()
            )));
        }
        out.push([vals[0], vals[1], vals[2]]);
    }
    check_unit(&out)?;
    Ok(out)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<[f64; 3]>> {
    parse_points(&fs::read_to_string(path)?)
}

pub fn write_points(points: &[[f64; 3]], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::new();
    for p in points {
        writeln!(s, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2]).unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

/// `(n+1)²` points on the sphere with a large interpolation determinant.
///
/// Starts from a Fibonacci spiral and runs projected gradient ascent on
/// `log det(A Aᵀ)`, which differs from the log determinant of the interpolation
/// matrix in any basis of spherical polynomials by a constant.
pub fn extremal_points(basis: &Basis, iterations: usize) -> Result<Vec<[f64; 3]>> {
    if basis.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: basis.dim(),
        });
    }
    let q = (basis.degree() + 1).pow(2);
    let mut pts = fibonacci_sphere(q);
    let (mut val, mut grad) = log_det_and_grad(basis, &pts).ok_or_else(|| Error::RankDeficient {
        context: "initial spiral points".into(),
        sigma_min: 0.0,
        sigma_max: 0.0,
    })?;
    let mut step = 0.1 / (q as f64).sqrt();
    for _ in 0..iterations {
        let gnorm = grad.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-12 || step < 1e-14 {
            break;
        }
        let trial: Vec<[f64; 3]> = pts
            .iter()
            .zip(&grad)
            .map(|(p, g)| {
                let mut y = [p[0] + step * g[0] / gnorm, p[1] + step * g[1] / gnorm, p[2] + step * g[2] / gnorm];
                let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                y.iter_mut().for_each(|v| *v /= r);
                y
            })
            .collect();
        match log_det_and_grad(basis, &trial) {
            Some((v, g)) if v > val => {
                pts = trial;
                val = v;
                grad = g;
                step *= 1.2;
            }
            _ => step *= 0.5,
        }
    }
    Ok(pts)
}

/// `log det(A Aᵀ)` and its tangential gradient with respect to each point.
fn log_det_and_grad(basis: &Basis, pts: &[[f64; 3]]) -> Option<(f64, Vec<[f64; 3]>)> {
    let (q, n) = (pts.len(), basis.size());
    let mut a = DMatrix::zeros(q, n);
    let mut grads = vec![0.0; q * n * 3];
    let mut vals = vec![0.0; n];
    for (j, p) in pts.iter().enumerate() {
        basis.eval_grad_all(p, &mut vals, &mut grads[j * n * 3..(j + 1) * n * 3]);
        for i in 0..n {
            a[(j, i)] = vals[i];
        }
    }
    let k = &a * a.transpose();
    let chol = k.cholesky()?;
    let val = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let g = chol.solve(&a);
    let out = (0..q)
        .map(|j| {
            let mut v = [0.0; 3];
            for i in 0..n {
                for c in 0..3 {
                    v[c] += 2.0 * g[(j, i)] * grads[(j * n + i) * 3 + c];
                }
            }
            let p = pts[j];
            let radial = v[0] * p[0] + v[1] * p[1] + v[2] * p[2];
            [v[0] - radial * p[0], v[1] - radial * p[1], v[2] - radial * p[2]]
        })
        .collect();
    Some((val, out))
}
