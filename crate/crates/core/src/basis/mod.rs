//! Orthonormal polynomial bases of `Π_n` on the unit disk and ball, the
//! quadrature rules behind their inner products, and orthogonal projection.

mod ball;
mod disk;
pub mod quadrature;

use std::str::FromStr;

pub use ball::{ball_size, BallBasis};
pub use disk::{disk_size, DiskBasis};
pub use quadrature::{gauss_legendre_01, integrate_disk, BallQuadrature, DiskQuadrature, QuadRule};

use crate::field::VectorField;
use crate::{exec, Error, Result};

/// Serialized identifiers of the two bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    RidgeLs,
    BallGs,
}

impl BasisKind {
    pub fn tag(self) -> &'static str {
        match self {
            BasisKind::RidgeLs => "ridge-ls",
            BasisKind::BallGs => "ball-gs",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            BasisKind::RidgeLs => 2,
            BasisKind::BallGs => 3,
        }
    }
}

impl FromStr for BasisKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ridge-ls" => Ok(BasisKind::RidgeLs),
            "ball-gs" => Ok(BasisKind::BallGs),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Basis {
    Disk(DiskBasis),
    Ball(BallBasis),
}

impl Basis {
    pub fn new(kind: BasisKind, degree: usize) -> Self {
        match kind {
            BasisKind::RidgeLs => Basis::Disk(DiskBasis::new(degree)),
            BasisKind::BallGs => Basis::Ball(BallBasis::new(degree)),
        }
    }

    /// The natural basis for dimension `dim`.
    pub fn for_dim(dim: usize, degree: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::new(BasisKind::RidgeLs, degree)),
            3 => Ok(Self::new(BasisKind::BallGs, degree)),
            d => Err(Error::invalid("dim", format!("only 2 and 3 are supported, got {d}"))),
        }
    }

    pub fn kind(&self) -> BasisKind {
        match self {
            Basis::Disk(_) => BasisKind::RidgeLs,
            Basis::Ball(_) => BasisKind::BallGs,
        }
    }

    pub fn tag(&self) -> &'static str {
        self.kind().tag()
    }

    pub fn dim(&self) -> usize {
        self.kind().dim()
    }

    pub fn degree(&self) -> usize {
        match self {
            Basis::Disk(b) => b.degree(),
            Basis::Ball(b) => b.degree(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Basis::Disk(b) => b.size(),
            Basis::Ball(b) => b.size(),
        }
    }

    pub fn eval_all(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Basis::Disk(b) => b.eval_all(x, out),
            Basis::Ball(b) => b.eval_all(x, out),
        }
    }

    /// Values and gradients (`size() * dim()` entries, row `j` = `∇ψ_j`).
    pub fn eval_grad_all(&self, x: &[f64], vals: &mut [f64], grads: &mut [f64]) {
        match self {
            Basis::Disk(b) => b.eval_grad_all(x, vals, grads),
            Basis::Ball(b) => b.eval_grad_all(x, vals, grads),
        }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.size() {
            return Err(Error::IndexOutOfRange {
                index: j,
                size: self.size(),
            });
        }
        Ok(())
    }

    /// `ψ_j(x)`, 0-based `j`.
    pub fn eval(&self, j: usize, x: &[f64]) -> Result<f64> {
        self.check_index(j)?;
        let mut v = vec![0.0; self.size()];
        self.eval_all(x, &mut v);
        Ok(v[j])
    }

    /// `∇ψ_j(x)`, 0-based `j`.
    pub fn grad(&self, j: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_index(j)?;
        let d = self.dim();
        let mut v = vec![0.0; self.size()];
        let mut g = vec![0.0; self.size() * d];
        self.eval_grad_all(x, &mut v, &mut g);
        Ok(g[j * d..(j + 1) * d].to_vec())
    }
}

/// Orthogonal projection `α_j = (f, ψ_j)` computed with `rule`.
///
/// Returns the coefficient matrix row-major, `size() x dim()`.
pub fn project(f: &dyn VectorField, basis: &Basis, rule: &QuadRule) -> Result<Vec<f64>> {
    let d = basis.dim();
    if f.dim() != d || rule.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if f.dim() != d { f.dim() } else { rule.dim() },
        });
    }
    let n = basis.size();
    // per node: basis values followed by field values
    let mut table = vec![0.0; rule.len() * (n + d)];
    exec::fill_rows(&mut table, n + d, |q, row| {
        let x = rule.point(q);
        let (vals, fx) = row.split_at_mut(n);
        basis.eval_all(x, vals);
        f.eval_into(x, fx);
    });
    let mut coeffs = vec![0.0; n * d];
    for (q, row) in table.chunks(n + d).enumerate() {
        let w = rule.weights()[q];
        let (vals, fx) = row.split_at(n);
        for j in 0..n {
            for c in 0..d {
                coeffs[j * d + c] += w * vals[j] * fx[c];
            }
        }
    }
    Ok(coeffs)
}
