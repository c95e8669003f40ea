//! Harmonic extension of a planar boundary by truncated Fourier series.

use crate::boundary::{fourier_coefficients, BoundaryMap2D, TrigPoly};
use crate::field::VectorField;
use crate::{Error, Result};

/// `F(r, θ) = a₀/2 + Σ rⁿ (aₙ cos nθ + bₙ sin nθ)` for each component.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMap2D {
    pub x: TrigPoly,
    pub y: TrigPoly,
}

/// Truncate the Fourier series of both components of `b` at degree `n`, using
/// the trapezoidal rule with `nodes` points, and extend harmonically.
pub fn harmonic_extend_2d(b: &BoundaryMap2D, n: usize, nodes: usize) -> Result<HarmonicMap2D> {
    if nodes < 2 * n + 2 {
        return Err(Error::invalid(
            "nodes",
            format!("harmonic extension of degree {n} needs at least {} nodes, got {nodes}", 2 * n + 2),
        ));
    }
    let x = fourier_coefficients(|t| b.eval(t)[0], n, nodes)?;
    let y = fourier_coefficients(|t| b.eval(t)[1], n, nodes)?;
    Ok(HarmonicMap2D { x, y })
}

/// `Σ_k rᵏ(a_k cos kθ + b_k sin kθ) = Re Σ (a_k − i b_k) zᵏ` and its gradient,
/// `(Σ k Re((a_k − i b_k) zᵏ⁻¹), Σ k Re((b_k + i a_k) zᵏ⁻¹))`.
fn eval_with_gradient(f: &TrigPoly, x: f64, y: f64) -> (f64, f64, f64) {
    let m = f.cos_coeffs.len().max(f.sin_coeffs.len());
    let mut value = f.half_a0;
    let (mut gx, mut gy) = (0.0, 0.0);
    // z^{k-1}
    let (mut pr, mut pi) = (1.0, 0.0);
    for k in 1..=m {
        let (a, b) = f.harmonic(k);
        let kf = k as f64;
        gx += kf * (a * pr + b * pi);
        gy += kf * (b * pr - a * pi);
        let (zr, zi) = (pr * x - pi * y, pr * y + pi * x);
        value += a * zr + b * zi;
        pr = zr;
        pi = zi;
    }
    (value, gx, gy)
}

impl HarmonicMap2D {
    /// Analytic Jacobian, row-major.
    pub fn jacobian(&self, x: &[f64]) -> [f64; 4] {
        let (_, a, b) = eval_with_gradient(&self.x, x[0], x[1]);
        let (_, c, d) = eval_with_gradient(&self.y, x[0], x[1]);
        [a, b, c, d]
    }
}

impl VectorField for HarmonicMap2D {
    fn dim(&self) -> usize {
        2
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = eval_with_gradient(&self.x, x[0], x[1]).0;
        out[1] = eval_with_gradient(&self.y, x[0], x[1]).0;
    }
}
