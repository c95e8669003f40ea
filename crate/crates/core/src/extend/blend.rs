//! Smooth radial blend maps for star-like regions.
//!
//! `Φ(x) = [T(r; κ) ρ̂(x̂) + (1 − T(r; κ)) ω] x` with `T(r; κ) = exp(κ(1 − 1/r))`,
//! or, with a core radius `δ`, the identity on `|x| ≤ δ` and
//! `[T(s; κ) ρ̂ + 1 − T(s; κ)] x`, `s = (r − δ)/(1 − δ)`, outside it.

use crate::boundary::Boundary;
use crate::field::VectorField;
use crate::{Error, Result};

/// `T(r; κ) = exp(κ(1 − 1/r))` with `T(0) = 0`.
pub fn blend_t(r: f64, kappa: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        (kappa * (1.0 - 1.0 / r)).exp()
    }
}

#[derive(Debug, Clone)]
pub struct SmoothBlendMap {
    boundary: Boundary,
    kappa: f64,
    omega: f64,
    core: Option<f64>,
}

impl SmoothBlendMap {
    /// Blend with interior scale `ω ∈ (0, ω₀)`, `ω₀ = min ρ̂`.
    pub fn new(boundary: impl Into<Boundary>, kappa: f64, omega: f64) -> Result<Self> {
        let boundary = boundary.into();
        check_kappa(kappa)?;
        let omega0 = boundary.min_radius()?;
        if !(omega > 0.0 && omega < omega0) {
            return Err(Error::invalid(
                "omega",
                format!("must lie in (0, {omega0:.9}) for this boundary, got {omega}"),
            ));
        }
        Ok(Self {
            boundary,
            kappa,
            omega,
            core: None,
        })
    }

    /// The variant that is the identity on the closed disk of radius `δ`, which
    /// must lie inside the region.
    pub fn with_core(boundary: impl Into<Boundary>, kappa: f64, delta: f64) -> Result<Self> {
        let boundary = boundary.into();
        check_kappa(kappa)?;
        let omega0 = boundary.min_radius()?;
        if !(delta > 0.0 && delta < 1.0 && delta < omega0) {
            return Err(Error::invalid(
                "delta",
                format!("must lie in (0, {:.9}) for this boundary, got {delta}", omega0.min(1.0)),
            ));
        }
        Ok(Self {
            boundary,
            kappa,
            omega: 1.0,
            core: Some(delta),
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn core(&self) -> Option<f64> {
        self.core
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    /// Scale factor `g(x)` with `Φ(x) = g(x) x`.
    fn scale(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = match self.core {
            None => r,
            Some(delta) if r <= delta => return 1.0,
            Some(delta) => (r - delta) / (1.0 - delta),
        };
        if s == 0.0 {
            return self.omega;
        }
        let t = blend_t(s, self.kappa);
        let rho = self.boundary.radial_at(x).expect("star-like boundary");
        t * rho + (1.0 - t) * self.omega
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa", format!("must be positive, got {kappa}")));
    }
    Ok(())
}

impl VectorField for SmoothBlendMap {
    fn dim(&self) -> usize {
        self.boundary.dim()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        let r2: f64 = x[..d].iter().map(|v| v * v).sum();
        if (r2 - 1.0).abs() < 1e-15 {
            // on the rim the map is the boundary itself
            self.boundary.eval_point(x, out);
            return;
        }
        let g = self.scale(x);
        for k in 0..d {
            out[k] = g * x[k];
        }
    }
}
