//! Boundary parametrizations `φ: S^{d-1} → ∂Ω` and their radial profiles.
//!
//! Planar boundaries are functions of the angle `θ` (identified with the point
//! `(cos θ, sin θ)` on the unit circle). Spatial boundaries are star-like surfaces
//! `φ(x) = ρ̂(θ, ϕ) x` with `θ` the polar angle and `ϕ` the azimuth.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Samples used when validating positivity of a planar radial profile.
pub const STAR_CHECK_SAMPLES_2D: usize = 10_000;
/// `(polar, azimuthal)` samples used when validating a spatial radial profile.
pub const STAR_CHECK_GRID_3D: (usize, usize) = (200, 400);
/// A radial profile is rejected when its sampled minimum is at or below this.
pub const MIN_RADIUS_FLOOR: f64 = 1e-9;

/// `f(θ) = a₀/2 + Σ aₙ cos nθ + bₙ sin nθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    #[serde(default)]
    pub half_a0: f64,
    /// `a_1, a_2, …`
    #[serde(default, rename = "cos")]
    pub cos_coeffs: Vec<f64>,
    /// `b_1, b_2, …`
    #[serde(default, rename = "sin")]
    pub sin_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn new(half_a0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Self {
        Self {
            half_a0,
            cos_coeffs,
            sin_coeffs,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, vec![], vec![])
    }

    /// Highest harmonic carrying a nonzero coefficient.
    pub fn degree(&self) -> usize {
        let last = |v: &[f64]| v.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
        last(&self.cos_coeffs).max(last(&self.sin_coeffs))
    }

    /// Coefficient pair `(a_k, b_k)` for `k ≥ 1`, zero beyond the stored length.
    pub fn harmonic(&self, k: usize) -> (f64, f64) {
        let a = self.cos_coeffs.get(k - 1).copied().unwrap_or(0.0);
        let b = self.sin_coeffs.get(k - 1).copied().unwrap_or(0.0);
        (a, b)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(TAU);
        let m = self.cos_coeffs.len().max(self.sin_coeffs.len());
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = self.half_a0;
        for k in 1..=m {
            // rotate (cos (k-1)θ, sin (k-1)θ) by θ
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
            let (a, b) = self.harmonic(k);
            acc += a * c + b * s;
        }
        acc
    }

    /// `f'(θ)`.
    pub fn derivative(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(TAU);
        let m = self.cos_coeffs.len().max(self.sin_coeffs.len());
        let mut acc = 0.0;
        for k in 1..=m {
            let (a, b) = self.harmonic(k);
            let (s, c) = (k as f64 * theta).sin_cos();
            acc += k as f64 * (b * c - a * s);
        }
        acc
    }

    /// Coefficients truncated (or zero-padded) to degree `m`.
    pub fn truncated(&self, m: usize) -> Self {
        let fit = |v: &[f64]| {
            let mut out: Vec<f64> = v.iter().copied().take(m).collect();
            out.resize(m, 0.0);
            out
        };
        Self::new(self.half_a0, fit(&self.cos_coeffs), fit(&self.sin_coeffs))
    }
}

/// Trapezoidal-rule Fourier coefficients `a₀/2, a₁..a_m, b₁..b_m` of a
/// `2π`-periodic function sampled at `nodes` equispaced points.
pub fn fourier_coefficients<F>(f: F, m: usize, nodes: usize) -> Result<TrigPoly>
where
    F: Fn(f64) -> f64,
{
    if nodes < 2 * m + 1 {
        return Err(Error::invalid(
            "nodes",
            format!("{nodes} trapezoid nodes cannot resolve degree {m}; need at least {}", 2 * m + 1),
        ));
    }
    let samples: Vec<(f64, f64)> = (0..nodes)
        .map(|j| {
            let t = TAU * j as f64 / nodes as f64;
            (t, f(t))
        })
        .collect();
    let scale = 2.0 / nodes as f64;
    let half_a0 = samples.iter().map(|(_, v)| v).sum::<f64>() / nodes as f64;
    let mut cos_coeffs = Vec::with_capacity(m);
    let mut sin_coeffs = Vec::with_capacity(m);
    for k in 1..=m {
        let (mut a, mut b) = (0.0, 0.0);
        for (j, (_, v)) in samples.iter().enumerate() {
            // exact node angle multiple avoids drift in k*t
            let arg = TAU * ((k * j) % nodes) as f64 / nodes as f64;
            let (s, c) = arg.sin_cos();
            a += v * c;
            b += v * s;
        }
        cos_coeffs.push(a * scale);
        sin_coeffs.push(b * scale);
    }
    Ok(TrigPoly::new(half_a0, cos_coeffs, sin_coeffs))
}

/// A planar boundary parametrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryMap2D {
    /// `φ(θ) = ρ̂(θ)(cos θ, sin θ)` with a trigonometric radial profile.
    StarTrig { radial: TrigPoly },
    /// Ovals of Cassini, `ρ̂(θ) = sqrt(cos 2θ + sqrt(a − sin² 2θ))`, `a > 1`.
    Cassini { a: f64 },
    /// `φ(θ) = (x(θ), y(θ))` with trigonometric components.
    ParametricTrig { x: TrigPoly, y: TrigPoly },
}

impl BoundaryMap2D {
    pub fn star_trig(radial: TrigPoly) -> Result<Self> {
        let b = BoundaryMap2D::StarTrig { radial };
        b.validate()?;
        Ok(b)
    }

    pub fn cassini(a: f64) -> Result<Self> {
        let b = BoundaryMap2D::Cassini { a };
        b.validate()?;
        Ok(b)
    }

    pub fn parametric(x: TrigPoly, y: TrigPoly) -> Self {
        BoundaryMap2D::ParametricTrig { x, y }
    }

    /// `(a cos θ, b sin θ)`.
    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::parametric(
            TrigPoly::new(0.0, vec![a], vec![]),
            TrigPoly::new(0.0, vec![], vec![b]),
        )
    }

    pub fn unit_circle() -> Self {
        Self::ellipse(1.0, 1.0)
    }

    /// Check the family invariants (positivity by dense sampling, `a > 1`).
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryMap2D::StarTrig { radial } => {
                let min = (0..STAR_CHECK_SAMPLES_2D)
                    .map(|i| radial.eval(TAU * i as f64 / STAR_CHECK_SAMPLES_2D as f64))
                    .fold(f64::INFINITY, f64::min);
                if !(min > MIN_RADIUS_FLOOR) {
                    return Err(Error::NotStarLike(format!(
                        "radial profile reaches {min:.3e} (must stay above {MIN_RADIUS_FLOOR:e})"
                    )));
                }
                Ok(())
            }
            BoundaryMap2D::Cassini { a } => {
                if !(*a > 1.0) || !a.is_finite() {
                    return Err(Error::invalid(
                        "a",
                        format!("Cassini parameter must exceed 1 for a single oval, got {a}"),
                    ));
                }
                Ok(())
            }
            BoundaryMap2D::ParametricTrig { .. } => Ok(()),
        }
    }

    pub fn is_star_like(&self) -> bool {
        !matches!(self, BoundaryMap2D::ParametricTrig { .. })
    }

    /// Degree of `φ` as a trigonometric polynomial, when it is one.
    pub fn trig_degree(&self) -> Option<usize> {
        match self {
            BoundaryMap2D::StarTrig { radial } => Some(radial.degree() + 1),
            BoundaryMap2D::Cassini { .. } => None,
            BoundaryMap2D::ParametricTrig { x, y } => Some(x.degree().max(y.degree())),
        }
    }

    /// `ρ̂(θ)` for star-like boundaries.
    pub fn radial(&self, theta: f64) -> Option<f64> {
        match self {
            BoundaryMap2D::StarTrig { radial } => Some(radial.eval(theta)),
            BoundaryMap2D::Cassini { a } => Some(cassini_radius(*a, theta)),
            BoundaryMap2D::ParametricTrig { .. } => None,
        }
    }

    /// `φ(cos θ, sin θ)`.
    pub fn eval(&self, theta: f64) -> [f64; 2] {
        match self {
            BoundaryMap2D::ParametricTrig { x, y } => [x.eval(theta), y.eval(theta)],
            _ => {
                let rho = self.radial(theta).expect("star-like variant");
                let (s, c) = theta.sin_cos();
                [rho * c, rho * s]
            }
        }
    }

    /// `φ(z)` for a point `z` on the unit circle (its angle is used).
    pub fn eval_point(&self, z: &[f64]) -> [f64; 2] {
        self.eval(z[1].atan2(z[0]))
    }
}

fn cassini_radius(a: f64, theta: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    (c2 + (a - s2 * s2).sqrt()).sqrt()
}

/// `ω₀ = min_θ ρ̂(θ)`: dense scan followed by golden-section refinement.
pub fn min_radius(b: &BoundaryMap2D) -> Result<f64> {
    if !b.is_star_like() {
        return Err(Error::NotStarLike(
            "minimum radius is only defined for star-like boundaries".into(),
        ));
    }
    let rho = |t: f64| b.radial(t).unwrap();
    let n = STAR_CHECK_SAMPLES_2D;
    let step = TAU / n as f64;
    let (best, _) = (0..n)
        .map(|i| (i, rho(step * i as f64)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let centre = step * best as f64;
    Ok(golden_section_min(rho, centre - step, centre + step, 1e-12))
}

/// Minimum value of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(f(0.5 * (lo + hi)))
}

/// One term `c · cos^p θ · sin^q θ · cos^r ϕ · sin^s ϕ` of a spatial radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphericalTerm {
    pub c: f64,
    #[serde(default)]
    pub p: u32,
    #[serde(default)]
    pub q: u32,
    #[serde(default)]
    pub r: u32,
    #[serde(default)]
    pub s: u32,
}

impl SphericalTerm {
    pub fn new(c: f64, p: u32, q: u32, r: u32, s: u32) -> Self {
        Self { c, p, q, r, s }
    }
}

/// A star-like surface `φ(x) = ρ̂(θ, ϕ) x`, `x ∈ S²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryMap3D {
    terms: Vec<SphericalTerm>,
}

impl BoundaryMap3D {
    pub fn star_spherical(terms: Vec<SphericalTerm>) -> Result<Self> {
        let b = Self { terms };
        b.validate()?;
        Ok(b)
    }

    /// The sphere of radius `c`.
    pub fn sphere(c: f64) -> Result<Self> {
        Self::star_spherical(vec![SphericalTerm::new(c, 0, 0, 0, 0)])
    }

    pub fn terms(&self) -> &[SphericalTerm] {
        &self.terms
    }

    pub fn validate(&self) -> Result<()> {
        let (nt, np) = STAR_CHECK_GRID_3D;
        let mut min = f64::INFINITY;
        for i in 0..nt {
            let theta = PI * i as f64 / (nt - 1) as f64;
            for j in 0..np {
                let phi = TAU * j as f64 / np as f64;
                min = min.min(self.radial_angles(theta, phi));
            }
        }
        if !(min > MIN_RADIUS_FLOOR) {
            return Err(Error::NotStarLike(format!(
                "spherical radial profile reaches {min:.3e} (must stay above {MIN_RADIUS_FLOOR:e})"
            )));
        }
        Ok(())
    }

    /// `ρ̂(θ, ϕ)`.
    pub fn radial_angles(&self, theta: f64, phi: f64) -> f64 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        self.radial_trig(ct, st, cp, sp)
    }

    fn radial_trig(&self, ct: f64, st: f64, cp: f64, sp: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.c * ct.powi(t.p as i32) * st.powi(t.q as i32) * cp.powi(t.r as i32) * sp.powi(t.s as i32))
            .sum()
    }

    /// `ρ̂` in the direction of a nonzero point `x`.
    pub fn radial(&self, x: &[f64]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let rxy = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (ct, st) = (x[2] / r, rxy / r);
        let (cp, sp) = if rxy > 0.0 { (x[0] / rxy, x[1] / rxy) } else { (1.0, 0.0) };
        self.radial_trig(ct, st, cp, sp)
    }

    /// `φ(z) = ρ̂(z) z` for `z` on the unit sphere.
    pub fn eval(&self, z: &[f64]) -> [f64; 3] {
        let rho = self.radial(z);
        [rho * z[0], rho * z[1], rho * z[2]]
    }

    /// Minimum of `ρ̂` over the validation grid.
    pub fn min_radius(&self) -> f64 {
        let (nt, np) = STAR_CHECK_GRID_3D;
        let mut min = f64::INFINITY;
        for i in 0..nt {
            let theta = PI * i as f64 / (nt - 1) as f64;
            for j in 0..np {
                min = min.min(self.radial_angles(theta, TAU * j as f64 / np as f64));
            }
        }
        min
    }
}

/// Either kind of boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Planar(BoundaryMap2D),
    Spatial(BoundaryMap3D),
}

impl Boundary {
    pub fn dim(&self) -> usize {
        match self {
            Boundary::Planar(_) => 2,
            Boundary::Spatial(_) => 3,
        }
    }

    /// `φ(z)` for a unit vector `z`.
    pub fn eval_point(&self, z: &[f64], out: &mut [f64]) {
        match self {
            Boundary::Planar(b) => out[..2].copy_from_slice(&b.eval_point(z)),
            Boundary::Spatial(b) => out[..3].copy_from_slice(&b.eval(z)),
        }
    }

    /// Minimum radial value, `ω₀`.
    pub fn min_radius(&self) -> Result<f64> {
        match self {
            Boundary::Planar(b) => min_radius(b),
            Boundary::Spatial(b) => Ok(b.min_radius()),
        }
    }

    /// Radial profile value in the direction of `x` (star-like boundaries only).
    pub fn radial_at(&self, x: &[f64]) -> Option<f64> {
        match self {
            Boundary::Planar(b) => b.radial(x[1].atan2(x[0])),
            Boundary::Spatial(b) => Some(b.radial(x)),
        }
    }
}

impl From<BoundaryMap2D> for Boundary {
    fn from(b: BoundaryMap2D) -> Self {
        Boundary::Planar(b)
    }
}

impl From<BoundaryMap3D> for Boundary {
    fn from(b: BoundaryMap3D) -> Self {
        Boundary::Spatial(b)
    }
}

/// `n` nearly uniform points on the unit sphere (Fibonacci spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [r * c, r * s, z]
        })
        .collect()
}
