//! Chord-interpolation integral extension.
//!
//! For an interior point `P` and a direction `η`, the line through `P` meets the
//! sphere at `P₊ = P + r₊η` and `P₋ = P − r₋η`. The boundary values at both ends
//! are linearly interpolated back to `P`, and the result is averaged over all
//! directions.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::basis::gauss_legendre_01;
use crate::boundary::{BoundaryMap2D, BoundaryMap3D};
use crate::field::{det, fd_jacobian, VectorField, FD_STEP};
use crate::{exec, Error, Result};

/// Inside this distance of the rim the operator returns the boundary value.
pub const RIM_GUARD: f64 = 1e-12;

/// Default resolutions of the spatial operator.
pub const DEFAULT_THETA_NODES: usize = 64;
pub const DEFAULT_OMEGA_NODES: usize = 32;

/// Chord of the unit disk through `P` in direction `(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordFrame {
    pub p: [f64; 2],
    pub theta: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub p_plus: [f64; 2],
    pub p_minus: [f64; 2],
}

/// `r± = ∓ P·η + sqrt((P·η)² + 1 − |P|²)` in any dimension.
fn chord_lengths(p: &[f64], eta: &[f64]) -> (f64, f64) {
    let pe: f64 = p.iter().zip(eta).map(|(a, b)| a * b).sum();
    let pp: f64 = p.iter().map(|a| a * a).sum();
    let root = (pe * pe + 1.0 - pp).max(0.0).sqrt();
    (-pe + root, pe + root)
}

pub fn chord_frame(p: [f64; 2], theta: f64) -> Result<ChordFrame> {
    let norm = p[0].hypot(p[1]);
    if !(norm < 1.0) {
        return Err(Error::OutsideBall { norm });
    }
    let eta = [theta.cos(), theta.sin()];
    let (r_plus, r_minus) = chord_lengths(&p, &eta);
    Ok(ChordFrame {
        p,
        theta,
        r_plus,
        r_minus,
        p_plus: [p[0] + r_plus * eta[0], p[1] + r_plus * eta[1]],
        p_minus: [p[0] - r_minus * eta[0], p[1] - r_minus * eta[1]],
    })
}

/// `(k(r, θ), ψ*(r, θ))` for `θ ∈ [0, 2π]`, using the limiting branches at `r = 1`.
pub fn kernel_pair(r: f64, theta: f64) -> (f64, f64) {
    if r >= 1.0 {
        return if theta <= FRAC_PI_2 {
            (2.0, 0.0)
        } else if theta < 3.0 * FRAC_PI_2 {
            (0.0, 2.0 * theta - PI)
        } else {
            (2.0, TAU)
        };
    }
    let (s, c) = theta.sin_cos();
    let root = (1.0 - r * r * s * s).sqrt();
    let k = 1.0 + r * c / root;
    let psi = if theta <= PI {
        (r * s * s + c * root).clamp(-1.0, 1.0).acos()
    } else {
        // ψ₋ at θ − π; sin² and the root are unchanged by the shift
        let cs = -c;
        TAU - (r * s * s - cs * root).clamp(-1.0, 1.0).acos()
    };
    (k, psi)
}

/// `(1/2π) ∫₀^{2π} k(r, θ) φ(ψ*(r, θ) + α) dθ` by the trapezoidal rule.
pub fn integral_extend_2d(b: &BoundaryMap2D, p: [f64; 2], nodes: usize) -> [f64; 2] {
    let r = p[0].hypot(p[1]);
    let alpha = p[1].atan2(p[0]);
    if 1.0 - r < RIM_GUARD {
        return b.eval(alpha);
    }
    let mut acc = [0.0; 2];
    for i in 0..nodes {
        let theta = TAU * i as f64 / nodes as f64;
        let (k, psi) = kernel_pair(r, theta);
        let v = b.eval(psi + alpha);
        acc[0] += k * v[0];
        acc[1] += k * v[1];
    }
    [acc[0] / nodes as f64, acc[1] / nodes as f64]
}

/// Hemisphere of line directions with Gauss–Legendre in the polar angle `ω`
/// and the trapezoidal rule in the azimuth; weights include `sin ω` and sum to one.
#[derive(Debug, Clone)]
struct DirectionRule {
    dirs: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl DirectionRule {
    fn new(n_theta: usize, n_omega: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(Error::invalid("n_theta", "need at least one azimuth"));
        }
        let (x, w) = gauss_legendre_01(n_omega)?;
        let mut dirs = Vec::with_capacity(n_theta * n_omega);
        let mut weights = Vec::with_capacity(n_theta * n_omega);
        for (xo, wo) in x.iter().zip(&w) {
            let om = FRAC_PI_2 * xo;
            let (so, co) = om.sin_cos();
            for i in 0..n_theta {
                let (st, ct) = (TAU * i as f64 / n_theta as f64).sin_cos();
                dirs.push([so * ct, so * st, co]);
                weights.push(FRAC_PI_2 * wo * so / n_theta as f64);
            }
        }
        Ok(Self { dirs, weights })
    }
}

/// Spatial chord interpolation averaged over the hemisphere of directions.
pub fn integral_extend_3d(b: &BoundaryMap3D, p: [f64; 3], n_theta: usize, n_omega: usize) -> Result<[f64; 3]> {
    let rule = DirectionRule::new(n_theta, n_omega)?;
    Ok(extend_3d_with(b, &p, &rule))
}

fn extend_3d_with(b: &BoundaryMap3D, p: &[f64], rule: &DirectionRule) -> [f64; 3] {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if 1.0 - r < RIM_GUARD {
        return b.eval(&[p[0] / r, p[1] / r, p[2] / r]);
    }
    let mut acc = [0.0; 3];
    for (eta, w) in rule.dirs.iter().zip(&rule.weights) {
        let (rp, rm) = chord_lengths(p, eta);
        let plus = [p[0] + rp * eta[0], p[1] + rp * eta[1], p[2] + rp * eta[2]];
        let minus = [p[0] - rm * eta[0], p[1] - rm * eta[1], p[2] - rm * eta[2]];
        let (fp, fm) = (b.eval(&plus), b.eval(&minus));
        let s = w / (rp + rm);
        for k in 0..3 {
            acc[k] += s * (rm * fp[k] + rp * fm[k]);
        }
    }
    acc
}

/// The planar operator as a [`VectorField`].
#[derive(Debug, Clone)]
pub struct IntegralMap2D {
    boundary: BoundaryMap2D,
    nodes: usize,
}

impl IntegralMap2D {
    pub fn new(boundary: BoundaryMap2D, nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::invalid("nodes", format!("need at least 8 trapezoid nodes, got {nodes}")));
        }
        Ok(Self { boundary, nodes })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

impl VectorField for IntegralMap2D {
    fn dim(&self) -> usize {
        2
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out[..2].copy_from_slice(&integral_extend_2d(&self.boundary, [x[0], x[1]], self.nodes));
    }
}

/// The spatial operator as a [`VectorField`].
#[derive(Debug, Clone)]
pub struct IntegralMap3D {
    boundary: BoundaryMap3D,
    rule: DirectionRule,
}

impl IntegralMap3D {
    pub fn new(boundary: BoundaryMap3D, n_theta: usize, n_omega: usize) -> Result<Self> {
        Ok(Self {
            boundary,
            rule: DirectionRule::new(n_theta, n_omega)?,
        })
    }
}

impl VectorField for IntegralMap3D {
    fn dim(&self) -> usize {
        3
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out[..3].copy_from_slice(&extend_3d_with(&self.boundary, x, &self.rule));
    }
}

/// Smallest finite-difference Jacobian determinant of `field` over `points`
/// (flat, `dim` coordinates each). A value at or below zero shows the
/// extension folds over.
pub fn min_fd_det(field: &dyn VectorField, points: &[f64]) -> f64 {
    let d = field.dim();
    exec::min_over(points.len() / d, |i| {
        det(&fd_jacobian(field, &points[i * d..(i + 1) * d], FD_STEP), d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{SphericalTerm, TrigPoly};
    use rand::{Rng, SeedableRng};

    fn kite(a: f64) -> BoundaryMap2D {
        // (cos θ − sin θ + a cos² θ, cos θ + sin θ), with cos² θ = (1 + cos 2θ)/2
        BoundaryMap2D::parametric(
            TrigPoly::new(a / 2.0, vec![1.0, a / 2.0], vec![-1.0]),
            TrigPoly::new(0.0, vec![1.0], vec![1.0]),
        )
    }

    #[test]
    fn chord_frame_examples() {
        let f = chord_frame([0.0, 0.0], 1.3).unwrap();
        assert!((f.r_plus - 1.0).abs() < 1e-15 && (f.r_minus - 1.0).abs() < 1e-15);
        let f = chord_frame([0.5, 0.0], FRAC_PI_2).unwrap();
        assert!((f.r_plus - 0.75f64.sqrt()).abs() < 1e-15 && (f.r_minus - 0.75f64.sqrt()).abs() < 1e-15);
        let f = chord_frame([0.5, 0.0], 0.0).unwrap();
        assert!((f.r_plus - 0.5).abs() < 1e-15 && (f.r_minus - 1.5).abs() < 1e-15);
        assert!(matches!(chord_frame([0.6, 0.8], 0.0), Err(Error::OutsideBall { .. })));
    }

    #[test]
    fn chord_frame_invariants() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..1000 {
            let (r, a, t) = (rng.random_range(0.0..0.999), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let f = chord_frame([r * a.cos(), r * a.sin()], t).unwrap();
            assert!((f.p_plus[0].hypot(f.p_plus[1]) - 1.0).abs() < 1e-12);
            assert!((f.p_minus[0].hypot(f.p_minus[1]) - 1.0).abs() < 1e-12);
            let want = 2.0 * (1.0 - r * r * (t - a).sin().powi(2)).sqrt();
            assert!((f.r_plus + f.r_minus - want).abs() < 1e-12);
            assert!(f.r_plus > 0.0 && f.r_minus > 0.0);
        }
    }

    #[test]
    fn kernel_examples() {
        for t in [0.0, 0.7, PI] {
            let (k, psi) = kernel_pair(0.0, t);
            assert!((k - 1.0).abs() < 1e-15 && (psi - t).abs() < 1e-12);
        }
        assert_eq!(kernel_pair(1.0, PI / 4.0), (2.0, 0.0));
        assert_eq!(kernel_pair(1.0, PI), (0.0, PI));
        assert_eq!(kernel_pair(1.0, 1.8 * PI), (2.0, TAU));
    }

    #[test]
    fn kernel_bounds_and_angles_match_chords() {
        for ir in 0..=50 {
            let r = ir as f64 / 50.0 * 0.999;
            for it in 0..=400 {
                let t = TAU * it as f64 / 400.0;
                let (k, psi) = kernel_pair(r, t);
                assert!((-1e-12..=2.0 + 1e-12).contains(&k));
                assert!((0.0..=TAU).contains(&psi));
                if r > 0.0 && t < PI {
                    // ψ₊ is the polar angle of P₊ for P on the positive x-axis
                    let f = chord_frame([r, 0.0], t).unwrap();
                    let ang = f.p_plus[1].atan2(f.p_plus[0]).rem_euclid(TAU);
                    let d = (ang - psi).abs();
                    assert!(d < 1e-7 || (TAU - d) < 1e-7, "r {r} t {t}: {ang} vs {psi}");
                }
            }
        }
    }

    #[test]
    fn identity_boundary_is_reproduced() {
        let b = BoundaryMap2D::unit_circle();
        let mut rng = rand::rngs::StdRng::seed_from_u64(8);
        for _ in 0..500 {
            let (r, a) = (rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
            let p = [r * a.cos(), r * a.sin()];
            let v = integral_extend_2d(&b, p, 100);
            assert!((v[0] - p[0]).hypot(v[1] - p[1]) <= 1e-9);
        }
    }

    #[test]
    fn rim_values_are_exact() {
        let b = BoundaryMap2D::cassini(1.5).unwrap();
        for i in 0..720 {
            let t = TAU * i as f64 / 720.0;
            let v = integral_extend_2d(&b, [t.cos(), t.sin()], 64);
            let w = b.eval(t.sin().atan2(t.cos()));
            assert_eq!(v, w);
        }
    }

    #[test]
    fn centre_value_is_boundary_mean() {
        let b = kite(0.9);
        let v = integral_extend_2d(&b, [0.0, 0.0], 100);
        let n = 100_000;
        let mut mean = [0.0; 2];
        for i in 0..n {
            let w = b.eval(TAU * i as f64 / n as f64);
            mean[0] += w[0] / n as f64;
            mean[1] += w[1] / n as f64;
        }
        assert!((v[0] - mean[0]).abs() < 1e-9 && (v[1] - mean[1]).abs() < 1e-9);
    }

    #[test]
    fn convex_region_contains_image() {
        let b = BoundaryMap2D::ellipse(2.0, 1.0);
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        for _ in 0..1000 {
            let (r, a) = (rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
            let v = integral_extend_2d(&b, [r * a.cos(), r * a.sin()], 200);
            assert!(v[0] * v[0] / 4.0 + v[1] * v[1] - 1.0 <= 1e-8);
        }
    }

    #[test]
    fn rim_continuity_for_cassini() {
        let b = BoundaryMap2D::cassini(1.5).unwrap();
        for i in 0..64 {
            let t = TAU * i as f64 / 64.0;
            let v = integral_extend_2d(&b, [0.999 * t.cos(), 0.999 * t.sin()], 2000);
            let w = b.eval(t);
            assert!((v[0] - w[0]).hypot(v[1] - w[1]) <= 0.05, "{t}");
        }
    }

    #[test]
    fn spatial_operator_on_spheres() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        for c in [1.0, 2.5] {
            let b = BoundaryMap3D::sphere(c).unwrap();
            for _ in 0..50 {
                let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.57..0.57));
                let v = integral_extend_3d(&b, p, DEFAULT_THETA_NODES, DEFAULT_OMEGA_NODES).unwrap();
                for k in 0..3 {
                    assert!((v[k] - c * p[k]).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn spatial_centre_value_is_spherical_mean() {
        let b = BoundaryMap3D::star_spherical(vec![SphericalTerm::new(2.0, 0, 0, 0, 0), SphericalTerm::new(1.0, 2, 0, 0, 0)])
            .unwrap();
        let v = integral_extend_3d(&b, [0.0; 3], 64, 32).unwrap();
        // dense product oracle of (1/4π) ∫ ρ̂(z) z dσ(z)
        let (nt, np) = (2000, 400);
        let mut mean = [0.0; 3];
        for i in 0..nt {
            let th = PI * (i as f64 + 0.5) / nt as f64;
            for j in 0..np {
                let ph = TAU * j as f64 / np as f64;
                let z = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                let w = b.eval(&z);
                let dw = th.sin() * (PI / nt as f64) * (TAU / np as f64) / (4.0 * PI);
                for k in 0..3 {
                    mean[k] += w[k] * dw;
                }
            }
        }
        for k in 0..3 {
            assert!((v[k] - mean[k]).abs() <= 1e-6, "{v:?} {mean:?}");
        }
    }

    #[test]
    fn fold_diagnostic_is_positive_for_mild_region() {
        let m = IntegralMap2D::new(BoundaryMap2D::cassini(1.5).unwrap(), 200).unwrap();
        let pts: Vec<f64> = (0..36).flat_map(|i| {
            let t = TAU * i as f64 / 36.0;
            [0.5 * t.cos(), 0.5 * t.sin()]
        }).collect();
        assert!(min_fd_det(&m, &pts) > 0.0);
        assert!(IntegralMap2D::new(BoundaryMap2D::unit_circle(), 4).is_err());
    }
}
