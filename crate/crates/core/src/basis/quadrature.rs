//! Gauss–Legendre rules and the tensor quadratures on the unit disk and ball.

use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `count`-point Gauss–Legendre nodes (ascending) and weights on `[0, 1]`.
pub fn gauss_legendre_01(count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::invalid("count", "a Gauss-Legendre rule needs at least one node"));
    }
    let n = count;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if 2 * i + 1 == n {
            x = 0.0;
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 1.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((nodes, weights))
}

/// A flat list of quadrature nodes in `R^dim` with weights.
#[derive(Debug, Clone)]
pub struct QuadRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Node coordinates, `len() * dim()` values.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, g: F) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * g(self.point(i))).sum()
    }
}

/// Polar product rule on the unit disk: `(p+1)`-point Gauss–Legendre in `r`
/// (with the `r` Jacobian folded into the weights) times `2p+1` equispaced angles.
#[derive(Debug, Clone)]
pub struct DiskQuadrature {
    p: usize,
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
}

impl DiskQuadrature {
    pub fn new(p: usize) -> Self {
        let (radial_nodes, radial_weights) = gauss_legendre_01(p + 1).expect("p + 1 >= 1");
        Self {
            p,
            radial_nodes,
            radial_weights,
        }
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn angle_count(&self) -> usize {
        2 * self.p + 1
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn rule(&self) -> QuadRule {
        let na = self.angle_count();
        let mut points = Vec::with_capacity(2 * na * (self.p + 1));
        let mut weights = Vec::with_capacity(na * (self.p + 1));
        for (r, w) in self.radial_nodes.iter().zip(&self.radial_weights) {
            for m in 0..na {
                let (s, c) = (TAU * m as f64 / na as f64).sin_cos();
                points.extend([r * c, r * s]);
                weights.push(TAU / na as f64 * w * r);
            }
        }
        QuadRule {
            dim: 2,
            points,
            weights,
        }
    }
}

/// `∫_{B₂} g ≈ (2π/(2p+1)) Σ_l Σ_m ω_l r_l ĝ(r_l, 2πm/(2p+1))`.
pub fn integrate_disk<F: Fn(f64, f64) -> f64>(g: F, q: &DiskQuadrature) -> f64 {
    let na = q.angle_count();
    let mut total = 0.0;
    for (r, w) in q.radial_nodes.iter().zip(&q.radial_weights) {
        let mut ring = 0.0;
        for m in 0..na {
            let (s, c) = (TAU * m as f64 / na as f64).sin_cos();
            ring += g(r * c, r * s);
        }
        total += w * r * ring;
    }
    TAU / na as f64 * total
}

/// Spherical product rule on the unit ball, exact for total degree `≤ 2p+1`:
/// `(p+2)`-point Gauss–Legendre in `r` with the `r²` weight, `(p+1)`-point
/// Gauss–Legendre in `cos θ`, and `2p+2` equispaced azimuths.
#[derive(Debug, Clone)]
pub struct BallQuadrature {
    p: usize,
    radial: (Vec<f64>, Vec<f64>),
    polar: (Vec<f64>, Vec<f64>),
}

impl BallQuadrature {
    pub fn new(p: usize) -> Self {
        let radial = gauss_legendre_01(p + 2).expect("nonzero");
        let polar = gauss_legendre_01(p + 1).expect("nonzero");
        Self { p, radial, polar }
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn radial_count(&self) -> usize {
        self.radial.0.len()
    }

    pub fn rule(&self) -> QuadRule {
        let na = 2 * self.p + 2;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (r, wr) in self.radial.0.iter().zip(&self.radial.1) {
            for (s, ws) in self.polar.0.iter().zip(&self.polar.1) {
                let t = 2.0 * s - 1.0;
                let st = (1.0 - t * t).sqrt();
                for m in 0..na {
                    let (sp, cp) = (TAU * m as f64 / na as f64).sin_cos();
                    points.extend([r * st * cp, r * st * sp, r * t]);
                    weights.push(wr * r * r * 2.0 * ws * TAU / na as f64);
                }
            }
        }
        QuadRule {
            dim: 3,
            points,
            weights,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn gauss_legendre_small_rules() {
        assert!(gauss_legendre_01(0).is_err());
        let (x, w) = gauss_legendre_01(1).unwrap();
        assert_eq!((x[0], w[0]), (0.5, 1.0));

        // closed form of the 2-point rule mapped to [0, 1]
        let (x, w) = gauss_legendre_01(2).unwrap();
        let off = 0.5 / 3f64.sqrt();
        assert!((x[0] - (0.5 - off)).abs() < 1e-15 && (x[1] - (0.5 + off)).abs() < 1e-15);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);

        let (x, w) = gauss_legendre_01(5).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 1.0 / 9.0).abs() <= 1e-15, "{}", s - 1.0 / 9.0);
    }

    #[test]
    fn gauss_legendre_exactness_and_weight_sum() {
        for count in 1..30 {
            let (x, w) = gauss_legendre_01(count).unwrap();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..2 * count {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "count {count} deg {deg}");
            }
        }
    }

    #[test]
    fn disk_integration_examples() {
        let q = DiskQuadrature::new(4);
        assert!((integrate_disk(|_, _| 1.0, &q) - PI).abs() < 1e-14);
        assert!((integrate_disk(|x, _| x * x, &q) - PI / 4.0).abs() < 1e-13);
        for p in 2..6 {
            let q = DiskQuadrature::new(p);
            assert!(integrate_disk(|x, y| x.powi(3) * y, &q).abs() < 1e-14);
        }
        let rule = q.rule();
        assert!((rule.integrate(|x| x[0] * x[0]) - PI / 4.0).abs() < 1e-13);
    }

    /// ∫_{B₂} x^a y^b, zero unless both exponents are even.
    fn disk_monomial(a: u32, b: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 {
            return 0.0;
        }
        // 2 Γ((a+1)/2) Γ((b+1)/2) / ((a+b+2) Γ((a+b+2)/2))
        let g = |x: f64| gamma(x);
        2.0 * g((a as f64 + 1.0) / 2.0) * g((b as f64 + 1.0) / 2.0)
            / ((a + b + 2) as f64 * g((a + b + 2) as f64 / 2.0))
    }

    /// ∫_{B₃} x^a y^b z^c.
    fn ball_monomial(a: u32, b: u32, c: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        let (ha, hb, hc) = ((a as f64 + 1.0) / 2.0, (b as f64 + 1.0) / 2.0, (c as f64 + 1.0) / 2.0);
        2.0 * gamma(ha) * gamma(hb) * gamma(hc) / ((a + b + c + 3) as f64 * gamma(ha + hb + hc))
    }

    /// Gamma at integers and half integers, enough for monomial moments.
    fn gamma(x: f64) -> f64 {
        if (x - x.round()).abs() < 1e-12 {
            (1..x.round() as u64).map(|k| k as f64).product()
        } else {
            let mut v = PI.sqrt();
            let mut t = 0.5;
            while t < x - 1e-12 {
                v *= t;
                t += 1.0;
            }
            v
        }
    }

    #[test]
    fn disk_rule_exactness_battery() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let p = rng.random_range(1..10usize);
            let deg = rng.random_range(0..=2 * p as u32);
            let a = rng.random_range(0..=deg);
            let b = deg - a;
            let q = DiskQuadrature::new(p);
            let got = integrate_disk(|x, y| x.powi(a as i32) * y.powi(b as i32), &q);
            let want = disk_monomial(a, b);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "p {p} x^{a} y^{b}: {got} vs {want}");
        }
    }

    #[test]
    fn disk_rule_aliases_top_odd_harmonic() {
        // Re z^{2p+1} has zero integral, but the 2p+1 equispaced angles alias it
        // to a constant: the rule is exact through degree 2p, not 2p+1.
        let p = 3;
        let q = DiskQuadrature::new(p);
        let g = |x: f64, y: f64| {
            let (r, t) = ((x * x + y * y).sqrt(), y.atan2(x));
            r.powi(2 * p as i32 + 1) * ((2 * p + 1) as f64 * t).cos()
        };
        assert!(integrate_disk(g, &q).abs() > 1e-3);
    }

    #[test]
    fn ball_rule_exactness_battery() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let p = rng.random_range(1..8usize);
            let deg = rng.random_range(0..=2 * p as u32 + 1);
            let a = rng.random_range(0..=deg);
            let b = rng.random_range(0..=deg - a);
            let c = deg - a - b;
            let rule = BallQuadrature::new(p).rule();
            let got = rule.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32) * x[2].powi(c as i32));
            let want = ball_monomial(a, b, c);
            assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0), "p {p} ({a},{b},{c}): {got} vs {want}");
        }
        let vol = BallQuadrature::new(3).rule().integrate(|_| 1.0);
        assert!((vol - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
