//! Logan–Shepp ridge polynomials on the unit disk.
//!
//! For degree `m` and `k = 0..=m`, `ψ_{m,k}(x) = U_m(x · ξ_{m,k}) / sqrt(π)` with
//! `ξ_{m,k} = (cos(kπ/(m+1)), sin(kπ/(m+1)))` and `U_m` the Chebyshev polynomial
//! of the second kind. Functions are ordered degree-major, then by `k`.

use std::f64::consts::PI;

/// Number of bivariate polynomials of total degree `≤ n`.
pub fn disk_size(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

#[derive(Debug, Clone)]
pub struct DiskBasis {
    degree: usize,
    /// `(m, cos θ_{m,k}, sin θ_{m,k})` per basis function.
    ridges: Vec<(usize, f64, f64)>,
}

/// `(U_m(t), U_m'(t))` by the three-term recurrence.
fn chebyshev_u(m: usize, t: f64) -> (f64, f64) {
    let (mut u0, mut u1) = (1.0, 2.0 * t);
    let (mut d0, mut d1) = (0.0, 2.0);
    if m == 0 {
        return (1.0, 0.0);
    }
    for _ in 1..m {
        let u2 = 2.0 * t * u1 - u0;
        let d2 = 2.0 * u1 + 2.0 * t * d1 - d0;
        u0 = u1;
        u1 = u2;
        d0 = d1;
        d1 = d2;
    }
    (u1, d1)
}

impl DiskBasis {
    pub fn new(degree: usize) -> Self {
        let mut ridges = Vec::with_capacity(disk_size(degree));
        for m in 0..=degree {
            for k in 0..=m {
                let (s, c) = (k as f64 * PI / (m + 1) as f64).sin_cos();
                ridges.push((m, c, s));
            }
        }
        Self { degree, ridges }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.ridges.len()
    }

    /// Degree of basis function `j` (0-based).
    pub fn function_degree(&self, j: usize) -> usize {
        self.ridges[j].0
    }

    pub fn eval_all(&self, x: &[f64], out: &mut [f64]) {
        let norm = 1.0 / PI.sqrt();
        for (o, &(m, c, s)) in out.iter_mut().zip(&self.ridges) {
            *o = norm * chebyshev_u(m, x[0] * c + x[1] * s).0;
        }
    }

    /// Values and gradients; `grads` holds `size() * 2` entries, row `j` = `∇ψ_j`.
    pub fn eval_grad_all(&self, x: &[f64], vals: &mut [f64], grads: &mut [f64]) {
        let norm = 1.0 / PI.sqrt();
        for (j, &(m, c, s)) in self.ridges.iter().enumerate() {
            let (u, du) = chebyshev_u(m, x[0] * c + x[1] * s);
            vals[j] = norm * u;
            grads[2 * j] = norm * du * c;
            grads[2 * j + 1] = norm * du * s;
        }
    }
}
