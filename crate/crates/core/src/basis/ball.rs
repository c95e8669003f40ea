//! Orthonormal polynomial basis on the unit ball.
//!
//! Graded-lexicographic monomials `x^a y^b z^c`, `a+b+c ≤ n`, orthonormalized by
//! modified Gram–Schmidt (two passes) under [`BallQuadrature`] of order `n`,
//! which integrates every product of two basis candidates exactly.

use super::quadrature::BallQuadrature;

/// Number of trivariate polynomials of total degree `≤ n`.
pub fn ball_size(n: usize) -> usize {
    (n + 1) * (n + 2) * (n + 3) / 6
}

#[derive(Debug, Clone)]
pub struct BallBasis {
    degree: usize,
    exps: Vec<[usize; 3]>,
    /// Row `j` holds the monomial coefficients of `ψ_j` (lower triangular).
    coeffs: Vec<f64>,
}

fn graded_exponents(n: usize) -> Vec<[usize; 3]> {
    let mut exps = Vec::with_capacity(ball_size(n));
    for deg in 0..=n {
        for a in (0..=deg).rev() {
            for b in (0..=deg - a).rev() {
                exps.push([a, b, deg - a - b]);
            }
        }
    }
    exps
}

impl BallBasis {
    pub fn new(degree: usize) -> Self {
        let exps = graded_exponents(degree);
        let m = exps.len();
        let rule = BallQuadrature::new(degree).rule();
        let nq = rule.len();

        // columns: sqrt(w) * monomial values at the nodes
        let mut cols = vec![0.0; m * nq];
        for q in 0..nq {
            let x = rule.point(q);
            let sw = rule.weights()[q].sqrt();
            for (k, e) in exps.iter().enumerate() {
                cols[k * nq + q] = sw * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32);
            }
        }

        let mut coeffs = vec![0.0; m * m];
        for j in 0..m {
            let (done, rest) = cols.split_at_mut(j * nq);
            let v = &mut rest[..nq];
            let mut c = vec![0.0; m];
            c[j] = 1.0;
            for _pass in 0..2 {
                for i in 0..j {
                    let qi = &done[i * nq..(i + 1) * nq];
                    let proj: f64 = qi.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(qi).for_each(|(vv, qq)| *vv -= proj * qq);
                    for k in 0..=i {
                        c[k] -= proj * coeffs[i * m + k];
                    }
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            for k in 0..=j {
                coeffs[j * m + k] = c[k] / norm;
            }
        }
        Self { degree, exps, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.exps.len()
    }

    fn powers(&self, x: f64) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.degree + 1);
        let mut acc = 1.0;
        for _ in 0..=self.degree {
            p.push(acc);
            acc *= x;
        }
        p
    }

    pub fn eval_all(&self, x: &[f64], out: &mut [f64]) {
        let (px, py, pz) = (self.powers(x[0]), self.powers(x[1]), self.powers(x[2]));
        let mono: Vec<f64> = self.exps.iter().map(|e| px[e[0]] * py[e[1]] * pz[e[2]]).collect();
        let m = self.size();
        for (j, o) in out.iter_mut().enumerate().take(m) {
            let row = &self.coeffs[j * m..j * m + j + 1];
            *o = row.iter().zip(&mono).map(|(c, v)| c * v).sum();
        }
    }

    /// Values and gradients; `grads` holds `size() * 3` entries, row `j` = `∇ψ_j`.
    pub fn eval_grad_all(&self, x: &[f64], vals: &mut [f64], grads: &mut [f64]) {
        let (px, py, pz) = (self.powers(x[0]), self.powers(x[1]), self.powers(x[2]));
        let d = |p: &[f64], e: usize| if e == 0 { 0.0 } else { e as f64 * p[e - 1] };
        let m = self.size();
        let mut mono = vec![0.0; m];
        let mut dmono = vec![0.0; 3 * m];
        for (k, e) in self.exps.iter().enumerate() {
            mono[k] = px[e[0]] * py[e[1]] * pz[e[2]];
            dmono[3 * k] = d(&px, e[0]) * py[e[1]] * pz[e[2]];
            dmono[3 * k + 1] = px[e[0]] * d(&py, e[1]) * pz[e[2]];
            dmono[3 * k + 2] = px[e[0]] * py[e[1]] * d(&pz, e[2]);
        }
        for j in 0..m {
            let row = &self.coeffs[j * m..j * m + j + 1];
            let (mut v, mut gx, mut gy, mut gz) = (0.0, 0.0, 0.0, 0.0);
            for (k, c) in row.iter().enumerate() {
                v += c * mono[k];
                gx += c * dmono[3 * k];
                gy += c * dmono[3 * k + 1];
                gz += c * dmono[3 * k + 2];
            }
            vals[j] = v;
            grads[3 * j] = gx;
            grads[3 * j + 1] = gy;
            grads[3 * j + 2] = gz;
        }
    }
}
