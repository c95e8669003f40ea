//! Unconstrained minimizers: Nelder–Mead simplex search and BFGS.
//!
//! Both are deterministic and accept objectives that return `+inf` outside
//! their domain; such points are simply never accepted.

use serde::{Deserialize, Serialize};

use crate::optimize::objective::Objective;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Simplex,
    QuasiNewton,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Simplex => "simplex",
            Method::QuasiNewton => "quasi-newton",
        }
    }

    pub fn other(self) -> Self {
        match self {
            Method::Simplex => Method::QuasiNewton,
            Method::QuasiNewton => Method::Simplex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_iter: usize,
    /// Relative tolerance on objective values.
    pub rel_tol: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_iter: 500,
            rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `obj` from `x0`. `on_accept(x, f)` is called for every accepted
/// iterate (improved best point).
pub fn minimize(
    obj: &dyn Objective,
    x0: &[f64],
    method: Method,
    budget: Budget,
    on_accept: &mut dyn FnMut(&[f64], f64),
) -> Result<MinimizeResult> {
    match method {
        Method::Simplex => nelder_mead(obj, x0, budget, on_accept),
        Method::QuasiNewton => bfgs(obj, x0, budget, on_accept),
    }
}

fn start_value(obj: &dyn Objective, x0: &[f64]) -> Result<f64> {
    if x0.len() != obj.len() {
        return Err(Error::DimensionMismatch {
            expected: obj.len(),
            found: x0.len(),
        });
    }
    let f0 = obj.value(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(f0)
}

/// Adaptive Nelder–Mead (Gao–Han coefficients) with the initial simplex
/// `x0 + 0.05 x0_i e_i` (`0.00025` for zero entries).
pub fn nelder_mead(
    obj: &dyn Objective,
    x0: &[f64],
    budget: Budget,
    on_accept: &mut dyn FnMut(&[f64], f64),
) -> Result<MinimizeResult> {
    let f0 = start_value(obj, x0)?;
    let n = x0.len();
    if n == 0 {
        return Ok(MinimizeResult {
            x: Vec::new(),
            value: f0,
            iterations: 0,
            evaluations: 1,
            converged: true,
        });
    }
    let nf = n as f64;
    let (rho, chi, gamma, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut evals = 1;
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        let mut y = x0.to_vec();
        y[i] = if y[i] != 0.0 { 1.05 * y[i] } else { 0.00025 };
        let f = obj.value(&y);
        evals += 1;
        simplex.push((y, f));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);
    let mut best = simplex[0].1;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < budget.max_iter {
        let (fl, fh) = (simplex[0].1, simplex[n].1);
        let spread = (fh - fl).abs();
        let size = simplex[1..]
            .iter()
            .map(|(y, _)| y.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let xscale = simplex[0].0.iter().map(|v| v.abs()).fold(1.0, f64::max);
        if spread <= budget.rel_tol * fl.abs().max(1e-300) && size <= 1e3 * budget.rel_tol * xscale {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (y, _) in &simplex[..n] {
            for k in 0..n {
                centroid[k] += y[k] / nf;
            }
        }
        let worst = simplex[n].0.clone();
        let point = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (worst[k] - centroid[k])).collect() };
        let xr = point(-rho);
        let fr = obj.value(&xr);
        evals += 1;
        let sn1 = simplex[n - 1].1;
        if fr < fl {
            let xe = point(-rho * chi);
            let fe = obj.value(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < sn1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < fh {
                let xc = point(-rho * gamma);
                let fc = obj.value(&xc);
                (xc, fc)
            } else {
                let xc = point(gamma);
                let fc = obj.value(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < fr.min(fh) {
                simplex[n] = (xc, fc);
            } else {
                let x0 = simplex[0].0.clone();
                for (y, f) in simplex[1..].iter_mut() {
                    for k in 0..n {
                        y[k] = x0[k] + sigma * (y[k] - x0[k]);
                    }
                    *f = obj.value(y);
                }
                evals += n;
            }
        }
        order(&mut simplex);
        if simplex[0].1 < best {
            best = simplex[0].1;
            on_accept(&simplex[0].0, best);
        }
    }
    let (x, value) = simplex.swap_remove(0);
    Ok(MinimizeResult {
        x,
        value,
        iterations,
        evaluations: evals,
        converged,
    })
}

/// BFGS with an inverse-Hessian update and Armijo backtracking.
pub fn bfgs(
    obj: &dyn Objective,
    x0: &[f64],
    budget: Budget,
    on_accept: &mut dyn FnMut(&[f64], f64),
) -> Result<MinimizeResult> {
    start_value(obj, x0)?;
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = obj.value_grad(&x, &mut g);
    let mut evals = 1;
    let mut h = identity(n);
    let mut iterations = 0;
    let mut converged = false;
    let mut stalls = 0;
    while iterations < budget.max_iter {
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !gnorm.is_finite() || gnorm <= 1e-12 * f.abs().max(1.0) {
            converged = gnorm.is_finite();
            break;
        }
        iterations += 1;
        let mut p: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            // lost descent, restart from steepest descent
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let y: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let fy = obj.value(&y);
            evals += 1;
            if fy.is_finite() && fy <= f + 1e-4 * t * slope {
                accepted = Some((y, fy));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, _)) = accepted else {
            if h != identity(n) {
                h = identity(n);
                continue;
            }
            converged = true;
            break;
        };
        let mut gn = vec![0.0; n];
        let fnew = obj.value_grad(&xn, &mut gn);
        evals += 1;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        if sy > 1e-12 * s.iter().map(|v| v * v).sum::<f64>().sqrt() * yv.iter().map(|v| v * v).sum::<f64>().sqrt() {
            update_inverse_hessian(&mut h, &s, &yv, sy);
        }
        let rel = (f - fnew) / f.abs().max(1e-300);
        x = xn;
        g = gn;
        f = fnew;
        on_accept(&x, f);
        if rel <= budget.rel_tol {
            stalls += 1;
            if stalls >= 3 {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Ok(MinimizeResult {
        x,
        value: f,
        iterations,
        evaluations: evals,
        converged,
    })
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    (0..n).for_each(|i| h[i * n + i] = 1.0);
    h
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`, `ρ = 1/(yᵀ s)`.
fn update_inverse_hessian(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
