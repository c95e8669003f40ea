//! Objectives `G(δ)` over the free parameters of a [`ReducedParametrization`].
//!
//! Both objectives tabulate the reduced basis once, so that Jacobians and
//! images at the sample points are affine functions of `δ` that cost
//! `O((N−q) d²)` per point to evaluate.

use serde::Serialize;

use crate::basis::Basis;
use crate::field::{cofactor_row, det};
use crate::optimize::reduce::ReducedParametrization;
use crate::polymap::{boundary_samples, BasisTable, EvalGrid};
use crate::{exec, Error, Result};

/// A function of the free parameters, possibly `+inf` where undefined.
pub trait Objective: Sync {
    /// Number of free parameters.
    fn len(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Value and gradient. The default uses central differences with step
    /// `1e-6 max(1, |x_i|)`.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let f = self.value(x);
        let mut y = x.to_vec();
        for i in 0..x.len() {
            let h = fd_step(x[i]);
            y[i] = x[i] + h;
            let fp = self.value(&y);
            y[i] = x[i] - h;
            let fm = self.value(&y);
            y[i] = x[i];
            grad[i] = (fp - fm) / (2.0 * h);
        }
        f
    }
}

pub(crate) fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

impl<T: Objective + ?Sized> Objective for &T {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).value_grad(x, grad)
    }
}

/// Per-point affine data: `f(δ)_c = base[c] + Σ_k δ[c m + k] coef[k]`, where
/// `coef` is shared by all components.
#[derive(Debug, Clone)]
struct AffineTable {
    dim: usize,
    free: usize,
    /// Per point: `width` base values.
    base: Vec<f64>,
    /// Per point: `free x cols` coefficients.
    coef: Vec<f64>,
    /// Entries per component (1 for values, `dim` for Jacobian rows).
    cols: usize,
    len: usize,
}

impl AffineTable {
    /// `values = true` tabulates `Φ` itself, otherwise the Jacobian `DΦ`.
    fn new(rp: &ReducedParametrization, points: &[f64], values: bool) -> Self {
        let d = rp.dim();
        let table = BasisTable::new(rp.basis(), points);
        let n = table.size();
        let m = rp.free_per_component();
        let cols = if values { 1 } else { d };
        let particular = rp.particular();
        let null = rp.null_space();
        let len = table.len();
        let mut base = vec![0.0; len * d * cols];
        let mut coef = vec![0.0; len * m * cols];
        exec::fill_rows(&mut base, d * cols, |i, row| {
            if values {
                table.eval(i, &particular, row);
            } else {
                row.copy_from_slice(&table.jacobian(i, &particular));
            }
        });
        exec::fill_rows(&mut coef, m * cols, |i, row| {
            let src = if values { table.values(i) } else { table.gradients(i) };
            for k in 0..m {
                for j in 0..n {
                    let w = null[(j, k)];
                    for c in 0..cols {
                        row[k * cols + c] += w * src[j * cols + c];
                    }
                }
            }
        });
        Self {
            dim: d,
            free: m,
            base,
            coef,
            cols,
            len,
        }
    }

    /// Write the `dim x cols` block at point `i` for parameters `x`.
    fn eval(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let (d, m, w) = (self.dim, self.free, self.cols);
        out.copy_from_slice(&self.base[i * d * w..(i + 1) * d * w]);
        let coef = &self.coef[i * m * w..(i + 1) * m * w];
        for c in 0..d {
            let xc = &x[c * m..(c + 1) * m];
            let o = &mut out[c * w..(c + 1) * w];
            for (k, &xk) in xc.iter().enumerate() {
                let ck = &coef[k * w..(k + 1) * w];
                for e in 0..w {
                    o[e] += xk * ck[e];
                }
            }
        }
    }

    fn coef(&self, i: usize, k: usize) -> &[f64] {
        let (m, w) = (self.free, self.cols);
        &self.coef[(i * m + k) * w..(i * m + k + 1) * w]
    }
}

/// `Λ(δ) = max |det DΦ| / min |det DΦ|` over an [`EvalGrid`]. Returns `+inf`
/// when the determinant vanishes or changes sign on the grid, since the map
/// is then not injective.
#[derive(Debug, Clone)]
pub struct LambdaObjective {
    jac: AffineTable,
}

impl LambdaObjective {
    pub fn new(rp: &ReducedParametrization, grid: &EvalGrid) -> Result<Self> {
        if grid.dim() != rp.dim() {
            return Err(Error::DimensionMismatch {
                expected: rp.dim(),
                found: grid.dim(),
            });
        }
        if grid.is_empty() {
            return Err(Error::invalid("grid", "evaluation grid is empty"));
        }
        Ok(Self {
            jac: AffineTable::new(rp, grid.points(), false),
        })
    }

    fn dets_and_cofactors(&self, x: &[f64]) -> Vec<(f64, [f64; 9])> {
        let d = self.jac.dim;
        exec::map_indices(self.jac.len, |i| {
            let mut j = [0.0; 9];
            self.jac.eval(i, x, &mut j[..d * d]);
            let mut cof = [0.0; 9];
            for r in 0..d {
                cofactor_row(&j[..d * d], d, r, &mut cof[r * d..(r + 1) * d]);
            }
            (det(&j[..d * d], d), cof)
        })
    }
}

fn lambda_of(dets: impl Iterator<Item = f64>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in dets {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > 0.0 {
        hi / lo
    } else if hi < 0.0 {
        lo / hi
    } else {
        f64::INFINITY
    }
}

impl Objective for LambdaObjective {
    fn len(&self) -> usize {
        self.jac.free * self.jac.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = self.jac.dim;
        let dets = exec::map_indices(self.jac.len, |i| {
            let mut j = [0.0; 9];
            self.jac.eval(i, x, &mut j[..d * d]);
            det(&j[..d * d], d)
        });
        lambda_of(dets.into_iter())
    }

    /// Central differences. Moving `δ[c m + k]` changes only row `c` of each
    /// Jacobian, and the determinant is affine in each row, so the perturbed
    /// determinants follow exactly from the cofactors at `x`.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let (d, m) = (self.jac.dim, self.jac.free);
        let dc = self.dets_and_cofactors(x);
        let f = lambda_of(dc.iter().map(|p| p.0));
        let slopes: Vec<Vec<f64>> = exec::map_indices(d * m, |p| {
            let (c, k) = (p / m, p % m);
            (0..self.jac.len)
                .map(|i| {
                    let g = self.jac.coef(i, k);
                    let cof = &dc[i].1[c * d..(c + 1) * d];
                    (0..d).map(|e| g[e] * cof[e]).sum()
                })
                .collect()
        });
        for (p, s) in slopes.iter().enumerate() {
            let h = fd_step(x[p]);
            let fp = lambda_of(dc.iter().zip(s).map(|(a, b)| a.0 + h * b));
            let fm = lambda_of(dc.iter().zip(s).map(|(a, b)| a.0 - h * b));
            grad[p] = (fp - fm) / (2.0 * h);
        }
        f
    }
}

/// Parameters of the particle energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyConfig {
    /// Interior lattice spacing is `1/k1`.
    pub k1: f64,
    /// Number of boundary charges.
    pub l1: usize,
    /// Exponent of the inverse-power potential.
    pub alpha: f64,
}

/// Default exponent of the energy.
pub const ENERGY_ALPHA: f64 = 2.0;
/// `L₁ = 20 k₁` unless configured.
pub const L1_PER_K1: usize = 20;

impl EnergyConfig {
    /// The smallest integer `k1` whose lattice has at least `basis_size`
    /// points, `L₁ = 20 k₁` and `α = 2`.
    pub fn auto(dim: usize, basis_size: usize) -> Self {
        let mut k = 1usize;
        while lattice_points(dim, k as f64).len() / dim < basis_size {
            k += 1;
        }
        Self {
            k1: k as f64,
            l1: L1_PER_K1 * k,
            alpha: ENERGY_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return Err(Error::invalid("k1", format!("must be positive, got {}", self.k1)));
        }
        if self.l1 < 3 {
            return Err(Error::invalid("l1", format!("must be at least 3, got {}", self.l1)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// `(1/k) Z^d` inside the open unit ball, flattened, in lexicographic order.
pub fn lattice_points(dim: usize, k: f64) -> Vec<f64> {
    let r = k.floor() as i64 + 1;
    let mut out = Vec::new();
    let mut push = |p: &[f64]| {
        if p.iter().map(|v| v * v).sum::<f64>() < 1.0 {
            out.extend_from_slice(p);
        }
    };
    for i in -r..=r {
        for j in -r..=r {
            if dim == 2 {
                push(&[i as f64 / k, j as f64 / k]);
            } else {
                for l in -r..=r {
                    push(&[i as f64 / k, j as f64 / k, l as f64 / k]);
                }
            }
        }
    }
    out
}

/// Distances below this count as coincident images.
pub const COINCIDENT: f64 = 1e-14;

/// `Λ̃(δ) = Σ_{i≠j} |Φ(ξ_i) − Φ(ξ_j)|^{−α} + Σ_{i,j} |Φ(ξ_i) − Φ(ζ_j)|^{−α}` with
/// lattice points `ξ` and boundary points `ζ`. The first sum runs over
/// ordered pairs. In the plane the value is `+inf` when an interior image
/// leaves the boundary polygon (see [`EnergyObjective::escaped`]).
#[derive(Debug, Clone)]
pub struct EnergyObjective {
    config: EnergyConfig,
    interior: AffineTable,
    rim: AffineTable,
    interior_points: Vec<f64>,
    rim_points: Vec<f64>,
}

impl EnergyObjective {
    pub fn new(rp: &ReducedParametrization, config: EnergyConfig) -> Result<Self> {
        config.validate()?;
        let d = rp.dim();
        let interior_points = lattice_points(d, config.k1);
        if interior_points.is_empty() {
            return Err(Error::invalid("k1", "lattice has no interior points"));
        }
        let rim_points = boundary_samples(d, config.l1);
        Ok(Self {
            config,
            interior: AffineTable::new(rp, &interior_points, true),
            rim: AffineTable::new(rp, &rim_points, true),
            interior_points,
            rim_points,
        })
    }

    pub fn config(&self) -> &EnergyConfig {
        &self.config
    }

    /// `K₁`.
    pub fn interior_count(&self) -> usize {
        self.interior.len
    }

    /// `L₁`.
    pub fn rim_count(&self) -> usize {
        self.rim.len
    }

    pub fn interior_points(&self) -> &[f64] {
        &self.interior_points
    }

    pub fn rim_points(&self) -> &[f64] {
        &self.rim_points
    }

    /// Images of the interior and boundary charges.
    pub fn images(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.interior.dim;
        let mut y = vec![0.0; self.interior.len * d];
        exec::fill_rows(&mut y, d, |i, row| self.interior.eval(i, x, row));
        let mut w = vec![0.0; self.rim.len * d];
        exec::fill_rows(&mut w, d, |i, row| self.rim.eval(i, x, row));
        (y, w)
    }

    /// In the plane, whether some interior image lies outside the polygon
    /// through the boundary images. Such a configuration is treated as having
    /// infinite energy: a continuous boundary charge would never let a particle
    /// through, while the discrete ring leaves gaps.
    pub fn escaped(&self, y: &[f64], w: &[f64]) -> bool {
        if self.interior.dim != 2 {
            return false;
        }
        let outside = exec::map_indices(self.interior.len, |i| !inside_polygon(&y[2 * i..2 * i + 2], w));
        outside.into_iter().any(|o| o)
    }

    /// Per interior charge: its energy and `∂Λ̃/∂y_i`; plus `∂Λ̃/∂w_j` per rim charge.
    fn terms(&self, y: &[f64], w: &[f64], grad: bool) -> (f64, Vec<f64>, Vec<f64>) {
        let d = self.interior.dim;
        let a = self.config.alpha;
        let (k1, l1) = (self.interior.len, self.rim.len);
        let pair = |p: &[f64], q: &[f64]| -> (f64, [f64; 3]) {
            let mut diff = [0.0; 3];
            let mut r2 = 0.0;
            for c in 0..d {
                diff[c] = p[c] - q[c];
                r2 += diff[c] * diff[c];
            }
            if r2.sqrt() < COINCIDENT {
                return (f64::INFINITY, diff);
            }
            let e = r2.powf(-0.5 * a);
            (e, diff.map(|v| -a * e / r2 * v))
        };
        let width = if grad { 1 + d } else { 1 };
        let mut rows = vec![0.0; k1 * width];
        exec::fill_rows(&mut rows, width, |i, row| {
            let yi = &y[i * d..(i + 1) * d];
            let mut e_in = 0.0;
            let mut e_rim = 0.0;
            for j in 0..k1 {
                if j != i {
                    let (e, g) = pair(yi, &y[j * d..(j + 1) * d]);
                    e_in += e;
                    if grad {
                        // each unordered pair appears twice in the ordered sum
                        (0..d).for_each(|c| row[1 + c] += 2.0 * g[c]);
                    }
                }
            }
            for j in 0..l1 {
                let (e, g) = pair(yi, &w[j * d..(j + 1) * d]);
                e_rim += e;
                if grad {
                    (0..d).for_each(|c| row[1 + c] += g[c]);
                }
            }
            row[0] = e_in + e_rim;
        });
        let value = rows.chunks(width).map(|r| r[0]).sum::<f64>();
        let gy: Vec<f64> = if grad {
            rows.chunks(width).flat_map(|r| r[1..].to_vec()).collect()
        } else {
            Vec::new()
        };
        let mut gw = Vec::new();
        if grad {
            gw = vec![0.0; l1 * d];
            exec::fill_rows(&mut gw, d, |j, row| {
                let wj = &w[j * d..(j + 1) * d];
                for i in 0..k1 {
                    let (_, g) = pair(wj, &y[i * d..(i + 1) * d]);
                    (0..d).for_each(|c| row[c] += g[c]);
                }
            });
        }
        (value, gy, gw)
    }
}

impl Objective for EnergyObjective {
    fn len(&self) -> usize {
        self.interior.free * self.interior.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (y, w) = self.images(x);
        if self.escaped(&y, &w) {
            return f64::INFINITY;
        }
        self.terms(&y, &w, false).0
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let (d, m) = (self.interior.dim, self.interior.free);
        let (y, w) = self.images(x);
        let (value, gy, gw) = if self.escaped(&y, &w) {
            (f64::INFINITY, Vec::new(), Vec::new())
        } else {
            self.terms(&y, &w, true)
        };
        if !value.is_finite() {
            grad.iter_mut().for_each(|g| *g = f64::NAN);
            return value;
        }
        let g = exec::map_indices(d * m, |p| {
            let (c, k) = (p / m, p % m);
            let mut s = 0.0;
            for i in 0..self.interior.len {
                s += self.interior.coef(i, k)[0] * gy[i * d + c];
            }
            for j in 0..self.rim.len {
                s += self.rim.coef(j, k)[0] * gw[j * d + c];
            }
            s
        });
        grad.copy_from_slice(&g);
        value
    }
}

/// Even-odd test of `p` against the closed polygon with vertices `poly` (flattened pairs).
pub fn inside_polygon(p: &[f64], poly: &[f64]) -> bool {
    let n = poly.len() / 2;
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi, xj, yj) = (poly[2 * i], poly[2 * i + 1], poly[2 * j], poly[2 * j + 1]);
        if (yi > p[1]) != (yj > p[1]) && p[0] < xi + (p[1] - yi) * (xj - xi) / (yj - yi) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Reference evaluation of the energy of explicit images by a plain double loop.
pub fn energy_direct(interior: &[f64], rim: &[f64], dim: usize, alpha: f64) -> f64 {
    let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let (k1, l1) = (interior.len() / dim, rim.len() / dim);
    let mut total = 0.0;
    for i in 0..k1 {
        let p = &interior[i * dim..(i + 1) * dim];
        for j in 0..k1 {
            if i != j {
                total += dist(p, &interior[j * dim..(j + 1) * dim]).powf(-alpha);
            }
        }
        for j in 0..l1 {
            total += dist(p, &rim[j * dim..(j + 1) * dim]).powf(-alpha);
        }
    }
    total
}

/// [`EnergyConfig::auto`] for `basis`.
pub fn default_energy_config(basis: &Basis) -> EnergyConfig {
    EnergyConfig::auto(basis.dim(), basis.size())
}
