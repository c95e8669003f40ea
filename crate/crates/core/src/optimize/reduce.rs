//! Elimination of the interpolation conditions through the SVD of `A`.
//!
//! With `A = U C Vᵀ` and `β = Vᵀ α` (per spatial component), the conditions
//! read `C β = Uᵀ φ`. The first `q` entries `γ` of `β` are fixed by them and the
//! remaining `N − q` entries `δ` are free. Free parameters are stored
//! component-major: `δ[c (N−q) + k]`.

use nalgebra::{DMatrix, DVector};

use crate::basis::Basis;
use crate::optimize::constraints::ConstraintSet;
use crate::polymap::PolyMap;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ReducedParametrization {
    basis: Basis,
    dim: usize,
    q: usize,
    /// `V[:, q..]`, an orthonormal basis of the null space of `A` (`N x (N−q)`).
    null: DMatrix<f64>,
    /// `γ`, `q x dim`, column `c` for component `c`.
    gamma: DMatrix<f64>,
    /// `V[:, ..q] γ`: the minimum-norm coefficients meeting the conditions (`N x dim`).
    particular: DMatrix<f64>,
    singular_values: Vec<f64>,
}

impl ReducedParametrization {
    pub fn new(c: &ConstraintSet) -> Result<Self> {
        let a = c.matrix();
        let (q, n) = a.shape();
        let d = c.dim();
        // pad to a square matrix so the SVD also returns a null-space basis
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (q, n)).copy_from(a);
        let svd = padded.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        if !(sv[q - 1] >= super::constraints::RANK_TOL * sv[0]) {
            return Err(Error::RankDeficient {
                context: format!("{q} conditions on a basis of size {n}"),
                sigma_min: sv[q - 1],
                sigma_max: sv[0],
            });
        }
        let v = DMatrix::from_fn(n, n, |r, k| vt[(order[k], r)]);
        let targets = DMatrix::from_row_slice(q, d, c.targets());
        let mut gamma = DMatrix::zeros(q, d);
        for k in 0..q {
            // only the first q rows of the padded U carry A
            let uk = u.view((0, order[k]), (q, 1));
            for comp in 0..d {
                gamma[(k, comp)] = uk.dot(&targets.column(comp)) / sv[k];
            }
        }
        let vq = v.columns(0, q).into_owned();
        let particular = &vq * &gamma;
        Ok(Self {
            basis: c.basis().clone(),
            dim: d,
            q,
            null: v.columns(q, n - q).into_owned(),
            gamma,
            particular,
            singular_values: sv[..q].to_vec(),
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of conditions `q`.
    pub fn conditions(&self) -> usize {
        self.q
    }

    /// `N − q`, free parameters per component.
    pub fn free_per_component(&self) -> usize {
        self.null.ncols()
    }

    /// Total number of free parameters `(N − q) d`.
    pub fn free_len(&self) -> usize {
        self.null.ncols() * self.dim
    }

    pub fn null_space(&self) -> &DMatrix<f64> {
        &self.null
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Coefficients (row-major `N x dim`) of the minimum-norm constrained map.
    pub fn particular(&self) -> Vec<f64> {
        row_major(&self.particular)
    }

    /// `δ = V[:, q..]ᵀ α`.
    pub fn split(&self, map: &PolyMap) -> Result<Vec<f64>> {
        if map.basis().kind() != self.basis.kind() || map.degree() != self.basis.degree() {
            return Err(Error::invalid(
                "map",
                format!(
                    "basis {} of degree {} does not match the constraints ({} of degree {})",
                    map.basis().tag(),
                    map.degree(),
                    self.basis.tag(),
                    self.basis.degree()
                ),
            ));
        }
        let n = self.basis.size();
        let alpha = DMatrix::from_row_slice(n, self.dim, map.coeffs());
        let delta = self.null.transpose() * alpha;
        Ok((0..self.dim).flat_map(|c| delta.column(c).iter().copied().collect::<Vec<_>>()).collect())
    }

    /// `α = V[:, ..q] γ + V[:, q..] δ`, row-major `N x dim`.
    pub fn assemble_coeffs(&self, delta: &[f64]) -> Vec<f64> {
        assert_eq!(delta.len(), self.free_len(), "free parameter count");
        let m = self.free_per_component();
        let mut alpha = self.particular.clone();
        for c in 0..self.dim {
            let dc = DVector::from_column_slice(&delta[c * m..(c + 1) * m]);
            let mut col = alpha.column_mut(c);
            col.gemv(1.0, &self.null, &dc, 1.0);
        }
        row_major(&alpha)
    }

    pub fn assemble(&self, delta: &[f64]) -> PolyMap {
        PolyMap::new(self.basis.clone(), self.assemble_coeffs(delta)).expect("coefficient count matches basis")
    }

    /// `map` with the smallest coefficient change that meets the conditions.
    pub fn constrain(&self, map: &PolyMap) -> Result<PolyMap> {
        Ok(self.assemble(&self.split(map)?))
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}
