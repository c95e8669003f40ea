//! Vector fields on the closed unit ball, the common currency between the
//! extension constructors, projection, and the finite-difference Jacobian.

/// A map from (a subset of) `R^d` into `R^d`.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;

    fn eval_into(&self, x: &[f64], out: &mut [f64]);

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).eval_into(x, out)
    }
}

impl<T: VectorField + ?Sized> VectorField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).eval_into(x, out)
    }
}

/// Adapter turning a closure into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// The identity map on `R^d`.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl VectorField for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&x[..self.0]);
    }
}

/// Step used by [`fd_jacobian`].
pub const FD_STEP: f64 = 1e-6;

/// Finite-difference Jacobian (row-major, `d x d`) of `field` at `x`.
///
/// Central differences with step `h`; within `2h` of the unit sphere each
/// coordinate uses a one-sided difference pointing into the ball.
pub fn fd_jacobian(field: &dyn VectorField, x: &[f64], h: f64) -> Vec<f64> {
    let d = field.dim();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let near_rim = norm > 1.0 - 2.0 * h;
    let mut jac = vec![0.0; d * d];
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; d];
    let mut fm = vec![0.0; d];
    for j in 0..d {
        if near_rim {
            let sign = if x[j] > 0.0 { -1.0 } else { 1.0 };
            field.eval_into(x, &mut fm);
            xp[j] = x[j] + sign * h;
            field.eval_into(&xp, &mut fp);
            for i in 0..d {
                jac[i * d + j] = sign * (fp[i] - fm[i]) / h;
            }
        } else {
            xp[j] = x[j] + h;
            field.eval_into(&xp, &mut fp);
            xp[j] = x[j] - h;
            field.eval_into(&xp, &mut fm);
            for i in 0..d {
                jac[i * d + j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        xp[j] = x[j];
    }
    jac
}

/// Determinant of a row-major 2x2 or 3x3 matrix.
pub fn det(m: &[f64], d: usize) -> f64 {
    match d {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => panic!("determinant only implemented for d <= 3"),
    }
}

/// Row `r` of the cofactor matrix, so that `det = Σ_j m[r][j] * cof[j]`.
pub(crate) fn cofactor_row(m: &[f64], d: usize, r: usize, cof: &mut [f64]) {
    match d {
        2 => {
            if r == 0 {
                cof[0] = m[3];
                cof[1] = -m[2];
            } else {
                cof[0] = -m[1];
                cof[1] = m[0];
            }
        }
        3 => {
            let (a, b) = match r {
                0 => (1, 2),
                1 => (2, 0),
                _ => (0, 1),
            };
            // Cyclic ordering of the other two rows keeps the signs uniform.
            for j in 0..3 {
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                cof[j] = m[a * 3 + j1] * m[b * 3 + j2] - m[a * 3 + j2] * m[b * 3 + j1];
            }
        }
        _ => panic!("cofactors only implemented for d in 2..=3"),
    }
}
