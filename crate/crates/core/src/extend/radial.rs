//! Naive radial extension `Φ̃(x) = ρ̂(x̂) x` of a star-like surface.

use crate::boundary::BoundaryMap3D;
use crate::field::VectorField;

/// `ρ̂(x/|x|) x`, with value `0` at the origin.
pub fn radial_extend_3d(b: &BoundaryMap3D, x: &[f64]) -> [f64; 3] {
    if x[0] == 0.0 && x[1] == 0.0 && x[2] == 0.0 {
        return [0.0; 3];
    }
    let rho = b.radial(x);
    [rho * x[0], rho * x[1], rho * x[2]]
}

#[derive(Debug, Clone)]
pub struct RadialMap3D {
    boundary: BoundaryMap3D,
}

impl RadialMap3D {
    pub fn new(boundary: BoundaryMap3D) -> Self {
        Self { boundary }
    }
}

impl VectorField for RadialMap3D {
    fn dim(&self) -> usize {
        3
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out[..3].copy_from_slice(&radial_extend_3d(&self.boundary, x));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{fibonacci_sphere, SphericalTerm};

    #[test]
    fn radial_examples() {
        let b = BoundaryMap3D::star_spherical(vec![SphericalTerm::new(2.0, 0, 0, 0, 0), SphericalTerm::new(1.0, 2, 0, 0, 0)])
            .unwrap();
        assert_eq!(radial_extend_3d(&b, &[0.0; 3]), [0.0; 3]);
        let v = radial_extend_3d(&b, &[0.0, 0.0, 0.5]);
        assert!((v[2] - 1.5).abs() < 1e-15 && v[0] == 0.0 && v[1] == 0.0);
        for z in fibonacci_sphere(200) {
            let (v, w) = (radial_extend_3d(&b, &z), b.eval(&z));
            assert!((0..3).all(|k| (v[k] - w[k]).abs() < 1e-14));
        }
    }
}
