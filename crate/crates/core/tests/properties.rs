//! Randomized invariants of the public API.

use std::f64::consts::TAU;

use ballmap::basis::Basis;
use ballmap::boundary::{BoundaryMap2D, BoundaryMap3D, SphericalTerm, TrigPoly};
use ballmap::exec;
use ballmap::extend::{chord_frame, harmonic_extend_2d, IntegralMap2D, SmoothBlendMap};
use ballmap::field::{fd_jacobian, VectorField, FD_STEP};
use ballmap::optimize::{
    build_constraints_2d, build_constraints_3d, extremal_points, EnergyConfig, EnergyObjective, Objective, ReducedParametrization,
};
use ballmap::pipeline::{build_polymap, InitialMethod};
use ballmap::polymap::{boundary_error, lambda_ratio, map_from_json, map_to_json, EvalGrid, PolyMap};
use ballmap::quality::{CubeBallGrid, SphereGrid};
use proptest::prelude::*;

fn flower() -> BoundaryMap2D {
    BoundaryMap2D::star_trig(TrigPoly::new(5.0, vec![1.0], vec![0.0, 2.0])).unwrap()
}

fn random_map(dim: usize, n: usize, coeffs: &[f64]) -> PolyMap {
    let basis = Basis::for_dim(dim, n).unwrap();
    let len = dim * basis.size();
    PolyMap::new(basis, coeffs.iter().cycle().take(len).copied().collect()).unwrap()
}

/// Winding number of the closed polygon `w` around `p`.
fn winding(p: &[f64], w: &[Vec<f64>]) -> i64 {
    let mut total = 0.0;
    for j in 0..w.len() {
        let (a, b) = (&w[j], &w[(j + 1) % w.len()]);
        let d = (b[1] - p[1]).atan2(b[0] - p[0]) - (a[1] - p[1]).atan2(a[0] - p[0]);
        total += (d + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    }
    (total / TAU).round() as i64
}

fn polar(r: f64, t: f64) -> [f64; 2] {
    [r * t.cos(), r * t.sin()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_ends_lie_on_the_circle(r in 0.0..0.999f64, alpha in 0.0..TAU, theta in 0.0..TAU) {
        let f = chord_frame(polar(r, alpha), theta).unwrap();
        let eta = [theta.cos(), theta.sin()];
        let plus = [f.p[0] + f.r_plus * eta[0], f.p[1] + f.r_plus * eta[1]];
        let minus = [f.p[0] - f.r_minus * eta[0], f.p[1] - f.r_minus * eta[1]];
        prop_assert!((plus[0].hypot(plus[1]) - 1.0).abs() <= 1e-12);
        prop_assert!((minus[0].hypot(minus[1]) - 1.0).abs() <= 1e-12);
        let s = (theta - alpha).sin();
        prop_assert!((f.r_plus + f.r_minus - 2.0 * (1.0 - r * r * s * s).sqrt()).abs() <= 1e-12);
        prop_assert!(f.r_plus > 0.0 && f.r_minus > 0.0);
    }

    #[test]
    fn blend_sections_increase(theta in 0.0..TAU, kappa in 0.1..3.0f64, frac in 0.05..0.95f64) {
        let b = BoundaryMap2D::cassini(1.5).unwrap();
        let omega0 = ballmap::boundary::Boundary::from(b.clone()).min_radius().unwrap();
        let f = SmoothBlendMap::new(b.clone(), kappa, frac * omega0).unwrap();
        let mut last = 0.0;
        for i in 1..=100 {
            let v = f.eval(&polar(i as f64 / 100.0, theta));
            let len = v[0].hypot(v[1]);
            prop_assert!(len > last, "section not increasing at r = {}", i as f64 / 100.0);
            last = len;
        }
        let rim = f.eval(&polar(1.0, theta));
        let want = b.eval(theta);
        prop_assert!((rim[0] - want[0]).abs() <= 1e-12 && (rim[1] - want[1]).abs() <= 1e-12);
    }

    #[test]
    fn harmonic_extension_is_harmonic(r in 0.05..0.9f64, t in 0.0..TAU) {
        let h = harmonic_extend_2d(&flower(), 6, 64).unwrap();
        let x = polar(r, t);
        let step = 1e-3;
        let c = h.eval(&x);
        let mut lap = [-4.0 * c[0], -4.0 * c[1]];
        for d in [[step, 0.0], [-step, 0.0], [0.0, step], [0.0, -step]] {
            let v = h.eval(&[x[0] + d[0], x[1] + d[1]]);
            lap[0] += v[0];
            lap[1] += v[1];
        }
        prop_assert!(lap[0].abs() / (step * step) <= 1e-4 && lap[1].abs() / (step * step) <= 1e-4);
    }

    #[test]
    fn integral_operator_restricts_to_the_boundary(theta in 0.0..TAU, a in 1.1..3.0f64) {
        let b = BoundaryMap2D::cassini(a).unwrap();
        let e = IntegralMap2D::new(b.clone(), 128).unwrap();
        let (v, w) = (e.eval(&polar(1.0, theta)), b.eval(theta));
        prop_assert!((v[0] - w[0]).hypot(v[1] - w[1]) <= 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences(
        coeffs in proptest::collection::vec(-1.0..1.0f64, 8..40),
        x in proptest::collection::vec(-0.55..0.55f64, 3),
        three in any::<bool>(),
    ) {
        let dim = if three { 3 } else { 2 };
        let m = random_map(dim, if three { 4 } else { 6 }, &coeffs);
        let j = m.jacobian(&x[..dim]);
        let f = fd_jacobian(&m, &x[..dim], FD_STEP);
        let scale = j.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in j.iter().zip(&f) {
            prop_assert!((a - b).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn map_files_round_trip_bitwise(coeffs in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..30)) {
        let m = random_map(2, 4, &coeffs);
        let back = map_from_json(&map_to_json(&m).unwrap()).unwrap();
        prop_assert_eq!(back.degree(), m.degree());
        for (a, b) in back.coeffs().iter().zip(m.coeffs()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn lambda_is_scale_invariant(c in 1e-3..1e3f64) {
        let m = build_polymap(&flower().into(), &InitialMethod::Harmonic { nodes: 16 }, 3, None).unwrap();
        let grid = EvalGrid::disk(10, 64);
        let (a, b) = (lambda_ratio(&m, &grid).unwrap(), lambda_ratio(&m.scaled(c), &grid).unwrap());
        prop_assert!((a.lambda / b.lambda - 1.0).abs() <= 1e-12);
        prop_assert_eq!(a.sign_flips, b.sign_flips);
    }

    #[test]
    fn refining_the_grid_widens_the_determinant_range(p in 4usize..12, extra in 8usize..64) {
        let m = build_polymap(&flower().into(), &InitialMethod::Blend { kappa: 0.5, omega: 1.0 }, 3, None).unwrap();
        let coarse = EvalGrid::disk(p, 32);
        let fine = coarse.union(&EvalGrid::disk(p + 3, extra)).unwrap();
        let (a, b) = (lambda_ratio(&m, &coarse).unwrap(), lambda_ratio(&m, &fine).unwrap());
        prop_assert!(b.det_max >= a.det_max && b.det_min <= a.det_min && b.lambda >= a.lambda);
    }

    #[test]
    fn grids_stay_in_the_closed_ball(p in 1usize..20, rim in 0usize..50, three in any::<bool>()) {
        let g = if three { EvalGrid::ball(p, rim, 0.999) } else { EvalGrid::disk(p, rim) };
        let d = g.dim();
        let want = if three { 3 } else { 2 };
        for i in 0..g.len() {
            let x = g.point(i);
            prop_assert!(x.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1.0 + 1e-14);
        }
        prop_assert!(g.len() >= rim && d == want);
    }

    #[test]
    fn sequential_and_parallel_paths_agree(coeffs in proptest::collection::vec(-1.0..1.0f64, 8..40)) {
        let m = random_map(2, 5, &coeffs);
        let grid = EvalGrid::disk(12, 64);
        exec::set_sequential(true);
        let a = lambda_ratio(&m, &grid).unwrap();
        exec::set_sequential(false);
        let b = lambda_ratio(&m, &grid).unwrap();
        prop_assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
        prop_assert_eq!(a.det_min.to_bits(), b.det_min.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_delta_interpolates_in_two_dimensions(delta in proptest::collection::vec(-20.0..20.0f64, 64)) {
        let b = flower();
        let cons = build_constraints_2d(&b.clone().into(), &Basis::for_dim(2, 6).unwrap(), 13).unwrap();
        let rp = ReducedParametrization::new(&cons).unwrap();
        let m = rp.assemble(&delta[..rp.free_len()]);
        prop_assert!(cons.residual(&m) <= 1e-10);
        // 13 nodes on a degree-2 boundary pin the whole rim
        prop_assert!(boundary_error(&m, &b.into(), 256).unwrap() <= 1e-10);
    }

    #[test]
    fn every_delta_interpolates_in_three_dimensions(delta in proptest::collection::vec(-5.0..5.0f64, 40)) {
        let b = BoundaryMap3D::star_spherical(vec![SphericalTerm::new(2.0, 0, 0, 0, 0), SphericalTerm::new(1.0, 2, 0, 0, 0)]).unwrap();
        let basis = Basis::for_dim(3, 3).unwrap();
        let pts = extremal_points(&basis, 50).unwrap();
        let cons = build_constraints_3d(&b.into(), &basis, &pts).unwrap();
        let rp = ReducedParametrization::new(&cons).unwrap();
        let mut d = delta.clone();
        d.resize(rp.free_len(), 0.5);
        prop_assert!(cons.residual(&rp.assemble(&d)) <= 1e-10);
    }

    #[test]
    fn energy_matches_pairwise_sum(delta in proptest::collection::vec(-0.05..0.05f64, 64), k1 in 2.0..4.0f64) {
        let b = flower();
        let cons = build_constraints_2d(&b.clone().into(), &Basis::for_dim(2, 3).unwrap(), 7).unwrap();
        let rp = ReducedParametrization::new(&cons).unwrap();
        let cfg = EnergyConfig { k1, l1: 160, alpha: 2.0 };
        let obj = EnergyObjective::new(&rp, cfg).unwrap();
        let m0 = build_polymap(&b.into(), &InitialMethod::Blend { kappa: 0.5, omega: 1.0 }, 3, None).unwrap();
        let mut x = rp.split(&m0).unwrap();
        for (v, d) in x.iter_mut().zip(&delta) {
            *v += d;
        }
        let map = rp.assemble(&x);
        let mut y = Vec::new();
        let r = k1.ceil() as i64;
        for i in -r..=r {
            for j in -r..=r {
                let p = [i as f64 / k1, j as f64 / k1];
                if p[0] * p[0] + p[1] * p[1] < 1.0 {
                    y.push(map.eval(&p));
                }
            }
        }
        let w: Vec<Vec<f64>> = (0..160).map(|j| map.eval(&polar(1.0, TAU * j as f64 / 160.0))).collect();
        prop_assert_eq!(y.len(), obj.interior_count());
        let inv = |p: &[f64], q: &[f64]| 1.0 / ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2));
        let mut want = 0.0;
        for (i, p) in y.iter().enumerate() {
            for (j, q) in y.iter().enumerate() {
                if i != j {
                    want += inv(p, q);
                }
            }
            for q in &w {
                want += inv(p, q);
            }
        }
        let got = obj.value(&x);
        if y.iter().any(|p| winding(p, &w) == 0) {
            prop_assert_eq!(got, f64::INFINITY);
            return Ok(());
        }
        prop_assert!((got / want - 1.0).abs() <= 1e-12, "{} vs {}", got, want);
    }

    #[test]
    fn sphere_grid_points_are_distinct_unit_vectors(k in 2usize..30) {
        let g = SphereGrid::new(k).unwrap();
        prop_assert_eq!(g.len(), 2 * k * (k - 1) + 2);
        for p in g.points() {
            prop_assert!((p.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() <= 1e-12);
        }
        let near = g.points().iter().enumerate().any(|(i, p)| {
            g.points()[i + 1..].iter().any(|q| (0..3).map(|c| (p[c] - q[c]).powi(2)).sum::<f64>() < 1e-24)
        });
        prop_assert!(!near);
    }

    #[test]
    fn cube_grid_matches_enumeration(l in 1usize..14) {
        let g = CubeBallGrid::new(l).unwrap();
        let li = l as i64;
        let mut count = 0;
        for i in -li..=li {
            for j in -li..=li {
                for k in -li..=li {
                    count += usize::from(i * i + j * j + k * k <= li * li);
                }
            }
        }
        prop_assert_eq!(g.len(), count);
        prop_assert!(g.points().iter().all(|p| p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-14));
    }
}
