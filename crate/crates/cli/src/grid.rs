//! Image-grid export: CSV rows `(curve_id, param, s, t[, u])` and an SVG
//! rendering of the planar case.

use std::f64::consts::TAU;
use std::fmt::Write;

use ballmap::field::VectorField;
use ballmap::quality::SphereGrid;

pub struct Curve {
    pub id: usize,
    /// `(param, image point)` samples.
    pub points: Vec<(f64, Vec<f64>)>,
}

/// Images of the circles `r = j/circles` (ids `1..=circles`, param `θ`) and of
/// the rays `θ = 2πk/rays` (ids `circles+1..`, param `r`).
pub fn image_curves_2d(map: &dyn VectorField, circles: usize, rays: usize, samples: usize) -> Vec<Curve> {
    let mut out = Vec::with_capacity(circles + rays);
    for j in 1..=circles {
        let r = j as f64 / circles as f64;
        let points = (0..=samples)
            .map(|i| {
                let t = TAU * i as f64 / samples as f64;
                (t, map.eval(&[r * t.cos(), r * t.sin()]))
            })
            .collect();
        out.push(Curve { id: j, points });
    }
    for k in 0..rays {
        let t = TAU * k as f64 / rays as f64;
        let points = (0..=samples)
            .map(|i| {
                let r = i as f64 / samples as f64;
                (r, map.eval(&[r * t.cos(), r * t.sin()]))
            })
            .collect();
        out.push(Curve {
            id: circles + 1 + k,
            points,
        });
    }
    out
}

/// Image of `radius · S²` sampled on `sphere`; param is the sphere point index.
pub fn image_shell_3d(map: &dyn VectorField, sphere: &SphereGrid, radius: f64, id: usize) -> Vec<Curve> {
    let points = sphere
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (i as f64, map.eval(&[radius * p[0], radius * p[1], radius * p[2]])))
        .collect();
    vec![Curve { id, points }]
}

pub fn curves_csv(curves: &[Curve], dim: usize) -> String {
    let mut s = String::from(if dim == 2 { "curve_id,param,s,t\n" } else { "curve_id,param,s,t,u\n" });
    for c in curves {
        for (param, y) in &c.points {
            write!(s, "{},{:.16e}", c.id, param).unwrap();
            for v in y {
                write!(s, ",{v:.16e}").unwrap();
            }
            s.push('\n');
        }
    }
    s
}

/// Polylines in `(s, t)` coordinates with labeled axes.
pub fn curves_svg(curves: &[Curve]) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in curves {
        for (_, y) in &c.points {
            for k in 0..2 {
                lo[k] = lo[k].min(y[k]);
                hi[k] = hi[k].max(y[k]);
            }
        }
    }
    // axes through the origin must stay visible
    for k in 0..2 {
        lo[k] = lo[k].min(0.0);
        hi[k] = hi[k].max(0.0);
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let size = 600.0;
    let margin = 40.0;
    let scale = (size - 2.0 * margin) / span;
    let px = |s: f64| margin + (s - lo[0]) * scale;
    let py = |t: f64| size - margin - (t - lo[1]) * scale;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    let (x0, y0) = (px(0.0), py(0.0));
    writeln!(
        out,
        r#"<line x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="gray" stroke-width="0.8"/>"#,
        px(lo[0]),
        px(hi[0])
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{x0:.2}" y1="{:.2}" x2="{x0:.2}" y2="{:.2}" stroke="gray" stroke-width="0.8"/>"#,
        py(lo[1]),
        py(hi[1])
    )
    .unwrap();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="16">s</text>"#, px(hi[0]) + 6.0, y0 + 5.0).unwrap();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="16">t</text>"#, x0 - 4.0, py(hi[1]) - 8.0).unwrap();
    for c in curves {
        out.push_str(r#"<polyline fill="none" stroke="black" stroke-width="0.7" points=""#);
        for (i, (_, y)) in c.points.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{:.3},{:.3}", px(y[0]), py(y[1])).unwrap();
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ballmap::polymap::PolyMap;

    #[test]
    fn identity_curves_are_unchanged() {
        let m = PolyMap::identity(2, 2).unwrap();
        let curves = image_curves_2d(&m, 2, 4, 16);
        assert_eq!(curves.len(), 6);
        for c in &curves[..2] {
            let r = c.id as f64 / 2.0;
            for (t, y) in &c.points {
                assert!((y[0] - r * t.cos()).abs() < 1e-12 && (y[1] - r * t.sin()).abs() < 1e-12);
            }
        }
        for (k, c) in curves[2..].iter().enumerate() {
            let t = TAU * k as f64 / 4.0;
            for (r, y) in &c.points {
                assert!((y[0] - r * t.cos()).abs() < 1e-12 && (y[1] - r * t.sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_has_full_precision() {
        let c = Curve {
            id: 3,
            points: vec![(0.1, vec![1.0 / 3.0, -2.0])],
        };
        let text = curves_csv(&[c], 2);
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "3");
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        // 17 significant digits: one before the point, sixteen after
        assert_eq!(row[2].split('e').next().unwrap().len(), 18);
    }
}
