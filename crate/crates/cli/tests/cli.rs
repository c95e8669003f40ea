use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ballmap::polymap::{map_to_json, PolyMap};
use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ballmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballmap")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = ballmap(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = ballmap(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn cfg(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

fn num(v: &Value, path: &[&str]) -> f64 {
    let mut v = v;
    for k in path {
        v = &v[*k];
    }
    v.as_f64().unwrap_or_else(|| panic!("missing {path:?}"))
}

#[test]
fn ellipse_build_is_linear() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let r = ok(&["build", "--config", &cfg("ellipse_harmonic.json"), "--out", out.to_str().unwrap()]);
    assert!((num(&r, &["quality", "lambda"]) - 1.0).abs() <= 1e-9);
    assert!(out.exists());
    assert!(dir.path().join("m.report.json").exists());
}

#[test]
fn flower_build_reports_determinant_range() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let r = ok(&["build", "--config", &cfg("flower_harmonic.json"), "--out", out.to_str().unwrap()]);
    // the largest determinant sits on the boundary, where every grid agrees
    assert!((num(&r, &["quality", "det_max"]) / 75.314 - 1.0).abs() < 0.05);
    assert_eq!(num(&r, &["quality", "sign_flips"]), 0.0);
    assert_eq!(r["projection_order"], 30);
    assert_eq!(r["grid"]["points"], 989);
}

#[test]
fn config_errors_name_the_field() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let out = out.to_str().unwrap();
    let c = write(
        &dir,
        "unknown.json",
        r#"{"boundary":{"kind":"cassini","a":1.5},"method":{"kind":"blend","kappa":1,"omega":0.25},"n":3,"colour":1}"#,
    );
    assert!(fails(&["build", "--config", &c, "--out", out]).contains("colour"));
    let c = write(
        &dir,
        "omega.json",
        r#"{"boundary":{"kind":"cassini","a":1.5},"method":{"kind":"blend","kappa":1,"omega":0.5},"n":3}"#,
    );
    assert!(fails(&["build", "--config", &c, "--out", out]).contains("omega"));
    let c = write(
        &dir,
        "kappa.json",
        r#"{"boundary":{"kind":"cassini","a":1.5},"method":{"kind":"blend","kappa":-1,"omega":0.25},"n":3}"#,
    );
    assert!(fails(&["build", "--config", &c, "--out", out]).contains("kappa"));
    let c = write(
        &dir,
        "q.json",
        r#"{"boundary":{"kind":"cassini","a":1.5},"improve":{"q_n":9}}"#,
    );
    let m = write(&dir, "id.json", &map_to_json(&PolyMap::identity(2, 3).unwrap()).unwrap());
    assert!(fails(&["improve", "--config", &c, "--in", &m, "--out", out]).contains("q"));
    assert!(fails(&["build", "--config", "/nonexistent/config.json", "--out", out]).contains("config"));
}

#[test]
fn identity_grid_reproduces_circles_and_rays() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "id.json", &map_to_json(&PolyMap::identity(2, 2).unwrap()).unwrap());
    let c = write(&dir, "g.json", r#"{"grid":{"circles":2,"rays":4,"samples":32}}"#);
    let prefix = dir.path().join("grid");
    let out = ballmap(&["grid", "--config", &c, "--in", &m, "--out", prefix.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("curve_id,param,s,t"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let id = f[0] as usize;
        let (x, y) = if id <= 2 {
            let r = id as f64 / 2.0;
            (r * f[1].cos(), r * f[1].sin())
        } else {
            let t = std::f64::consts::TAU * (id - 3) as f64 / 4.0;
            (f[1] * t.cos(), f[1] * t.sin())
        };
        assert!((f[2] - x).abs() <= 1e-12 && (f[3] - y).abs() <= 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 6 * 33);
    let svg = std::fs::read_to_string(prefix.with_extension("svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 6);
    assert!(svg.contains(">s</text>") && svg.contains(">t</text>"));
}

#[test]
fn cassini_integral_grid_stays_inside_the_oval() {
    let dir = TempDir::new().unwrap();
    let map = dir.path().join("m.json");
    let r = ok(&["build", "--config", &cfg("cassini_integral.json"), "--out", map.to_str().unwrap()]);
    let err = num(&r, &["quality", "boundary_error"]);
    assert!(err < 1e-3);
    let prefix = dir.path().join("fig");
    let out = ballmap(&[
        "grid",
        "--config",
        &cfg("cassini_integral.json"),
        "--in",
        map.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    // implicit form of the oval: (s²+t²)² − 2(s²−t²) = a − 1
    let a = 1.5;
    let mut worst = f64::NEG_INFINITY;
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (s, t) = (f[2], f[3]);
        let r2 = s * s + t * t;
        let g = r2 * r2 - 2.0 * (s * s - t * t) - (a - 1.0);
        let grad = ((4.0 * r2 * s - 4.0 * s).powi(2) + (4.0 * r2 * t + 4.0 * t).powi(2)).sqrt();
        worst = worst.max(g / grad);
    }
    assert!(worst <= 2.0 * err, "outside by {worst:e}");
}

#[test]
fn blend_improvement_keeps_the_boundary() {
    let dir = TempDir::new().unwrap();
    let m0 = dir.path().join("m0.json");
    let m1 = dir.path().join("m1.json");
    let c = cfg("flower_blend_lambda.json");
    ok(&["build", "--config", &c, "--out", m0.to_str().unwrap()]);
    let r = ok(&["improve", "--config", &c, "--in", m0.to_str().unwrap(), "--out", m1.to_str().unwrap()]);
    assert!(num(&r, &["after", "lambda"]) <= 10.0);
    assert!(num(&r, &["after", "boundary_error"]) <= 1e-10);
    for s in r["trace"].as_array().unwrap() {
        assert!(s["max_residual"].as_f64().unwrap() <= 1e-10);
    }
    assert_eq!(r["constraints"]["count"], 7);
    let q = ok(&["quality", "--config", &c, "--in", m1.to_str().unwrap()]);
    assert!(num(&q, &["quality", "boundary_error"]) <= 1e-10);
    assert_eq!(num(&q, &["quality", "lambda"]), num(&r, &["after", "lambda"]));
}

#[test]
fn improve_is_reproducible_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let c = cfg("flower_energy.json");
    let m0 = dir.path().join("m0.json");
    ok(&["build", "--config", &c, "--out", m0.to_str().unwrap()]);
    let mut texts = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}.json"));
        let o = Command::new(env!("CARGO_BIN_EXE_ballmap"))
            .env("BALLMAP_THREADS", threads)
            .args(["improve", "--config", &c, "--in", m0.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["energy"]["K1"], 177);
        assert_eq!(report["energy"]["L1"], 160);
        texts.push((std::fs::read(&out).unwrap(), o.stdout));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_ballmap"))
        .env("BALLMAP_THREADS", "0")
        .args(["quality", "--config", &cfg("ellipse_harmonic.json")])
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("BALLMAP_THREADS"));
}

#[test]
fn identity_3d_quality_measures_are_one() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "id.json", &map_to_json(&PolyMap::identity(3, 2).unwrap()).unwrap());
    let c = write(
        &dir,
        "c.json",
        r#"{"boundary":{"kind":"sphere","radius":1.0},"quality":{"k":8,"l":3}}"#,
    );
    let r = ok(&["quality", "--config", &c, "--in", &m]);
    assert!((num(&r, &["quality", "e1"]) - 1.0).abs() < 1e-12);
    assert!((num(&r, &["quality", "e2"]) - 1.0).abs() < 1e-12);
    assert!((num(&r, &["quality", "lambda"]) - 1.0).abs() < 1e-12);
    assert_eq!(r["quality"]["k"], 8);
    assert_eq!(r["quality"]["l"], 3);

    let c = write(&dir, "nb.json", r#"{"quality":{"k":8,"l":3}}"#);
    assert!(fails(&["quality", "--config", &c, "--in", &m]).contains("boundary"));
}

#[test]
fn sphere_shells_are_written_per_radius() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "id.json", &map_to_json(&PolyMap::identity(3, 1).unwrap()).unwrap());
    let c = write(&dir, "c.json", r#"{"grid":{"shells":4,"sphere_k":6}}"#);
    let prefix = dir.path().join("shells");
    let out = ballmap(&["grid", "--config", &c, "--in", &m, "--out", prefix.to_str().unwrap()]);
    assert!(out.status.success());
    for i in 1..=4 {
        let csv = std::fs::read_to_string(dir.path().join(format!("shells-shell{i}.csv"))).unwrap();
        assert!(csv.starts_with("curve_id,param,s,t,u\n"));
        for line in csv.lines().skip(1) {
            let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            let r = (f[2] * f[2] + f[3] * f[3] + f[4] * f[4]).sqrt();
            assert!((r - i as f64 / 4.0).abs() < 1e-12);
        }
    }
}

#[test]
fn three_d_improve_uses_the_point_file() {
    let dir = TempDir::new().unwrap();
    let c = cfg("surface_cos2.json");
    let m0 = dir.path().join("m0.json");
    ok(&["build", "--config", &c, "--out", m0.to_str().unwrap()]);
    // a short schedule is enough to check the plumbing
    let short = write(
        &dir,
        "short.json",
        &format!(
            r#"{{"boundary":{{"kind":"star_spherical","terms":[{{"c":2.0}},{{"c":1.0,"p":2}}]}},
                "improve":{{"point_file":"{}","schedule":{{"stages":1,"max_iter":20,"first":"quasi-newton"}}}}}}"#,
            configs().join("../data/sphere_points_n6.txt").display()
        ),
    );
    let m1 = dir.path().join("m1.json");
    let r = ok(&["improve", "--config", &short, "--in", m0.to_str().unwrap(), "--out", m1.to_str().unwrap()]);
    assert_eq!(r["constraints"]["count"], 49);
    assert!(num(&r, &["constraints", "sigma_min"]) >= 0.5);
    assert!(num(&r, &["final_objective"]) <= num(&r, &["initial_objective"]));
    assert!(r["trace"][0]["max_residual"].as_f64().unwrap() <= 1e-10);
}
