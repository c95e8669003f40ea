use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ballmap::boundary::Boundary;
use ballmap::optimize::{
    build_constraints_2d, build_constraints_3d, extremal_points, improve_reduced, lattice_points, read_points,
    ConstraintSet, EnergyConfig, EnergyObjective, LambdaObjective, Method, Objective, ReducedParametrization,
    StageRecord,
};
use ballmap::pipeline::{build_polymap, default_projection_order};
use ballmap::polymap::{
    boundary_error, lambda_ratio, load_map, save_map, to_json_full_precision, EvalGrid, PolyMap,
    QualityReport,
};
use ballmap::quality::{boundary_modulus, injectivity_measure, into_measure, CubeBallGrid, SphereGrid};
use serde::Serialize;

use crate::config::{GridSpec, MethodConfig, ObjectiveKind, RunConfig, ScheduleConfig};
use crate::grid;

/// Iterations of the point optimizer when no point file is configured.
const GENERATED_POINT_ITERATIONS: usize = 500;

#[derive(Serialize)]
struct GridEcho {
    order: usize,
    rim: usize,
    points: usize,
}

#[derive(Serialize)]
struct BuildReport<'a> {
    command: &'static str,
    dim: usize,
    n: usize,
    basis_size: usize,
    method: &'a MethodConfig,
    projection_order: usize,
    grid: GridEcho,
    boundary_samples: usize,
    quality: QualityReport,
}

#[derive(Serialize)]
struct ConstraintEcho {
    count: usize,
    source: String,
    sigma_min: f64,
    sigma_max: f64,
}

#[derive(Serialize)]
struct EnergyEcho {
    k1: f64,
    #[serde(rename = "K1")]
    interior_points: usize,
    #[serde(rename = "L1")]
    rim_points: usize,
    alpha: f64,
}

#[derive(Serialize)]
struct ImproveReport {
    command: &'static str,
    dim: usize,
    n: usize,
    basis_size: usize,
    free_parameters: usize,
    objective: ObjectiveKind,
    first_method: Method,
    schedule: ScheduleConfig,
    constraints: ConstraintEcho,
    grid: GridEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<EnergyEcho>,
    boundary_samples: usize,
    initial_objective: f64,
    final_objective: f64,
    before: QualityReport,
    after: QualityReport,
    trace: Vec<StageRecord>,
}

#[derive(Serialize)]
struct QualityCommandReport {
    command: &'static str,
    dim: usize,
    n: usize,
    grid: GridEcho,
    boundary_samples: usize,
    quality: QualityReport,
    warnings: Vec<String>,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit_report<T: Serialize>(report: &T, path: Option<&Path>) -> Result<()> {
    let mut text = to_json_full_precision(report)?;
    text.push('\n');
    match path {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `foo.json` → `foo.report.json`.
fn sibling_report(map_path: &Path) -> PathBuf {
    let stem = map_path.file_stem().and_then(|s| s.to_str()).unwrap_or("map");
    map_path.with_file_name(format!("{stem}.report.json"))
}

fn map_output(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf> {
    match out.map(Path::to_path_buf).or_else(|| cfg.output.map.clone()) {
        Some(p) => Ok(p),
        None => bail!("no output path: pass --out or set `output.map`"),
    }
}

fn report_output(cfg: &RunConfig, map_path: &Path) -> PathBuf {
    cfg.output.report.clone().unwrap_or_else(|| sibling_report(map_path))
}

fn eval_grid(cfg: &RunConfig, dim: usize) -> Result<(GridSpec, EvalGrid)> {
    let spec = cfg.improve.grid.unwrap_or_else(|| GridSpec::standard(dim));
    let grid = spec.build(dim)?;
    Ok((spec, grid))
}

fn grid_echo(spec: GridSpec, grid: &EvalGrid) -> GridEcho {
    GridEcho {
        order: spec.order,
        rim: spec.rim,
        points: grid.len(),
    }
}

fn base_quality(map: &PolyMap, b: &Boundary, grid: &EvalGrid, samples: usize) -> Result<QualityReport> {
    Ok(QualityReport::new(lambda_ratio(map, grid)?, boundary_error(map, b, samples)?))
}

pub fn build(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let b = cfg.boundary()?;
    let Some(method) = &cfg.method else {
        bail!("missing field `method` required by build");
    };
    let Some(n) = cfg.n else {
        bail!("missing field `n` required by build");
    };
    let dim = b.dim();
    let p = cfg.projection_order.unwrap_or_else(|| default_projection_order(dim, n));
    let map = build_polymap(&b, &method.initial_method(), n, Some(p))?;
    let (spec, grid) = eval_grid(cfg, dim)?;
    let samples = cfg.quality.boundary_samples;
    let report = BuildReport {
        command: "build",
        dim,
        n,
        basis_size: map.basis().size(),
        method,
        projection_order: p,
        grid: grid_echo(spec, &grid),
        boundary_samples: samples,
        quality: base_quality(&map, &b, &grid, samples)?,
    };
    let path = map_output(cfg, out)?;
    save_map(&map, &path)?;
    emit_report(&report, Some(&report_output(cfg, &path)))?;
    emit_report(&report, None)
}

fn constraints(cfg: &RunConfig, b: &Boundary, map: &PolyMap) -> Result<(ConstraintSet, String)> {
    if b.dim() == 2 {
        if cfg.improve.point_file.is_some() {
            bail!("invalid parameter `improve.point_file`: only used for 3D boundaries");
        }
        let q = cfg.improve.q_n.unwrap_or(2 * map.degree() + 1);
        let c = build_constraints_2d(b, map.basis(), q).context("building interpolation conditions")?;
        Ok((c, "equispaced".to_string()))
    } else {
        if cfg.improve.q_n.is_some() {
            bail!("invalid parameter `improve.q_n`: 3D uses (n+1)^2 points from `improve.point_file`");
        }
        let (pts, source) = match cfg.point_file() {
            Some(path) => (read_points(&path)?, path.display().to_string()),
            None => (
                extremal_points(map.basis(), GENERATED_POINT_ITERATIONS)?,
                format!("generated ({GENERATED_POINT_ITERATIONS} iterations)"),
            ),
        };
        let c = build_constraints_3d(b, map.basis(), &pts).context("building interpolation conditions")?;
        Ok((c, source))
    }
}

pub fn improve(cfg: &RunConfig, input: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let Some(input) = input else {
        bail!("improve needs an input map (--in)");
    };
    let b = cfg.boundary()?;
    let map0 = load_map(input).with_context(|| format!("loading {}", input.display()))?;
    if map0.dim() != b.dim() {
        bail!("map is {}-dimensional but the boundary is {}-dimensional", map0.dim(), b.dim());
    }
    if let Some(n) = cfg.n {
        if n != map0.degree() {
            bail!("invalid parameter `n`: config says {n} but the input map has degree {}", map0.degree());
        }
    }
    let dim = b.dim();
    let schedule = cfg.improve.schedule.schedule()?;
    let (c, source) = constraints(cfg, &b, &map0)?;
    let rp = ReducedParametrization::new(&c)?;
    let (spec, grid) = eval_grid(cfg, dim)?;
    let samples = cfg.quality.boundary_samples;

    let (obj, energy): (Box<dyn Objective>, Option<EnergyConfig>) = match cfg.improve.objective {
        ObjectiveKind::Lambda => (Box::new(LambdaObjective::new(&rp, &grid)?), None),
        ObjectiveKind::Energy => {
            let e = cfg.improve.energy.resolve(dim, map0.basis().size())?;
            (Box::new(EnergyObjective::new(&rp, e)?), Some(e))
        }
    };
    let default_method = match cfg.improve.objective {
        ObjectiveKind::Lambda => Method::Simplex,
        ObjectiveKind::Energy => Method::QuasiNewton,
    };
    let delta0 = rp.split(&map0)?;
    let r = improve_reduced(&rp, &c, obj.as_ref(), &delta0, default_method, &schedule)?;

    let sv = c.singular_values();
    let report = ImproveReport {
        command: "improve",
        dim,
        n: map0.degree(),
        basis_size: map0.basis().size(),
        free_parameters: rp.free_len(),
        objective: cfg.improve.objective,
        first_method: schedule.first.unwrap_or(default_method),
        schedule: cfg.improve.schedule,
        constraints: ConstraintEcho {
            count: c.len(),
            source,
            sigma_min: c.sigma_min(),
            sigma_max: sv.first().copied().unwrap_or(0.0),
        },
        grid: grid_echo(spec, &grid),
        energy: energy.map(|e| EnergyEcho {
            k1: e.k1,
            interior_points: lattice_points(dim, e.k1).len() / dim,
            rim_points: e.l1,
            alpha: e.alpha,
        }),
        boundary_samples: samples,
        initial_objective: r.initial,
        final_objective: r.value,
        before: base_quality(&map0, &b, &grid, samples)?,
        after: base_quality(&r.map, &b, &grid, samples)?,
        trace: r.trace,
    };
    let path = map_output(cfg, out)?;
    save_map(&r.map, &path)?;
    emit_report(&report, Some(&report_output(cfg, &path)))?;
    emit_report(&report, None)
}

pub fn quality(cfg: &RunConfig, input: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let Some(input) = input else {
        bail!("quality needs an input map (--in)");
    };
    let map = load_map(input).with_context(|| format!("loading {}", input.display()))?;
    let b = match (&cfg.boundary, map.dim()) {
        (Some(_), _) => cfg.boundary()?,
        (None, 3) => bail!("missing field `boundary`: 3D quality measures need the boundary map"),
        (None, _) => bail!("missing field `boundary` required by quality"),
    };
    if map.dim() != b.dim() {
        bail!("map is {}-dimensional but the boundary is {}-dimensional", map.dim(), b.dim());
    }
    let (spec, grid) = eval_grid(cfg, map.dim())?;
    let samples = cfg.quality.boundary_samples;
    let mut q = base_quality(&map, &b, &grid, samples)?;
    let mut warnings = Vec::new();
    if let Boundary::Spatial(b3) = &b {
        let (k, l) = (cfg.quality.k, cfg.quality.l);
        let gs = SphereGrid::new(k)?;
        let gb = CubeBallGrid::new(l)?;
        let mk = boundary_modulus(b3, &gs)?;
        q.k = Some(k);
        q.l = Some(l);
        q.m_k = Some(mk.value);
        if mk.degenerate {
            warnings.push("boundary map collapses two sphere grid points; m_K reported as 0, E1 and E2 skipped".into());
        } else {
            q.e1 = Some(injectivity_measure(&map, &gb, mk.value)?);
            q.e2 = Some(into_measure(&map, b3, &gb, &gs, mk.value)?);
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let report = QualityCommandReport {
        command: "quality",
        dim: map.dim(),
        n: map.degree(),
        grid: grid_echo(spec, &grid),
        boundary_samples: samples,
        quality: q,
        warnings,
    };
    let path = out.map(Path::to_path_buf).or_else(|| cfg.output.report.clone());
    emit_report(&report, path.as_deref())
}

pub fn grid(cfg: &RunConfig, input: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let Some(input) = input else {
        bail!("grid needs an input map (--in)");
    };
    let map = load_map(input).with_context(|| format!("loading {}", input.display()))?;
    let Some(out) = out.map(Path::to_path_buf).or_else(|| cfg.output.map.clone()) else {
        bail!("no output path: pass --out <prefix>");
    };
    let g = &cfg.grid;
    if map.dim() == 2 {
        if g.circles == 0 || g.rays == 0 || g.samples < 2 {
            bail!("invalid parameter `grid`: need circles >= 1, rays >= 1 and samples >= 2");
        }
        let curves = grid::image_curves_2d(&map, g.circles, g.rays, g.samples);
        let csv = out.with_extension("csv");
        write_text(&csv, &grid::curves_csv(&curves, 2))?;
        let svg = out.with_extension("svg");
        write_text(&svg, &grid::curves_svg(&curves))?;
        println!("{}\n{}", csv.display(), svg.display());
    } else {
        if g.shells == 0 {
            bail!("invalid parameter `grid.shells`: must be at least 1");
        }
        let sphere = SphereGrid::new(g.sphere_k)?;
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("grid").to_string();
        for i in 1..=g.shells {
            let shell = grid::image_shell_3d(&map, &sphere, i as f64 / g.shells as f64, i);
            let path = out.with_file_name(format!("{stem}-shell{i}.csv"));
            write_text(&path, &grid::curves_csv(&shell, 3))?;
            println!("{}", path.display());
        }
    }
    Ok(())
}
