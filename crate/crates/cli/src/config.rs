//! Run configuration file.
//!
//! One JSON document drives every subcommand; each command reads the blocks it
//! needs and ignores the rest. Unknown fields are rejected everywhere.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ballmap::boundary::{Boundary, BoundaryMap2D, BoundaryMap3D, SphericalTerm, TrigPoly};
use ballmap::optimize::{Budget, EnergyConfig, Method, Schedule};
use ballmap::pipeline::InitialMethod;
use ballmap::polymap::{EvalGrid, STANDARD_2D_ORDER, STANDARD_2D_RIM, STANDARD_3D_ORDER, STANDARD_3D_RIM};
use ballmap::quality::{DEFAULT_K, DEFAULT_L};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub boundary: Option<BoundaryConfig>,
    pub method: Option<MethodConfig>,
    /// Polynomial degree of the map.
    pub n: Option<usize>,
    /// Quadrature order of the projection onto `Π_n`.
    #[serde(default)]
    pub projection_order: Option<usize>,
    #[serde(default)]
    pub improve: ImproveConfig,
    #[serde(default)]
    pub quality: QualityConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory of the config file; relative point files resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    StarTrig { radial: TrigPoly },
    Cassini { a: f64 },
    ParametricTrig { x: TrigPoly, y: TrigPoly },
    Ellipse { a: f64, b: f64 },
    StarSpherical { terms: Vec<SphericalTerm> },
    Sphere { radius: f64 },
}

impl BoundaryConfig {
    pub fn build(&self) -> Result<Boundary> {
        let b: Boundary = match self {
            BoundaryConfig::StarTrig { radial } => BoundaryMap2D::star_trig(radial.clone())?.into(),
            BoundaryConfig::Cassini { a } => BoundaryMap2D::cassini(*a)?.into(),
            BoundaryConfig::ParametricTrig { x, y } => {
                let b = BoundaryMap2D::parametric(x.clone(), y.clone());
                b.validate()?;
                b.into()
            }
            BoundaryConfig::Ellipse { a, b } => {
                if !(*a > 0.0 && *b > 0.0) {
                    bail!("invalid parameter `boundary.a`/`boundary.b`: semi-axes must be positive");
                }
                BoundaryMap2D::ellipse(*a, *b).into()
            }
            BoundaryConfig::StarSpherical { terms } => BoundaryMap3D::star_spherical(terms.clone())?.into(),
            BoundaryConfig::Sphere { radius } => BoundaryMap3D::sphere(*radius)?.into(),
        };
        Ok(b)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodConfig {
    Harmonic {
        #[serde(default = "default_harmonic_nodes")]
        nodes: usize,
    },
    Blend {
        kappa: f64,
        omega: f64,
    },
    BlendCore {
        kappa: f64,
        delta: f64,
    },
    Integral {
        #[serde(default = "default_integral_nodes")]
        nodes: usize,
        #[serde(default = "default_polar_nodes")]
        polar_nodes: usize,
    },
    Radial3d,
}

fn default_harmonic_nodes() -> usize {
    64
}

fn default_integral_nodes() -> usize {
    200
}

fn default_polar_nodes() -> usize {
    64
}

impl MethodConfig {
    pub fn initial_method(&self) -> InitialMethod {
        match *self {
            MethodConfig::Harmonic { nodes } => InitialMethod::Harmonic { nodes },
            MethodConfig::Blend { kappa, omega } => InitialMethod::Blend { kappa, omega },
            MethodConfig::BlendCore { kappa, delta } => InitialMethod::BlendCore { kappa, delta },
            MethodConfig::Integral { nodes, polar_nodes } => InitialMethod::Integral { nodes, polar_nodes },
            MethodConfig::Radial3d => InitialMethod::Radial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    #[default]
    Lambda,
    Energy,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImproveConfig {
    #[serde(default)]
    pub objective: ObjectiveKind,
    /// Number of equispaced interpolation points (2D); default `2n+1`.
    #[serde(default)]
    pub q_n: Option<usize>,
    /// File with `(n+1)²` unit vectors (3D); generated when absent.
    #[serde(default)]
    pub point_file: Option<PathBuf>,
    #[serde(default)]
    pub energy: EnergyParams,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    /// Grid for `Λ` during optimization; the standard grid when absent.
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    pub k1: Option<f64>,
    pub l1: Option<usize>,
    pub alpha: Option<f64>,
}

impl EnergyParams {
    /// Fill unset fields from the lattice-count rule for a basis of `basis_size`.
    pub fn resolve(&self, dim: usize, basis_size: usize) -> Result<EnergyConfig> {
        let auto = EnergyConfig::auto(dim, basis_size);
        let k1 = self.k1.unwrap_or(auto.k1);
        let cfg = EnergyConfig {
            k1,
            l1: self.l1.unwrap_or_else(|| (ballmap::optimize::objective::L1_PER_K1 as f64 * k1).round() as usize),
            alpha: self.alpha.unwrap_or(auto.alpha),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default = "default_stages")]
    pub stages: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub first: Option<Method>,
    #[serde(default = "default_true")]
    pub alternate: bool,
}

fn default_stages() -> usize {
    Schedule::default().stages
}

fn default_max_iter() -> usize {
    Budget::default().max_iter
}

fn default_rel_tol() -> f64 {
    Budget::default().rel_tol
}

fn default_true() -> bool {
    true
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            stages: default_stages(),
            max_iter: default_max_iter(),
            rel_tol: default_rel_tol(),
            first: None,
            alternate: true,
        }
    }
}

impl ScheduleConfig {
    pub fn schedule(&self) -> Result<Schedule> {
        if self.stages == 0 {
            bail!("invalid parameter `improve.schedule.stages`: must be at least 1");
        }
        if self.max_iter == 0 {
            bail!("invalid parameter `improve.schedule.max_iter`: must be at least 1");
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            bail!("invalid parameter `improve.schedule.rel_tol`: must be finite and non-negative");
        }
        Ok(Schedule {
            stages: self.stages,
            budget: Budget {
                max_iter: self.max_iter,
                rel_tol: self.rel_tol,
            },
            first: self.first,
            alternate: self.alternate,
        })
    }
}

/// Polar evaluation grid: `order` radii times `2·order` angles (2D) or a
/// product rule (3D), plus `rim` points near the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub order: usize,
    pub rim: usize,
}

impl GridSpec {
    pub fn standard(dim: usize) -> Self {
        if dim == 2 {
            Self {
                order: STANDARD_2D_ORDER,
                rim: STANDARD_2D_RIM,
            }
        } else {
            Self {
                order: STANDARD_3D_ORDER,
                rim: STANDARD_3D_RIM,
            }
        }
    }

    pub fn build(&self, dim: usize) -> Result<EvalGrid> {
        if self.order == 0 {
            bail!("invalid parameter `improve.grid.order`: must be at least 1");
        }
        Ok(if dim == 2 {
            EvalGrid::disk(self.order, self.rim)
        } else {
            EvalGrid::ball(self.order, self.rim, ballmap::polymap::STANDARD_3D_RIM_RADIUS)
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_boundary_samples")]
    pub boundary_samples: usize,
}

fn default_k() -> usize {
    DEFAULT_K
}

fn default_l() -> usize {
    DEFAULT_L
}

fn default_boundary_samples() -> usize {
    4096
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            l: DEFAULT_L,
            boundary_samples: default_boundary_samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Image circles `r = j/circles`, `j = 1..=circles`.
    #[serde(default = "default_circles")]
    pub circles: usize,
    /// Image rays `θ = 2πk/rays`.
    #[serde(default = "default_rays")]
    pub rays: usize,
    /// Samples per curve.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// 3D: shells `(i/shells) S²`, `i = 1..=shells`.
    #[serde(default = "default_shells")]
    pub shells: usize,
    /// 3D: sphere grid parameter used on every shell.
    #[serde(default = "default_sphere_k")]
    pub sphere_k: usize,
}

fn default_circles() -> usize {
    15
}

fn default_rays() -> usize {
    30
}

fn default_samples() -> usize {
    200
}

fn default_shells() -> usize {
    4
}

fn default_sphere_k() -> usize {
    24
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            circles: default_circles(),
            rays: default_rays(),
            samples: default_samples(),
            shells: default_shells(),
            sphere_k: default_sphere_k(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub map: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn boundary(&self) -> Result<Boundary> {
        match &self.boundary {
            Some(b) => b.build(),
            None => bail!("missing field `boundary` required by this command"),
        }
    }

    pub fn point_file(&self) -> Option<PathBuf> {
        self.improve.point_file.as_ref().map(|p| {
            if p.is_absolute() {
                p.clone()
            } else {
                self.base_dir.join(p)
            }
        })
    }
}
