//! Staged improvement: alternate the two minimizers, each stage starting from
//! the best point of the previous one.

use serde::Serialize;

use crate::optimize::constraints::ConstraintSet;
use crate::optimize::minimize::{minimize, Budget, Method};
use crate::optimize::objective::{EnergyConfig, EnergyObjective, LambdaObjective, Objective};
use crate::optimize::reduce::ReducedParametrization;
use crate::polymap::{EvalGrid, PolyMap};
use crate::{Error, Result};

/// What [`improve`] minimizes.
#[derive(Debug, Clone)]
pub enum ObjectiveSpec {
    Lambda { grid: EvalGrid },
    Energy { config: EnergyConfig },
}

impl ObjectiveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveSpec::Lambda { .. } => "lambda",
            ObjectiveSpec::Energy { .. } => "energy",
        }
    }

    /// Simplex search for the nonsmooth `Λ`, quasi-Newton for the energy.
    pub fn default_method(&self) -> Method {
        match self {
            ObjectiveSpec::Lambda { .. } => Method::Simplex,
            ObjectiveSpec::Energy { .. } => Method::QuasiNewton,
        }
    }

    pub fn build(&self, rp: &ReducedParametrization) -> Result<Box<dyn Objective>> {
        Ok(match self {
            ObjectiveSpec::Lambda { grid } => Box::new(LambdaObjective::new(rp, grid)?),
            ObjectiveSpec::Energy { config } => Box::new(EnergyObjective::new(rp, *config)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub stages: usize,
    pub budget: Budget,
    /// Method of the first stage; `None` picks the objective's default.
    pub first: Option<Method>,
    /// Use only the first method instead of alternating.
    pub alternate: bool,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            stages: 5,
            budget: Budget::default(),
            first: None,
            alternate: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub method: &'static str,
    pub start: f64,
    pub end: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Largest interpolation residual over all iterates accepted in this stage.
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct ImproveResult {
    pub map: PolyMap,
    /// Objective at the constrained starting map.
    pub initial: f64,
    pub value: f64,
    pub trace: Vec<StageRecord>,
}

/// Improve `map0` under `constraints`.
///
/// The start is `map0` moved by the smallest coefficient change that meets the
/// interpolation conditions. Stages alternate between the two minimizers and
/// stop after `schedule.stages` or once a stage improves the objective by less
/// than `budget.rel_tol` relative. The best map seen is returned.
pub fn improve(
    map0: &PolyMap,
    constraints: &ConstraintSet,
    objective: &ObjectiveSpec,
    schedule: &Schedule,
) -> Result<ImproveResult> {
    if map0.dim() != constraints.dim() || map0.degree() != constraints.basis().degree() {
        return Err(Error::invalid(
            "map",
            format!(
                "degree {} map in dimension {} does not match degree {} constraints in dimension {}",
                map0.degree(),
                map0.dim(),
                constraints.basis().degree(),
                constraints.dim()
            ),
        ));
    }
    let rp = ReducedParametrization::new(constraints)?;
    let obj = objective.build(&rp)?;
    improve_reduced(&rp, constraints, obj.as_ref(), &rp.split(map0)?, objective.default_method(), schedule)
}

/// [`improve`] on an already built objective, starting at `delta0`.
pub fn improve_reduced(
    rp: &ReducedParametrization,
    constraints: &ConstraintSet,
    obj: &dyn Objective,
    delta0: &[f64],
    default_method: Method,
    schedule: &Schedule,
) -> Result<ImproveResult> {
    let initial = obj.value(delta0);
    if !initial.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut best = (delta0.to_vec(), initial);
    let mut method = schedule.first.unwrap_or(default_method);
    let mut trace = Vec::new();
    for stage in 0..schedule.stages.max(1) {
        let start = best.1;
        let mut max_residual = 0.0f64;
        let r = minimize(obj, &best.0, method, schedule.budget, &mut |x, _| {
            max_residual = max_residual.max(constraints.residual(&rp.assemble(x)));
        })?;
        trace.push(StageRecord {
            stage: stage + 1,
            method: method.name(),
            start,
            end: r.value.min(start),
            iterations: r.iterations,
            evaluations: r.evaluations,
            max_residual,
        });
        let gain = (start - r.value) / start.abs().max(1e-300);
        if r.value < start {
            best = (r.x, r.value);
        }
        if !(gain >= schedule.budget.rel_tol) {
            break;
        }
        if schedule.alternate {
            method = method.other();
        }
    }
    Ok(ImproveResult {
        map: rp.assemble(&best.0),
        initial,
        value: best.1,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Basis;
    use crate::boundary::{Boundary, BoundaryMap2D, TrigPoly};
    use crate::optimize::constraints::build_constraints_2d;
    use crate::pipeline::{build_polymap, InitialMethod};
    use crate::polymap::lambda_ratio;

    #[test]
    fn identity_is_already_optimal() {
        let b: Boundary = BoundaryMap2D::unit_circle().into();
        let m = PolyMap::identity(2, 3).unwrap();
        let c = build_constraints_2d(&b, m.basis(), 7).unwrap();
        let spec = ObjectiveSpec::Lambda {
            grid: EvalGrid::standard_2d(),
        };
        let r = improve(&m, &c, &spec, &Schedule::default()).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert!((r.value - 1.0).abs() < 1e-12);
        for (a, b) in r.map.coeffs().iter().zip(m.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn flower_improves_and_keeps_boundary() {
        let b: Boundary = BoundaryMap2D::star_trig(TrigPoly::new(5.0, vec![1.0], vec![0.0, 2.0])).unwrap().into();
        let m0 = build_polymap(&b, &InitialMethod::Blend { kappa: 0.5, omega: 1.0 }, 3, None).unwrap();
        let c = build_constraints_2d(&b, &Basis::for_dim(2, 3).unwrap(), 7).unwrap();
        let grid = EvalGrid::standard_2d();
        let spec = ObjectiveSpec::Lambda { grid: grid.clone() };
        let schedule = Schedule {
            stages: 2,
            ..Schedule::default()
        };
        let r = improve(&m0, &c, &spec, &schedule).unwrap();
        assert!(r.value < r.initial);
        assert!(r.trace.windows(2).all(|w| w[1].end <= w[0].end));
        assert!(r.trace.iter().all(|s| s.max_residual <= 1e-10));
        assert!(c.residual(&r.map) <= 1e-10);
        assert!((lambda_ratio(&r.map, &grid).unwrap().lambda - r.value).abs() < 1e-9 * r.value);
        assert!(improve(&PolyMap::identity(2, 4).unwrap(), &c, &spec, &schedule).is_err());
    }
}
