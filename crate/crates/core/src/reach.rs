//! Reachable-set computations for the disturbed closed loop: exact support
//! values via MILP, template polyhedron over-approximations of the one- and
//! k-step reachable sets, and the RPI membership test.
//!
//! The support of the k-step reachable set is an exact MILP optimum, so the
//! template sets are tight in every template direction. Template directions
//! of one over-approximation solve independently and run in parallel; results
//! join in template row order.

use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::encode::{encode_closed_loop, EncodeError};
use crate::geometry::{self, GeomError, HPolyhedron, TemplateDirections};
use crate::milp::{self, Direction, SolveStatus, SolverConfig};
use crate::sysmodel::{MaxoutNet, PwaSystem};

#[derive(Debug, Error)]
pub enum ReachError {
    #[error("support MILP hit a solver limit (incumbent {incumbent:?}, bound {bound})")]
    SolverLimit { incumbent: Option<f64>, bound: f64 },
    #[error("reachable set unbounded in template direction {0:?}")]
    UnboundedDirection(Vec<f64>),
    #[error("support MILP infeasible: initial set outside the modeled guards")]
    InfeasibleModel,
    #[error("template dimension {0} does not match state dimension {1}")]
    TemplateDimension(usize, usize),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Milp(#[from] milp::MilpError),
}

/// Options shared by the reachability operations.
#[derive(Debug, Clone)]
pub struct ReachOptions {
    pub template: TemplateDirections,
    pub solver: SolverConfig,
    pub containment_tol: f64,
}

impl ReachOptions {
    pub fn new(template: TemplateDirections) -> Self {
        Self {
            template,
            solver: SolverConfig::default(),
            containment_tol: geometry::CONTAINMENT_TOL,
        }
    }

    /// Default template for the state dimension: octagon in the plane, the
    /// axis-aligned box elsewhere.
    pub fn for_dim(n: usize) -> Self {
        let template = if n == 2 {
            TemplateDirections::octagon()
        } else {
            TemplateDirections::axis_box(n)
        };
        Self::new(template)
    }
}

/// Exact support of the k-step disturbed closed-loop reachable set from `F`
/// in direction `v`, as the optimum of the closed-loop MILP.
pub fn support_reach(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f: &HPolyhedron,
    k: usize,
    v: &DVector<f64>,
    opts: &ReachOptions,
) -> Result<f64, ReachError> {
    if !geometry::contains(sys.state_set(), f, opts.containment_tol)? {
        log::warn!("support_reach: initial set is not contained in X");
    }
    let enc = encode_closed_loop(sys, net, f, k)?;
    let mut model = enc.model;
    let terms: Vec<_> = (0..v.len())
        .filter(|&c| v[c] != 0.0)
        .map(|c| (enc.x_vars[k][c], v[c]))
        .collect();
    model.set_objective(terms, Direction::Maximize);
    let r = milp::solve(&model, &opts.solver)?;
    match r.status {
        SolveStatus::Optimal => Ok(r.objective_value),
        SolveStatus::Unbounded => {
            Err(ReachError::UnboundedDirection(v.iter().copied().collect()))
        }
        SolveStatus::Infeasible => Err(ReachError::InfeasibleModel),
        SolveStatus::NodeLimit | SolveStatus::TimeLimit => Err(ReachError::SolverLimit {
            incumbent: if r.assignment.is_empty() {
                None
            } else {
                Some(r.objective_value)
            },
            bound: r.best_bound,
        }),
    }
}

/// Support values of the one-step reachable set in every template direction.
pub fn support_one_step(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f: &HPolyhedron,
    opts: &ReachOptions,
) -> Result<DVector<f64>, ReachError> {
    let values: Vec<Result<f64, ReachError>> = (0..opts.template.len())
        .into_par_iter()
        .map(|i| support_reach(sys, net, f, 1, &opts.template.direction(i), opts))
        .collect();
    let mut out = DVector::zeros(opts.template.len());
    for (i, v) in values.into_iter().enumerate() {
        out[i] = v?;
    }
    Ok(out)
}

/// Template over-approximation of the one-step reachable set: the polyhedron
/// `{x | C x <= c}` with `c_i` the exact support in direction `C_i`. The true
/// one-step set is contained and touched in every template direction.
pub fn overapprox_one(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f: &HPolyhedron,
    opts: &ReachOptions,
) -> Result<HPolyhedron, ReachError> {
    if opts.template.dim() != sys.state_dim() {
        return Err(ReachError::TemplateDimension(
            opts.template.dim(),
            sys.state_dim(),
        ));
    }
    let c = support_one_step(sys, net, f, opts)?;
    Ok(HPolyhedron::new(opts.template.rows().clone(), c)?)
}

/// Iterated one-step over-approximations `R1(F), R1(R1(F)), ...`; returns the
/// whole sequence (the stability margin needs the last two elements).
pub fn overapprox_k(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f: &HPolyhedron,
    k: usize,
    opts: &ReachOptions,
) -> Result<Vec<HPolyhedron>, ReachError> {
    let mut seq = Vec::with_capacity(k);
    let mut current = f.clone();
    for _ in 0..k {
        current = overapprox_one(sys, net, &current, opts)?;
        seq.push(current.clone());
    }
    Ok(seq)
}

/// RPI test for `F`: the one-step reachable set's support along every facet
/// normal of `F` must stay below the facet offset (within tolerance).
/// Returns the verdict together with the support vector for diagnostics.
pub fn check_rpi(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f: &HPolyhedron,
    opts: &ReachOptions,
) -> Result<(bool, DVector<f64>), ReachError> {
    let values: Vec<Result<f64, ReachError>> = (0..f.num_facets())
        .into_par_iter()
        .map(|i| support_reach(sys, net, f, 1, &f.a().row(i).transpose(), opts))
        .collect();
    let mut supports = DVector::zeros(f.num_facets());
    for (i, v) in values.into_iter().enumerate() {
        supports[i] = v?;
    }
    let ok = (0..f.num_facets()).all(|i| supports[i] <= f.b()[i] + opts.containment_tol);
    Ok((ok, supports))
}
