//! Closed-loop simulation and brute-force cross-checks for the MILP path:
//! disturbance-sampled trajectories, Monte-Carlo invariance validation, and
//! grid/vertex support maximization.
//!
//! Reproducibility: all sampling uses ChaCha8 seeded from a caller-supplied
//! `u64`, with a fixed draw order (per step: one uniform per coordinate per
//! rejection attempt for `UniformBox`, one uniform per coordinate for
//! `Vertices`), so identical seeds give identical trajectories on every
//! platform.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{self, GeomError, HPolyhedron};
use crate::sysmodel::{self, eval_nn, eval_pwa, MaxoutNet, ModelError, PwaSystem};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("state is in no region")]
    NoRegion,
    #[error("disturbance outside the active region's set (violation {0:.3e})")]
    DisturbanceOutOfSet(f64),
    #[error("grid oracle supports dimension <= 3, got {0}")]
    DimensionTooHigh(usize),
    #[error("vertex sampling needs a box-shaped disturbance set (region {0})")]
    NonBoxDisturbance(usize),
    #[error("could not draw a disturbance inside the set after {0} attempts")]
    SamplingStalled(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// How per-step disturbances are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisturbanceSampler {
    /// Uniform on the bounding box of the active region's set, rejecting
    /// draws outside the set.
    UniformBox,
    /// Random vertex of the (box-shaped) disturbance set.
    Vertices,
    /// No disturbance; reproduces the nominal system.
    Zero,
}

/// A simulated closed-loop run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub inputs: Vec<DVector<f64>>,
    pub disturbances: Vec<DVector<f64>>,
    pub regions: Vec<usize>,
    /// Per step: active region differs from the nominal (d = 0) trajectory's
    /// region at the same step.
    pub region_switched: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Replay check: every transition satisfies the stored dynamics within
    /// `tol` and every disturbance lies in its region's set.
    pub fn replay_ok(&self, sys: &PwaSystem, tol: f64) -> bool {
        for k in 0..self.len() {
            let r = &sys.regions()[self.regions[k]];
            let expect = &r.a * &self.states[k] + &r.b * &self.inputs[k] + &r.p + &self.disturbances[k];
            if (&self.states[k + 1] - expect).amax() > tol {
                return false;
            }
            if !r.dist.contains_point(&self.disturbances[k], 1e-9) {
                return false;
            }
        }
        true
    }
}

/// One disturbed closed-loop step `x+ = f_PWA(x, Phi(x)) + d`.
///
/// The disturbance must lie in the active region's set (checked).
pub fn step_closed_loop(
    sys: &PwaSystem,
    net: &MaxoutNet,
    x: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<(DVector<f64>, usize), SimError> {
    let u = eval_nn(net, x)?;
    let (nominal, region) = eval_pwa(sys, x, &u).map_err(|e| match e {
        ModelError::NoRegion => SimError::NoRegion,
        other => SimError::Model(other),
    })?;
    let violation = sys.regions()[region].dist.violation(d);
    if violation > 1e-9 {
        return Err(SimError::DisturbanceOutOfSet(violation));
    }
    Ok((nominal + d, region))
}

fn draw_disturbance(
    dist: &HPolyhedron,
    region: usize,
    sampler: DisturbanceSampler,
    rng: &mut ChaCha8Rng,
) -> Result<DVector<f64>, SimError> {
    match sampler {
        DisturbanceSampler::Zero => Ok(DVector::zeros(dist.dim())),
        DisturbanceSampler::UniformBox => {
            let bb = geometry::bounding_box(dist)?;
            for _ in 0..10_000 {
                let d = sysmodel::sample_box(&bb, rng);
                if dist.contains_point(&d, 0.0) {
                    return Ok(d);
                }
            }
            Err(SimError::SamplingStalled(10_000))
        }
        DisturbanceSampler::Vertices => {
            let bb = geometry::bounding_box(dist)?;
            // Box shape required: the bounding box must reproduce the set.
            if !geometry::contains(dist, &bb.to_polyhedron(), 1e-9)
                .map_err(SimError::Geometry)?
            {
                return Err(SimError::NonBoxDisturbance(region));
            }
            Ok(DVector::from_fn(dist.dim(), |i, _| {
                if rng.random_range(0.0..1.0) < 0.5 {
                    bb.lo()[i]
                } else {
                    bb.hi()[i]
                }
            }))
        }
    }
}

/// Simulates `steps` disturbed closed-loop steps from `x0`; deterministic
/// given the seed. The nominal (d = 0) run from the same start provides the
/// region-switch flags.
pub fn simulate(
    sys: &PwaSystem,
    net: &MaxoutNet,
    x0: &DVector<f64>,
    steps: usize,
    sampler: DisturbanceSampler,
    seed: u64,
) -> Result<Trajectory, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![x0.clone()];
    let mut inputs = Vec::new();
    let mut disturbances = Vec::new();
    let mut regions = Vec::new();

    for k in 0..steps {
        let x = states[k].clone();
        let u = eval_nn(net, &x)?;
        let region = sys.region_of(&x, &u).map_err(|e| match e {
            ModelError::NoRegion => SimError::NoRegion,
            other => SimError::Model(other),
        })?;
        let d = draw_disturbance(&sys.regions()[region].dist, region, sampler, &mut rng)?;
        let r = &sys.regions()[region];
        let next = &r.a * &x + &r.b * &u + &r.p + &d;
        states.push(next);
        inputs.push(u);
        disturbances.push(d);
        regions.push(region);
    }

    // Nominal comparison run for the switch flags.
    let mut region_switched = vec![false; steps];
    if sampler != DisturbanceSampler::Zero {
        let mut xn = x0.clone();
        for k in 0..steps {
            let u = eval_nn(net, &xn)?;
            match sys.region_of(&xn, &u) {
                Ok(nominal_region) => {
                    region_switched[k] = nominal_region != regions[k];
                    let r = &sys.regions()[nominal_region];
                    xn = &r.a * &xn + &r.b * &u + &r.p;
                }
                Err(_) => {
                    // Nominal run left the guards; no comparison from here on.
                    break;
                }
            }
        }
    }

    Ok(Trajectory {
        states,
        inputs,
        disturbances,
        regions,
        region_switched,
    })
}

/// Monte-Carlo certificate corroboration report.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct McReport {
    pub trials: usize,
    pub steps_per_trial: usize,
    /// Steps at which the state left the safe set.
    pub safe_set_violations: usize,
    /// Steps `k >= k_bar` at which the state was outside the terminal set.
    pub terminal_set_violations: usize,
    /// Steps at which the input left the input set.
    pub input_violations: usize,
    /// Worst safe-set facet violation observed (negative = always inside).
    pub worst_safe_slack: f64,
    /// Worst late terminal-set facet violation observed.
    pub worst_terminal_slack: f64,
}

impl McReport {
    pub fn clean(&self) -> bool {
        self.safe_set_violations == 0
            && self.terminal_set_violations == 0
            && self.input_violations == 0
    }
}

/// Runs `trials` disturbed trajectories from uniform starts in `f_max` and
/// counts violations of invariance, terminal-set entry after `k_bar`, and
/// input constraints. Any nonzero count indicates a certification bug.
#[allow(clippy::too_many_arguments)]
pub fn mc_validate(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f_max: &HPolyhedron,
    r_min: &HPolyhedron,
    k_bar: usize,
    trials: usize,
    seed: u64,
) -> Result<McReport, SimError> {
    mc_validate_map(
        &|x, u| {
            let (nominal, region) = eval_pwa(sys, x, u)?;
            Ok((nominal, Some(region)))
        },
        sys,
        net,
        f_max,
        r_min,
        k_bar,
        trials,
        seed,
    )
}

/// [`mc_validate`] generalized over the plant map: `step` returns the
/// undisturbed successor and, for PWA plants, the active region (whose
/// disturbance set is then sampled). A `None` region runs the plant without
/// additive disturbance, which is how the true nonlinear dynamics are
/// validated against a fitted certificate.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
pub fn mc_validate_map(
    step: &dyn Fn(&DVector<f64>, &DVector<f64>) -> Result<(DVector<f64>, Option<usize>), ModelError>,
    sys: &PwaSystem,
    net: &MaxoutNet,
    f_max: &HPolyhedron,
    r_min: &HPolyhedron,
    k_bar: usize,
    trials: usize,
    seed: u64,
) -> Result<McReport, SimError> {
    let steps = k_bar + 10;
    let mut report = McReport {
        trials,
        steps_per_trial: steps,
        worst_safe_slack: f64::NEG_INFINITY,
        worst_terminal_slack: f64::NEG_INFINITY,
        ..Default::default()
    };
    if trials == 0 {
        return Ok(report);
    }
    let fbox = geometry::bounding_box(f_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-7;

    for _ in 0..trials {
        // Rejection-sample a start inside f_max.
        let mut x = loop {
            let cand = sysmodel::sample_box(&fbox, &mut rng);
            if f_max.contains_point(&cand, 0.0) {
                break cand;
            }
        };
        for k in 0..steps {
            let u = eval_nn(net, &x)?;
            if !sys.input_set().contains_point(&u, tol) {
                report.input_violations += 1;
            }
            let (nominal, region) = step(&x, &u)?;
            let d = match region {
                Some(r) => draw_disturbance(
                    &sys.regions()[r].dist,
                    r,
                    DisturbanceSampler::UniformBox,
                    &mut rng,
                )?,
                None => DVector::zeros(nominal.len()),
            };
            x = nominal + d;
            let safe_slack = f_max.violation(&x);
            report.worst_safe_slack = report.worst_safe_slack.max(safe_slack);
            if safe_slack > tol {
                report.safe_set_violations += 1;
            }
            if k + 1 >= k_bar {
                let term_slack = r_min.violation(&x);
                report.worst_terminal_slack = report.worst_terminal_slack.max(term_slack);
                if term_slack > tol {
                    report.terminal_set_violations += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Grid/vertex lower bound on the one-step reachable-set support: maximizes
/// `v . (f_PWA(x, Phi(x)) + d)` over a regular grid of `F` crossed with the
/// vertices of the active region's (box-shaped) disturbance set.
pub fn brute_support(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f: &HPolyhedron,
    v: &DVector<f64>,
    grid_per_axis: usize,
) -> Result<f64, SimError> {
    let n = f.dim();
    if n > 3 {
        return Err(SimError::DimensionTooHigh(n));
    }
    let bb = geometry::bounding_box(f)?;
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; n];
    let coord = |axis: usize, i: usize| {
        if grid_per_axis <= 1 {
            bb.lo()[axis]
        } else {
            bb.lo()[axis]
                + (bb.hi()[axis] - bb.lo()[axis]) * i as f64 / (grid_per_axis - 1) as f64
        }
    };

    loop {
        let x = DVector::from_fn(n, |c, _| coord(c, idx[c]));
        if f.contains_point(&x, 1e-12) {
            let u = eval_nn(net, &x)?;
            if let Ok((nominal, region)) = eval_pwa(sys, &x, &u) {
                let dist = &sys.regions()[region].dist;
                let db = geometry::bounding_box(dist)?;
                if !geometry::contains(dist, &db.to_polyhedron(), 1e-9)? {
                    return Err(SimError::NonBoxDisturbance(region));
                }
                // All vertices of the disturbance box.
                let dn = db.dim();
                for mask in 0..(1usize << dn) {
                    let d = DVector::from_fn(dn, |c, _| {
                        if mask & (1 << c) != 0 {
                            db.hi()[c]
                        } else {
                            db.lo()[c]
                        }
                    });
                    let val = v.dot(&(&nominal + d));
                    best = best.max(val);
                }
            }
        }
        // Advance the grid index odometer.
        let mut axis = 0;
        loop {
            if axis == n {
                return Ok(best);
            }
            idx[axis] += 1;
            if idx[axis] < grid_per_axis.max(1) {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn step_scalar_with_disturbance() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let (x1, region) =
            step_closed_loop(&sys, &net, &dvector![0.6], &dvector![0.1]).unwrap();
        assert_eq!(region, 0);
        assert_relative_eq!(x1[0], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn step_zero_disturbance_is_nominal() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::zero_net(2, 1);
        let (x1, _) =
            step_closed_loop(&sys, &net, &dvector![1.0, 1.0], &dvector![0.0, 0.0]).unwrap();
        assert_relative_eq!(x1[0], -0.042, epsilon = 1e-12);
        assert_relative_eq!(x1[1], 1.111, epsilon = 1e-12);
    }

    #[test]
    fn step_rejects_outside_disturbance() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        assert!(matches!(
            step_closed_loop(&sys, &net, &dvector![0.0], &dvector![0.2]),
            Err(SimError::DisturbanceOutOfSet(_))
        ));
    }

    #[test]
    fn simulate_nominal_geometric_decay() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let t = simulate(&sys, &net, &dvector![0.6], 3, DisturbanceSampler::Zero, 0).unwrap();
        assert_relative_eq!(t.states[1][0], 0.3, epsilon = 1e-15);
        assert_relative_eq!(t.states[2][0], 0.15, epsilon = 1e-15);
        assert_relative_eq!(t.states[3][0], 0.075, epsilon = 1e-15);
    }

    #[test]
    fn simulate_vertices_scalar() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let t = simulate(&sys, &net, &dvector![0.0], 1, DisturbanceSampler::Vertices, 5).unwrap();
        let x1 = t.states[1][0];
        assert!(
            (x1 - 0.1).abs() < 1e-12 || (x1 + 0.1).abs() < 1e-12,
            "x1 = {x1}"
        );
    }

    #[test]
    fn simulate_is_deterministic() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        let a = simulate(&sys, &net, &dvector![5.0, -3.0], 40, DisturbanceSampler::UniformBox, 9)
            .unwrap();
        let b = simulate(&sys, &net, &dvector![5.0, -3.0], 40, DisturbanceSampler::UniformBox, 9)
            .unwrap();
        for k in 0..=40 {
            assert_eq!(a.states[k], b.states[k]);
        }
    }

    #[test]
    fn trajectory_replay_invariant() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        for seed in 0..20 {
            let t = simulate(
                &sys,
                &net,
                &dvector![2.0, 2.0],
                30,
                DisturbanceSampler::UniformBox,
                seed,
            )
            .unwrap();
            assert!(t.replay_ok(&sys, 1e-12));
        }
    }

    #[test]
    fn brute_support_scalar_attained_at_grid_point() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let f = presets::interval(-0.6, 0.6);
        let s = brute_support(&sys, &net, &f, &dvector![1.0], 1001).unwrap();
        assert_relative_eq!(s, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn brute_support_grid_refinement_monotone() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        let f = presets::inf_ball(2, 2.0);
        let v = dvector![1.0, 0.5];
        let coarse = brute_support(&sys, &net, &f, &v, 3).unwrap();
        let fine = brute_support(&sys, &net, &f, &v, 41).unwrap();
        assert!(fine >= coarse - 1e-12);
    }

    #[test]
    fn brute_support_rejects_high_dimension() {
        let f4 = presets::inf_ball(4, 1.0);
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        assert!(matches!(
            brute_support(&sys, &net, &f4, &DVector::zeros(4), 3),
            Err(SimError::DimensionTooHigh(4))
        ));
    }

    #[test]
    fn mc_zero_trials_empty_report() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let f = presets::interval(-0.6, 0.6);
        let r = presets::interval(-0.21, 0.21);
        let report = mc_validate(&sys, &net, &f, &r, 8, 0, 1).unwrap();
        assert_eq!(report.trials, 0);
        assert!(report.clean());
    }

    #[test]
    fn mc_scalar_certified_sets_clean() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        // Fixed point of c -> 0.5 c + 0.1 is 0.2; [-0.6, 0.6] is RPI.
        let f = presets::interval(-0.6, 0.6);
        let r = presets::interval(-0.2015625, 0.2015625);
        let report = mc_validate(&sys, &net, &f, &r, 8, 2000, 7).unwrap();
        assert!(report.clean(), "{report:?}");
    }

    #[test]
    fn mc_shrunk_safe_set_reports_violations() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        // 0.9 * the RPI fixed point is escapable: from x = 0.18 a worst-case
        // step reaches 0.19 > 0.18? No: 0.5*0.18+0.1 = 0.19 > 0.18. Violations
        // expected against [-0.18, 0.18].
        let f = presets::interval(-0.18, 0.18);
        let r = presets::interval(-0.18, 0.18);
        let report = mc_validate(&sys, &net, &f, &r, 1, 3000, 11).unwrap();
        assert!(report.safe_set_violations > 0);
    }
}
