//! Invariant-set computation and certificate assembly.
//!
//! The pipeline computes a large RPI safe set by intersecting one-step
//! over-approximations with the state set until the iterate is invariant, a
//! small RPI terminal set by iterating one-step over-approximations until the
//! shrinkage has epsilon-converged, the contraction margin alpha between the
//! last two iterates, and the stability radius derived from it. A certificate
//! bundles the sets, the per-iteration support logs, and the verdicts, and is
//! re-validated before it is returned.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeomError, HPolyhedron};
use crate::milp;
use crate::reach::{self, overapprox_one, ReachError, ReachOptions};
use crate::sysmodel::{DisturbanceProvenance, MaxoutNet, ModelError, PwaSystem};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("iteration did not converge within {max_iters} iterations")]
    NotConverged {
        max_iters: usize,
        /// Last iterate, for diagnostics.
        last: HPolyhedron,
    },
    #[error("set does not contain the origin in its interior (facet {0} offset {1})")]
    OriginNotInterior(usize, f64),
    #[error("the supplied safe set fails the RPI check")]
    NotRpi,
    #[error("epsilon_bar must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("alpha must exceed 1 for the stability radius, got {0}")]
    AlphaNotContracting(f64),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Milp(#[from] milp::MilpError),
}

/// Absolute slack used inside the alpha bisection predicate; kept at the LP
/// noise floor so the stability radius inherits full support precision.
const ALPHA_PREDICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityVerdict {
    AsymptoticallyStable,
    AlphaConditionFailed,
    NotComputed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UubVerdict {
    UubCertified,
    NotApplicable,
    Failed,
}

/// Tuning knobs of the certification pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub eps_bar: f64,
    /// Test the terminal-set termination condition every `stride` iterations.
    pub check_stride: usize,
    pub max_iters: usize,
    /// Margin above 1 that alpha must clear for the stability verdict.
    pub alpha_tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            eps_bar: 1e-3,
            check_stride: 1,
            max_iters: 200,
            alpha_tol: 1e-8,
        }
    }
}

/// Certification result: the sets, the margins, the verdicts, and the
/// support values of every iterate for post-hoc re-verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub f_max: HPolyhedron,
    pub f_max_iterations: usize,
    pub r_min: Option<HPolyhedron>,
    pub k_bar: Option<usize>,
    pub eps_bar: f64,
    pub alpha: Option<f64>,
    pub delta_max: Option<f64>,
    pub stability_verdict: StabilityVerdict,
    pub uub_verdict: UubVerdict,
    pub input_constraints_verified: bool,
    /// Template used for every over-approximation.
    pub template: geometry::TemplateDirections,
    pub config: CertifyConfig,
    pub solver: milp::SolverConfig,
    pub containment_tol: f64,
    /// Support vector of each safe-set iterate (template rows then X facets).
    pub f_iteration_supports: Vec<Vec<f64>>,
    /// Support vector of each terminal-set iterate (template rows).
    pub r_iteration_supports: Vec<Vec<f64>>,
    /// Template supports of the one-step image of the scaled terminal set,
    /// from the successful epsilon-convergence test.
    pub eps_check_supports: Option<Vec<f64>>,
}

/// Safe-set iteration: intersect the one-step over-approximation with X,
/// reduce redundancy, and stop at the first RPI iterate.
///
/// Returns the set together with the number of iterations performed.
pub fn compute_f_max(
    sys: &PwaSystem,
    net: &MaxoutNet,
    opts: &ReachOptions,
    max_iters: usize,
) -> Result<(HPolyhedron, usize, Vec<Vec<f64>>), CertifyError> {
    let x_set = sys.state_set();
    let mut logs: Vec<Vec<f64>> = Vec::new();
    let mut reach_set = overapprox_one(sys, net, x_set, opts)?;

    for iteration in 1..=max_iters {
        let iterate = geometry::remove_redundancy(&geometry::intersect(&reach_set, x_set)?)?;
        let next_reach = overapprox_one(sys, net, &iterate, opts)?;
        logs.push(next_reach.b().iter().copied().collect());
        if geometry::contains(&iterate, &next_reach, opts.containment_tol)? {
            return Ok((iterate, iteration, logs));
        }
        reach_set = next_reach;
    }
    Err(CertifyError::NotConverged {
        max_iters,
        last: reach_set,
    })
}

/// Terminal-set iteration from an RPI safe set: iterate the one-step
/// over-approximation and stop at the first k where the scaled set
/// `R_k / (1 + eps)` is contained in its own one-step over-approximation.
///
/// Returns the terminal set, the stopping index, and the whole sequence.
#[allow(clippy::type_complexity)]
pub fn compute_r_min(
    sys: &PwaSystem,
    net: &MaxoutNet,
    f_max: &HPolyhedron,
    config: &CertifyConfig,
    opts: &ReachOptions,
) -> Result<(HPolyhedron, usize, Vec<HPolyhedron>), CertifyError> {
    if !(config.eps_bar > 0.0) {
        return Err(CertifyError::BadEpsilon(config.eps_bar));
    }
    let (rpi, _) = reach::check_rpi(sys, net, f_max, opts)?;
    if !rpi {
        return Err(CertifyError::NotRpi);
    }
    let stride = config.check_stride.max(1);
    let mut seq: Vec<HPolyhedron> = Vec::new();
    let mut current = f_max.clone();
    for k in 1..=config.max_iters {
        current = overapprox_one(sys, net, &current, opts)?;
        seq.push(current.clone());
        if k % stride != 0 {
            continue;
        }
        if eps_converged(sys, net, &current, config.eps_bar, opts)?.0 {
            return Ok((current, k, seq));
        }
    }
    Err(CertifyError::NotConverged {
        max_iters: config.max_iters,
        last: current,
    })
}

/// The epsilon-convergence test: `S := R_k / (1 + eps)` must satisfy
/// `S ⊆ R1(S)` (shrinking one more step no longer loses more than the
/// epsilon scale factor). Returns the verdict along with the image set's
/// support values for the certificate log.
pub fn eps_converged(
    sys: &PwaSystem,
    net: &MaxoutNet,
    r_k: &HPolyhedron,
    eps_bar: f64,
    opts: &ReachOptions,
) -> Result<(bool, Vec<f64>), CertifyError> {
    let scaled = geometry::scale(r_k, 1.0 / (1.0 + eps_bar))?;
    let image = overapprox_one(sys, net, &scaled, opts)?;
    let ok = geometry::contains(&image, &scaled, opts.containment_tol)?;
    Ok((ok, image.b().iter().copied().collect()))
}

/// Largest `alpha` in `[1, 10]` with `alpha * r_last ⊆ r_prev`, bisected to
/// a relative width of 1e-9. A value at or below 1 means the contraction
/// condition fails.
pub fn alpha_margin(
    r_prev: &HPolyhedron,
    r_last: &HPolyhedron,
    _opts: &ReachOptions,
) -> Result<f64, CertifyError> {
    // Support of r_last along each facet normal of r_prev; scaling multiplies
    // supports, so the containment predicate needs no further LP solves.
    let mut supports = DVector::zeros(r_prev.num_facets());
    for i in 0..r_prev.num_facets() {
        let v = r_prev.a().row(i).transpose();
        supports[i] = match geometry::support(r_last, &v)? {
            geometry::SupportValue::Finite(s) => s,
            geometry::SupportValue::Unbounded => return Ok(0.0),
        };
    }
    let fits = |alpha: f64| {
        (0..r_prev.num_facets())
            .all(|i| alpha * supports[i] <= r_prev.b()[i] + ALPHA_PREDICATE_TOL)
    };

    if !fits(1.0) {
        // Even the unscaled set is not contained; report the failure as a
        // margin below 1 (bisect downward for the diagnostic value).
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-9 * hi.max(1e-12) {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(lo);
    }

    let (mut lo, mut hi) = (1.0, 10.0);
    if fits(hi) {
        log::warn!("alpha bisection bracket [1, 10] binds at the upper end");
        return Ok(hi);
    }
    while hi - lo > 1e-9 * lo {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Stability radius `(alpha - 1) * min_i c_i` from the template supports of
/// the terminal set; requires the origin strictly inside.
pub fn delta_max(r_kbar: &HPolyhedron, alpha: f64) -> Result<f64, CertifyError> {
    if !(alpha > 1.0) {
        return Err(CertifyError::AlphaNotContracting(alpha));
    }
    let mut min_support = f64::INFINITY;
    for i in 0..r_kbar.num_facets() {
        let c = r_kbar.b()[i];
        if c <= 0.0 {
            return Err(CertifyError::OriginNotInterior(i, c));
        }
        min_support = min_support.min(c);
    }
    Ok((alpha - 1.0) * min_support)
}

/// Checks the standing assumption that the controller maps X into U: for
/// each facet of U, the maximum of the facet functional over the network
/// outputs on X must stay below the offset.
pub fn verify_nn_input_constraints(
    net: &MaxoutNet,
    x_set: &HPolyhedron,
    u_set: &HPolyhedron,
    opts: &ReachOptions,
) -> Result<bool, CertifyError> {
    for f in 0..u_set.num_facets() {
        let (mut model, _, us) = crate::encode::encode_nn_over_domain(net, x_set)
            .map_err(ReachError::Encode)?;
        let terms: Vec<_> = (0..u_set.dim())
            .filter(|&j| u_set.a()[(f, j)] != 0.0)
            .map(|j| (us[j], u_set.a()[(f, j)]))
            .collect();
        model.set_objective(terms, milp::Direction::Maximize);
        let r = milp::solve(&model, &opts.solver)?;
        match r.status {
            milp::SolveStatus::Optimal => {
                if r.objective_value > u_set.b()[f] + opts.containment_tol {
                    return Ok(false);
                }
            }
            milp::SolveStatus::Infeasible => return Ok(true),
            _ => {
                return Err(CertifyError::Reach(ReachError::SolverLimit {
                    incumbent: None,
                    bound: r.best_bound,
                }))
            }
        }
    }
    Ok(true)
}

/// Runs the full pipeline and re-validates every certificate invariant
/// before returning: safe set RPI and inside X, terminal set inside the safe
/// set, and the epsilon-convergence condition re-checked from scratch.
pub fn assemble_certificate(
    sys: &PwaSystem,
    net: &MaxoutNet,
    opts: &ReachOptions,
    config: &CertifyConfig,
) -> Result<Certificate, CertifyError> {
    let inputs_ok = verify_nn_input_constraints(net, sys.state_set(), sys.input_set(), opts)?;
    if !inputs_ok {
        log::warn!("controller violates the input constraints on X; certificate carries the flag");
    }

    let (f_max, f_iters, f_logs) = compute_f_max(sys, net, opts, config.max_iters)?;

    let mut certificate = Certificate {
        f_max: f_max.clone(),
        f_max_iterations: f_iters,
        r_min: None,
        k_bar: None,
        eps_bar: config.eps_bar,
        alpha: None,
        delta_max: None,
        stability_verdict: StabilityVerdict::NotComputed,
        uub_verdict: match sys.provenance() {
            DisturbanceProvenance::ErrorBoundFit => UubVerdict::Failed,
            DisturbanceProvenance::Declared => UubVerdict::NotApplicable,
        },
        input_constraints_verified: inputs_ok,
        template: opts.template.clone(),
        config: config.clone(),
        solver: opts.solver.clone(),
        containment_tol: opts.containment_tol,
        f_iteration_supports: f_logs,
        r_iteration_supports: Vec::new(),
        eps_check_supports: None,
    };

    let (r_min, k_bar, seq) = compute_r_min(sys, net, &f_max, config, opts)?;
    certificate.r_iteration_supports = seq
        .iter()
        .map(|s| s.b().iter().copied().collect())
        .collect();
    certificate.r_min = Some(r_min.clone());
    certificate.k_bar = Some(k_bar);

    if k_bar >= 2 {
        let alpha = alpha_margin(&seq[k_bar - 2], &seq[k_bar - 1], opts)?;
        certificate.alpha = Some(alpha);
        if alpha > 1.0 + config.alpha_tol {
            certificate.delta_max = Some(delta_max(&r_min, alpha)?);
            certificate.stability_verdict = StabilityVerdict::AsymptoticallyStable;
        } else {
            certificate.stability_verdict = StabilityVerdict::AlphaConditionFailed;
        }
    } else {
        // k_bar = 1 leaves no predecessor iterate; compare against F_max.
        let alpha = alpha_margin(&f_max, &r_min, opts)?;
        certificate.alpha = Some(alpha);
        if alpha > 1.0 + config.alpha_tol {
            certificate.delta_max = Some(delta_max(&r_min, alpha)?);
            certificate.stability_verdict = StabilityVerdict::AsymptoticallyStable;
        } else {
            certificate.stability_verdict = StabilityVerdict::AlphaConditionFailed;
        }
    }

    // Re-validation of the assembled invariants.
    let (rpi_ok, _) = reach::check_rpi(sys, net, &f_max, opts)?;
    if !rpi_ok {
        return Err(CertifyError::NotRpi);
    }
    if !geometry::contains(sys.state_set(), &f_max, opts.containment_tol)? {
        return Err(CertifyError::NotConverged {
            max_iters: f_iters,
            last: f_max,
        });
    }
    if !geometry::contains(&f_max, &r_min, opts.containment_tol)? {
        return Err(CertifyError::NotConverged {
            max_iters: k_bar,
            last: r_min,
        });
    }
    let (eps_ok, eps_supports) = eps_converged(sys, net, &r_min, config.eps_bar, opts)?;
    if !eps_ok {
        return Err(CertifyError::NotConverged {
            max_iters: k_bar,
            last: r_min,
        });
    }
    certificate.eps_check_supports = Some(eps_supports);
    if sys.provenance() == DisturbanceProvenance::ErrorBoundFit && inputs_ok {
        certificate.uub_verdict = UubVerdict::UubCertified;
    }

    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    fn scalar_opts() -> ReachOptions {
        ReachOptions::for_dim(1)
    }

    #[test]
    fn scalar_f_max() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let (f_max, iters, _) = compute_f_max(&sys, &net, &scalar_opts(), 50).unwrap();
        assert_eq!(iters, 1);
        assert_relative_eq!(f_max.b()[0], 0.6, epsilon = 1e-7);
        assert_relative_eq!(f_max.b()[1], 0.6, epsilon = 1e-7);
    }

    #[test]
    fn scalar_r_min_sequence() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let opts = scalar_opts();
        let config = CertifyConfig {
            eps_bar: 0.01,
            ..Default::default()
        };
        let f_max = presets::interval(-0.6, 0.6);
        let (r_min, k_bar, seq) = compute_r_min(&sys, &net, &f_max, &config, &opts).unwrap();
        assert_eq!(k_bar, 8);
        let expect = [0.4, 0.3, 0.25, 0.225, 0.2125, 0.20625, 0.203125, 0.2015625];
        for (set, e) in seq.iter().zip(expect) {
            assert_relative_eq!(set.b()[0], e, epsilon = 1e-7);
        }
        assert_relative_eq!(r_min.b()[0], 0.2015625, epsilon = 1e-7);
    }

    #[test]
    fn scalar_alpha_and_delta() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let opts = scalar_opts();
        let config = CertifyConfig {
            eps_bar: 0.01,
            ..Default::default()
        };
        let f_max = presets::interval(-0.6, 0.6);
        let (r_min, _, seq) = compute_r_min(&sys, &net, &f_max, &config, &opts).unwrap();
        let alpha = alpha_margin(&seq[seq.len() - 2], &seq[seq.len() - 1], &opts).unwrap();
        assert_relative_eq!(alpha, 0.203125 / 0.2015625, epsilon = 1e-6);
        let dm = delta_max(&r_min, alpha).unwrap();
        assert_relative_eq!(dm, (alpha - 1.0) * 0.2015625, epsilon = 1e-9);
    }

    #[test]
    fn alpha_identical_sets_is_one() {
        let opts = scalar_opts();
        let s = presets::interval(-0.3, 0.3);
        let alpha = alpha_margin(&s, &s, &opts).unwrap();
        assert_relative_eq!(alpha, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn delta_max_requires_interior_and_scales_linearly() {
        let s = presets::interval(-0.5, 0.5);
        assert!(matches!(
            delta_max(&s, 1.0),
            Err(CertifyError::AlphaNotContracting(_))
        ));
        let d1 = delta_max(&s, 1.01).unwrap();
        let d2 = delta_max(&s, 1.02).unwrap();
        assert_relative_eq!(d2, 2.0 * d1, epsilon = 1e-12);

        let off = presets::interval(0.1, 0.5);
        assert!(matches!(
            delta_max(&off, 1.01),
            Err(CertifyError::OriginNotInterior(_, _))
        ));
    }

    #[test]
    fn input_constraint_verification() {
        let opts = scalar_opts();
        let x = presets::interval(-10.0, 10.0);
        let net = crate::sysmodel::sat_linear_to_maxout(
            &nalgebra::dvector![-0.5],
            -1.0,
            1.0,
        )
        .unwrap();
        assert!(verify_nn_input_constraints(&net, &x, &presets::interval(-1.0, 1.0), &opts)
            .unwrap());
        assert!(!verify_nn_input_constraints(
            &net,
            &x,
            &presets::interval(-0.5, 0.5),
            &opts
        )
        .unwrap());
        let zero = presets::zero_net(1, 1);
        assert!(verify_nn_input_constraints(
            &zero,
            &x,
            &presets::interval(-1.0, 1.0),
            &opts
        )
        .unwrap());
    }

    #[test]
    fn scalar_certificate_end_to_end() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let opts = scalar_opts();
        let config = CertifyConfig {
            eps_bar: 0.01,
            ..Default::default()
        };
        let cert = assemble_certificate(&sys, &net, &opts, &config).unwrap();
        assert_eq!(cert.stability_verdict, StabilityVerdict::AsymptoticallyStable);
        assert_eq!(cert.uub_verdict, UubVerdict::NotApplicable);
        assert_eq!(cert.k_bar, Some(8));
        assert_relative_eq!(cert.f_max.b()[0], 0.6, epsilon = 1e-7);
        let r_min = cert.r_min.as_ref().unwrap();
        assert_relative_eq!(r_min.b()[0], 0.2015625, epsilon = 1e-7);
        let alpha = cert.alpha.unwrap();
        assert_relative_eq!(alpha, 1.0077519379844961, epsilon = 1e-6);
        assert_relative_eq!(
            cert.delta_max.unwrap(),
            (alpha - 1.0) * 0.2015625,
            epsilon = 1e-9
        );
        assert!(cert.input_constraints_verified);
    }

    #[test]
    fn oversized_disturbance_never_converges() {
        // Disturbance large enough that no invariant subset of X exists.
        let guard = crate::geometry::HPolyhedron::new(
            nalgebra::dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0],
            nalgebra::dvector![1.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        let region = crate::sysmodel::PwaRegion {
            a: nalgebra::dmatrix![0.5],
            b: nalgebra::dmatrix![0.0],
            p: nalgebra::dvector![0.0],
            guard,
            dist: presets::interval(-2.0, 2.0),
        };
        let sys = crate::sysmodel::PwaSystem::new(
            vec![region],
            presets::interval(-1.0, 1.0),
            presets::interval(0.0, 0.0),
        )
        .unwrap();
        let net = presets::zero_net(1, 1);
        let err = compute_f_max(&sys, &net, &scalar_opts(), 10);
        assert!(matches!(err, Err(CertifyError::NotConverged { .. })));
    }

    #[test]
    fn nested_f_iterates_stay_inside_x() {
        // The safe-set iterates are nested and contained in X; exercised on
        // the quadrant system where convergence takes a few iterations.
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        let opts = ReachOptions::for_dim(2);
        let x_set = sys.state_set();
        let mut reach_set = overapprox_one(&sys, &net, x_set, &opts).unwrap();
        let mut prev: Option<HPolyhedron> = None;
        for _ in 1..=25 {
            let iterate = geometry::remove_redundancy(
                &geometry::intersect(&reach_set, x_set).unwrap(),
            )
            .unwrap();
            assert!(geometry::contains(x_set, &iterate, 1e-7).unwrap());
            if let Some(p) = &prev {
                assert!(geometry::contains(p, &iterate, 1e-7).unwrap());
            }
            let next = overapprox_one(&sys, &net, &iterate, &opts).unwrap();
            if geometry::contains(&iterate, &next, opts.containment_tol).unwrap() {
                return;
            }
            prev = Some(iterate);
            reach_set = next;
        }
        panic!("quadrant safe-set iteration did not converge in 25 iterations");
    }
}
