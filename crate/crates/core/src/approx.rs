//! PWA approximation of sampled nonlinear dynamics: per-region least-squares
//! fits, sampled residual bounds that become the disturbance sets, and the
//! resulting ultimate-boundedness certification path.
//!
//! The residual bounds are sample-based and inflated by a user factor; they
//! are sound relative to the declared disturbance sets, not a certified
//! continuum bound. An analytic bound can be supplied instead when one is
//! available.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::certify::{assemble_certificate, Certificate, CertifyConfig, CertifyError};
use crate::geometry::{self, GeomError, HPolyhedron};
use crate::reach::ReachOptions;
use crate::sysmodel::{
    DisturbanceProvenance, MaxoutNet, ModelError, PwaRegion, PwaSystem, GUARD_TOL,
};

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("region {0} has a rank-deficient sample matrix")]
    RankDeficient(usize),
    #[error("region {0} received no fit samples")]
    EmptyRegion(usize),
    #[error("region {0} received no validation samples")]
    EmptyRegionValidation(usize),
    #[error("sample {0} lies in no region")]
    SampleOutsideRegions(usize),
    #[error("sample dimensions do not match the declared domain")]
    DimensionMismatch,
    #[error("fit carries no residual bounds; run error_bound first")]
    BoundsMissing,
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// One record of sampled dynamics: `fx = f(x, u)`.
#[derive(Debug, Clone)]
pub struct DynSample {
    pub x: DVector<f64>,
    pub u: DVector<f64>,
    pub fx: DVector<f64>,
}

/// Sampled nonlinear dynamics over a declared domain.
#[derive(Debug, Clone)]
pub struct SampledDynamics {
    pub records: Vec<DynSample>,
    pub domain_x: HPolyhedron,
    pub domain_u: HPolyhedron,
    /// Name of the built-in generator, when one produced the samples.
    pub generator: Option<String>,
}

impl SampledDynamics {
    /// Samples `f` on a regular grid of the domain's bounding boxes,
    /// keeping only points inside the domain itself.
    pub fn from_grid(
        f: &dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>,
        domain_x: &HPolyhedron,
        domain_u: &HPolyhedron,
        points_per_x_axis: usize,
        points_per_u_axis: usize,
    ) -> Result<Self, ApproxError> {
        let bx = geometry::bounding_box(domain_x)?;
        let bu = geometry::bounding_box(domain_u)?;
        let coords = |lo: f64, hi: f64, np: usize, i: usize| {
            if np <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (np - 1) as f64
            }
        };
        let n = bx.dim();
        let m = bu.dim();
        let mut records = Vec::new();
        let mut idx = vec![0usize; n + m];
        let steps: Vec<usize> = (0..n)
            .map(|_| points_per_x_axis)
            .chain((0..m).map(|_| points_per_u_axis))
            .collect();
        'outer: loop {
            let x = DVector::from_fn(n, |c, _| {
                coords(bx.lo()[c], bx.hi()[c], points_per_x_axis, idx[c])
            });
            let u = DVector::from_fn(m, |c, _| {
                coords(bu.lo()[c], bu.hi()[c], points_per_u_axis, idx[n + c])
            });
            if domain_x.contains_point(&x, GUARD_TOL) && domain_u.contains_point(&u, GUARD_TOL) {
                let fx = f(&x, &u);
                records.push(DynSample { x, u, fx });
            }
            let mut axis = 0;
            loop {
                if axis == n + m {
                    break 'outer;
                }
                idx[axis] += 1;
                if idx[axis] < steps[axis].max(1) {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
        Ok(Self {
            records,
            domain_x: domain_x.clone(),
            domain_u: domain_u.clone(),
            generator: None,
        })
    }
}

/// Built-in dynamics generators addressable by name from input files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedDynamics {
    NonlinearDoubleIntegrator,
}

impl NamedDynamics {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "nonlinear_double_integrator" => Some(Self::NonlinearDoubleIntegrator),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::NonlinearDoubleIntegrator => "nonlinear_double_integrator",
        }
    }

    pub fn eval(self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::NonlinearDoubleIntegrator => crate::presets::nonlinear_double_integrator(x, u),
        }
    }
}

/// Square chessboard partition of the plane: one guard per center, each
/// `|x - c|_inf <= half_side` with the input coordinates unconstrained.
/// Centers enumerate row-major over `centers_per_axis x centers_per_axis`.
pub fn chessboard_guards(
    centers_per_axis: &[f64],
    half_side: f64,
    input_dim: usize,
) -> Vec<HPolyhedron> {
    let mut guards = Vec::new();
    for &cx in centers_per_axis {
        for &cy in centers_per_axis {
            let mut a = DMatrix::zeros(4, 2 + input_dim);
            let mut b = DVector::zeros(4);
            a[(0, 0)] = 1.0;
            b[0] = cx + half_side;
            a[(1, 0)] = -1.0;
            b[1] = half_side - cx;
            a[(2, 1)] = 1.0;
            b[2] = cy + half_side;
            a[(3, 1)] = -1.0;
            b[3] = half_side - cy;
            guards.push(HPolyhedron::new(a, b).expect("chessboard guard shape"));
        }
    }
    guards
}

/// A fitted PWA approximation. Until [`error_bound`] runs, the disturbance
/// sets are the degenerate origin sets and the fit cannot certify anything.
#[derive(Debug, Clone)]
pub struct PwaFit {
    pub base: PwaSystem,
    /// Residual bound per region (infinity norm), zero before bounding.
    pub region_bounds: Vec<f64>,
    /// Residual RMS per region, from the fit samples.
    pub fit_rms: Vec<f64>,
    /// Whether residual bounds have been attached.
    pub bounded: bool,
}

fn lowest_region(guards: &[HPolyhedron], x: &DVector<f64>, u: &DVector<f64>) -> Option<usize> {
    let mut xi = DVector::zeros(x.len() + u.len());
    xi.rows_mut(0, x.len()).copy_from(x);
    xi.rows_mut(x.len(), u.len()).copy_from(u);
    guards.iter().position(|g| g.contains_point(&xi, GUARD_TOL))
}

/// Ordinary least squares of `fx` against `(x, u, 1)` per region; the sample
/// matrix is factored by SVD and must have full column rank.
pub fn fit_least_squares(
    data: &SampledDynamics,
    guards: &[HPolyhedron],
) -> Result<PwaFit, ApproxError> {
    let n = data.domain_x.dim();
    let m = data.domain_u.dim();
    let cols = n + m + 1;

    let mut assigned: Vec<Vec<&DynSample>> = vec![Vec::new(); guards.len()];
    for (si, s) in data.records.iter().enumerate() {
        if s.x.len() != n || s.u.len() != m || s.fx.len() != n {
            return Err(ApproxError::DimensionMismatch);
        }
        match lowest_region(guards, &s.x, &s.u) {
            Some(r) => assigned[r].push(s),
            None => return Err(ApproxError::SampleOutsideRegions(si)),
        }
    }

    let mut regions = Vec::with_capacity(guards.len());
    let mut fit_rms = Vec::with_capacity(guards.len());
    for (ri, samples) in assigned.iter().enumerate() {
        if samples.is_empty() {
            return Err(ApproxError::EmptyRegion(ri));
        }
        let rows = samples.len();
        let mut design = DMatrix::zeros(rows, cols);
        let mut targets = DMatrix::zeros(rows, n);
        for (i, s) in samples.iter().enumerate() {
            for j in 0..n {
                design[(i, j)] = s.x[j];
            }
            for j in 0..m {
                design[(i, n + j)] = s.u[j];
            }
            design[(i, n + m)] = 1.0;
            for j in 0..n {
                targets[(i, j)] = s.fx[j];
            }
        }
        let svd = design.clone().svd(true, true);
        let rank = svd.rank(1e-9 * svd.singular_values.max());
        if rank < cols {
            return Err(ApproxError::RankDeficient(ri));
        }
        let theta = svd
            .solve(&targets, 1e-12)
            .map_err(|_| ApproxError::RankDeficient(ri))?;

        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, m);
        let mut p = DVector::zeros(n);
        for out in 0..n {
            for j in 0..n {
                a[(out, j)] = theta[(j, out)];
            }
            for j in 0..m {
                b[(out, j)] = theta[(n + j, out)];
            }
            p[out] = theta[(n + m, out)];
        }

        let mut sq_sum = 0.0;
        for s in samples {
            let residual = &s.fx - (&a * &s.x + &b * &s.u + &p);
            sq_sum += residual.amax().powi(2);
        }
        fit_rms.push((sq_sum / rows as f64).sqrt());

        regions.push(PwaRegion {
            a,
            b,
            p,
            guard: guards[ri].clone(),
            dist: crate::presets::inf_ball(n, 0.0),
        });
    }

    let base = PwaSystem::new(regions, data.domain_x.clone(), data.domain_u.clone())?;
    Ok(PwaFit {
        base,
        region_bounds: vec![0.0; guards.len()],
        fit_rms,
        bounded: false,
    })
}

/// Attaches residual bounds from a validation set: per region the largest
/// infinity-norm residual times `1 + inflation`. With `per_region` off
/// (the default elsewhere), every region gets the global maximum.
pub fn error_bound(
    fit: &PwaFit,
    validation: &SampledDynamics,
    inflation: f64,
    per_region: bool,
) -> Result<PwaFit, ApproxError> {
    let guards: Vec<HPolyhedron> = fit
        .base
        .regions()
        .iter()
        .map(|r| r.guard.clone())
        .collect();
    let mut max_residual = vec![f64::NEG_INFINITY; guards.len()];
    let mut counts = vec![0usize; guards.len()];
    for (si, s) in validation.records.iter().enumerate() {
        let ri = lowest_region(&guards, &s.x, &s.u)
            .ok_or(ApproxError::SampleOutsideRegions(si))?;
        let r = &fit.base.regions()[ri];
        let residual = (&s.fx - (&r.a * &s.x + &r.b * &s.u + &r.p)).amax();
        max_residual[ri] = max_residual[ri].max(residual);
        counts[ri] += 1;
    }
    if let Some(ri) = counts.iter().position(|&c| c == 0) {
        return Err(ApproxError::EmptyRegionValidation(ri));
    }

    let global = max_residual.iter().fold(0.0f64, |a, &b| a.max(b));
    let bounds: Vec<f64> = max_residual
        .iter()
        .map(|&r| (1.0 + inflation) * if per_region { r } else { global })
        .collect();
    apply_bounds(fit, &bounds)
}

/// Replaces the sampled bounds by a caller-supplied analytic bound valid on
/// the whole domain.
pub fn with_analytic_bound(fit: &PwaFit, bound: f64) -> Result<PwaFit, ApproxError> {
    apply_bounds(fit, &vec![bound; fit.base.num_regions()])
}

fn apply_bounds(fit: &PwaFit, bounds: &[f64]) -> Result<PwaFit, ApproxError> {
    let n = fit.base.state_dim();
    let regions: Vec<PwaRegion> = fit
        .base
        .regions()
        .iter()
        .zip(bounds)
        .map(|(r, &d)| PwaRegion {
            dist: crate::presets::inf_ball(n, d),
            ..r.clone()
        })
        .collect();
    let base = PwaSystem::new(
        regions,
        fit.base.state_set().clone(),
        fit.base.input_set().clone(),
    )?
    .with_provenance(DisturbanceProvenance::ErrorBoundFit);
    Ok(PwaFit {
        base,
        region_bounds: bounds.to_vec(),
        fit_rms: fit.fit_rms.clone(),
        bounded: true,
    })
}

/// Every validation residual must lie inside its region's disturbance set.
pub fn residuals_within_bounds(
    fit: &PwaFit,
    validation: &SampledDynamics,
) -> Result<bool, ApproxError> {
    let guards: Vec<HPolyhedron> = fit
        .base
        .regions()
        .iter()
        .map(|r| r.guard.clone())
        .collect();
    for (si, s) in validation.records.iter().enumerate() {
        let ri = lowest_region(&guards, &s.x, &s.u)
            .ok_or(ApproxError::SampleOutsideRegions(si))?;
        let r = &fit.base.regions()[ri];
        let residual = &s.fx - (&r.a * &s.x + &r.b * &s.u + &r.p);
        if !r.dist.contains_point(&residual, 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs the certification pipeline on the fitted system. On success the
/// certificate carries the ultimate-boundedness verdict, valid for the true
/// dynamics relative to the declared (sampled) disturbance bounds.
pub fn uub_certify(
    fit: &PwaFit,
    net: &MaxoutNet,
    opts: &ReachOptions,
    config: &CertifyConfig,
) -> Result<Certificate, ApproxError> {
    if !fit.bounded {
        return Err(ApproxError::BoundsMissing);
    }
    Ok(assemble_certificate(&fit.base, net, opts, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn affine_map(x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        dvector![
            0.3 * x[0] - 0.1 * x[1] + 0.5 * u[0] + 0.25,
            0.2 * x[0] + 0.4 * x[1] - 0.75 * u[0]
        ]
    }

    #[test]
    fn exact_affine_data_recovered() {
        let (dx, du) = presets::double_integrator_domain();
        let guards = chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        let data = SampledDynamics::from_grid(&affine_map, &dx, &du, 9, 3).unwrap();
        let fit = fit_least_squares(&data, &guards).unwrap();
        for r in fit.base.regions() {
            assert_relative_eq!(r.a[(0, 0)], 0.3, epsilon = 1e-10);
            assert_relative_eq!(r.a[(0, 1)], -0.1, epsilon = 1e-10);
            assert_relative_eq!(r.b[(1, 0)], -0.75, epsilon = 1e-10);
            assert_relative_eq!(r.p[0], 0.25, epsilon = 1e-10);
        }
        // Zero residuals, zero bounds regardless of inflation.
        let val = SampledDynamics::from_grid(&affine_map, &dx, &du, 17, 5).unwrap();
        let bounded = error_bound(&fit, &val, 0.0, false).unwrap();
        assert!(bounded.region_bounds.iter().all(|&b| b < 1e-10));
        assert!(residuals_within_bounds(&bounded, &val).unwrap());
    }

    #[test]
    fn rank_deficient_duplicates_detected() {
        let (dx, du) = presets::double_integrator_domain();
        let guards = chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        // Clone a single sample into every region.
        let probe = SampledDynamics::from_grid(&affine_map, &dx, &du, 9, 3).unwrap();
        let mut records = Vec::new();
        for g in &guards {
            let s = probe
                .records
                .iter()
                .find(|s| lowest_region(&[g.clone()], &s.x, &s.u) == Some(0))
                .unwrap();
            for _ in 0..6 {
                records.push(s.clone());
            }
        }
        let data = SampledDynamics {
            records,
            domain_x: dx,
            domain_u: du,
            generator: None,
        };
        assert!(matches!(
            fit_least_squares(&data, &guards),
            Err(ApproxError::RankDeficient(_))
        ));
    }

    #[test]
    fn inflation_scales_bounds() {
        let f = |x: &DVector<f64>, u: &DVector<f64>| {
            presets::nonlinear_double_integrator(x, u)
        };
        let (dx, du) = presets::double_integrator_domain();
        let guards = chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        let data = SampledDynamics::from_grid(&f, &dx, &du, 12, 3).unwrap();
        let fit = fit_least_squares(&data, &guards).unwrap();
        let val = SampledDynamics::from_grid(&f, &dx, &du, 24, 6).unwrap();
        let b0 = error_bound(&fit, &val, 0.0, false).unwrap();
        let b1 = error_bound(&fit, &val, 0.1, false).unwrap();
        for (a, b) in b0.region_bounds.iter().zip(&b1.region_bounds) {
            assert_relative_eq!(b / a, 1.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn chessboard_center_region_curvature() {
        // The fitted linear part of the center region is the double
        // integrator's linear part plus a curvature correction.
        let f = |x: &DVector<f64>, u: &DVector<f64>| {
            presets::nonlinear_double_integrator(x, u)
        };
        let (dx, du) = presets::double_integrator_domain();
        let guards = chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        let data = SampledDynamics::from_grid(&f, &dx, &du, 30, 5).unwrap();
        let fit = fit_least_squares(&data, &guards).unwrap();
        // Center region (0, 0) is index 4 in row-major order.
        let center = &fit.base.regions()[4];
        assert_relative_eq!(center.a[(0, 0)], 1.0, epsilon = 0.05);
        assert_relative_eq!(center.a[(0, 1)], 1.0, epsilon = 0.05);
        assert_relative_eq!(center.a[(1, 0)], 0.0, epsilon = 0.05);
        assert_relative_eq!(center.a[(1, 1)], 1.0, epsilon = 0.05);
        assert_relative_eq!(center.b[(0, 0)], 0.5, epsilon = 1e-6);
        assert_relative_eq!(center.b[(1, 0)], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn per_region_bounds_dominate_residuals() {
        let f = |x: &DVector<f64>, u: &DVector<f64>| {
            presets::nonlinear_double_integrator(x, u)
        };
        let (dx, du) = presets::double_integrator_domain();
        let guards = chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        let data = SampledDynamics::from_grid(&f, &dx, &du, 15, 4).unwrap();
        let fit = fit_least_squares(&data, &guards).unwrap();
        let val = SampledDynamics::from_grid(&f, &dx, &du, 30, 8).unwrap();
        let bounded = error_bound(&fit, &val, 0.0, true).unwrap();
        assert!(residuals_within_bounds(&bounded, &val).unwrap());
        // Per-region bounds are no larger than the global bound.
        let global = error_bound(&fit, &val, 0.0, false).unwrap();
        for (pr, gl) in bounded.region_bounds.iter().zip(&global.region_bounds) {
            assert!(pr <= gl);
        }
    }

    #[test]
    fn uub_requires_bounds() {
        let (dx, du) = presets::double_integrator_domain();
        let guards = chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        let data = SampledDynamics::from_grid(&affine_map, &dx, &du, 9, 3).unwrap();
        let fit = fit_least_squares(&data, &guards).unwrap();
        let net = presets::double_integrator_controller().unwrap();
        let opts = ReachOptions::for_dim(2);
        assert!(matches!(
            uub_certify(&fit, &net, &opts, &CertifyConfig::default()),
            Err(ApproxError::BoundsMissing)
        ));
    }

    #[test]
    fn named_dynamics_roundtrip() {
        let named = NamedDynamics::parse("nonlinear_double_integrator").unwrap();
        assert_eq!(named.name(), "nonlinear_double_integrator");
        let v = named.eval(&dvector![1.0, 2.0], &dvector![0.5]);
        assert_relative_eq!(v[0], 3.375, epsilon = 1e-15);
        assert!(NamedDynamics::parse("unknown").is_none());
    }
}
