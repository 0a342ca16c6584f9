//! Plant and controller model: PWA systems with per-region disturbance sets,
//! maxout networks with exact forward evaluation and interval bounds, and a
//! constructive saturated-linear-to-maxout converter.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{self, Box, GeomError, HPolyhedron};
use crate::milp;

/// Membership slack used for guard evaluation and the disjointness probe.
pub const GUARD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("no region guard contains the point")]
    NoRegion,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("region {0} guard has wrong dimension (must be n+m)")]
    GuardDimension(usize),
    #[error("region {0} disturbance set must be bounded and non-empty")]
    BadDisturbanceSet(usize),
    #[error("regions {0} and {1} have overlapping interiors")]
    OverlappingRegions(usize, usize),
    #[error("guards do not cover X x U: sample {0:?} is in no region")]
    CoverageGap(Vec<f64>),
    #[error("state or input set must be bounded and non-empty")]
    BadStateInputSet,
    #[error("maxout layer {layer}: weight rows {rows} not divisible by channels {channels}")]
    BadChannelCount {
        layer: usize,
        rows: usize,
        channels: usize,
    },
    #[error("maxout layer {layer}: expected input width {expected}, got {got}")]
    LayerChainMismatch {
        layer: usize,
        expected: usize,
        got: usize,
    },
    #[error("saturation bounds invalid: lo {0} must be below hi {1}")]
    BadBounds(f64, f64),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Milp(#[from] milp::MilpError),
}

/// Where a system's disturbance sets came from. Fits produced by the
/// approximation pipeline carry `ErrorBoundFit`, which is what licenses an
/// ultimate-boundedness verdict for the underlying nonlinear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum DisturbanceProvenance {
    #[default]
    Declared,
    ErrorBoundFit,
}

/// One affine piece `x+ = A x + B u + p` active on `guard` (over (x, u)),
/// with disturbances confined to `dist` while the piece is active.
#[derive(Debug, Clone)]
pub struct PwaRegion {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub p: DVector<f64>,
    pub guard: HPolyhedron,
    pub dist: HPolyhedron,
}

/// Discrete-time PWA system with state set X and input set U.
#[derive(Debug, Clone)]
pub struct PwaSystem {
    regions: Vec<PwaRegion>,
    state_set: HPolyhedron,
    input_set: HPolyhedron,
    provenance: DisturbanceProvenance,
}

impl PwaSystem {
    /// Validates dimensions, boundedness of every disturbance set, pairwise
    /// disjoint guard interiors, and (stochastically) guard coverage of X x U.
    pub fn new(
        regions: Vec<PwaRegion>,
        state_set: HPolyhedron,
        input_set: HPolyhedron,
    ) -> Result<Self, ModelError> {
        let n = state_set.dim();
        let m = input_set.dim();
        if regions.is_empty() {
            return Err(ModelError::NoRegion);
        }
        for (i, r) in regions.iter().enumerate() {
            if r.a.nrows() != n || r.a.ncols() != n || r.b.nrows() != n || r.b.ncols() != m {
                return Err(ModelError::DimensionMismatch {
                    expected: n,
                    got: r.a.nrows(),
                });
            }
            if r.p.len() != n {
                return Err(ModelError::DimensionMismatch {
                    expected: n,
                    got: r.p.len(),
                });
            }
            if r.guard.dim() != n + m {
                return Err(ModelError::GuardDimension(i));
            }
            if r.dist.dim() != n {
                return Err(ModelError::BadDisturbanceSet(i));
            }
            match geometry::bounding_box(&r.dist) {
                Ok(_) => {}
                Err(_) => return Err(ModelError::BadDisturbanceSet(i)),
            }
        }
        let sys = Self {
            regions,
            state_set,
            input_set,
            provenance: DisturbanceProvenance::Declared,
        };
        sys.check_disjoint_interiors()?;
        sys.check_coverage_sampled(10_000, 0xC0FFEE)?;
        Ok(sys)
    }

    pub fn with_provenance(mut self, provenance: DisturbanceProvenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> DisturbanceProvenance {
        self.provenance
    }

    pub fn regions(&self) -> &[PwaRegion] {
        &self.regions
    }

    pub fn state_set(&self) -> &HPolyhedron {
        &self.state_set
    }

    pub fn input_set(&self) -> &HPolyhedron {
        &self.input_set
    }

    pub fn state_dim(&self) -> usize {
        self.state_set.dim()
    }

    pub fn input_dim(&self) -> usize {
        self.input_set.dim()
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    /// Lowest region index whose guard contains `(x, u)` within `GUARD_TOL`.
    pub fn region_of(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<usize, ModelError> {
        let xi = stack(x, u);
        self.regions
            .iter()
            .position(|r| r.guard.contains_point(&xi, GUARD_TOL))
            .ok_or(ModelError::NoRegion)
    }

    /// For each guard pair, the open-intersection LP must be infeasible under
    /// a strict-inequality slack.
    fn check_disjoint_interiors(&self) -> Result<(), ModelError> {
        for i in 0..self.regions.len() {
            for j in (i + 1)..self.regions.len() {
                let gi = &self.regions[i].guard;
                let gj = &self.regions[j].guard;
                let shrink = |g: &HPolyhedron| {
                    HPolyhedron::new(g.a().clone(), g.b().map(|v| v - GUARD_TOL))
                        .expect("shrunk guard keeps shape")
                };
                let open = geometry::intersect(&shrink(gi), &shrink(gj))?;
                if !geometry::is_empty(&open)? {
                    return Err(ModelError::OverlappingRegions(i, j));
                }
            }
        }
        Ok(())
    }

    /// Monte-Carlo coverage check: samples of X x U must all land in some
    /// guard. An exact union-cover MILP check is available separately.
    fn check_coverage_sampled(&self, samples: usize, seed: u64) -> Result<(), ModelError> {
        let bx = geometry::bounding_box(&self.state_set).map_err(|_| ModelError::BadStateInputSet)?;
        let bu = geometry::bounding_box(&self.input_set).map_err(|_| ModelError::BadStateInputSet)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checked = 0usize;
        let mut attempts = 0usize;
        while checked < samples && attempts < samples * 50 {
            attempts += 1;
            let x = sample_box(&bx, &mut rng);
            let u = sample_box(&bu, &mut rng);
            if !self.state_set.contains_point(&x, GUARD_TOL)
                || !self.input_set.contains_point(&u, GUARD_TOL)
            {
                continue;
            }
            checked += 1;
            let xi = stack(&x, &u);
            if !self
                .regions
                .iter()
                .any(|r| r.guard.contains_point(&xi, GUARD_TOL))
            {
                return Err(ModelError::CoverageGap(xi.iter().copied().collect()));
            }
        }
        Ok(())
    }

    /// Exact coverage certificate: a MILP searches for a point of X x U that
    /// violates at least one facet of every guard. Returns `true` when no
    /// such point exists (the guards cover X x U).
    pub fn verify_coverage_exact(&self, config: &milp::SolverConfig) -> Result<bool, ModelError> {
        let n = self.state_dim();
        let m = self.input_dim();
        let bx = geometry::bounding_box(&self.state_set).map_err(|_| ModelError::BadStateInputSet)?;
        let bu = geometry::bounding_box(&self.input_set).map_err(|_| ModelError::BadStateInputSet)?;
        // Big enough to disable any guard facet over the X x U box.
        let mut big = 1.0f64;
        for r in &self.regions {
            for i in 0..r.guard.num_facets() {
                let mut hi = -r.guard.b()[i];
                for j in 0..n {
                    let c = r.guard.a()[(i, j)];
                    hi += c.abs() * bx.max_abs();
                }
                for j in 0..m {
                    let c = r.guard.a()[(i, n + j)];
                    hi += c.abs() * bu.max_abs();
                }
                big = big.max(hi.abs());
            }
        }
        big *= 1.1;

        let mut model = milp::MilpModel::new();
        let xi: Vec<_> = (0..n + m).map(|i| model.add_free(format!("xi{i}"))).collect();
        let add_membership = |model: &mut milp::MilpModel, set: &HPolyhedron, offset: usize| {
            for i in 0..set.num_facets() {
                let terms: Vec<_> = (0..set.dim())
                    .filter(|&j| set.a()[(i, j)] != 0.0)
                    .map(|j| (xi[offset + j], set.a()[(i, j)]))
                    .collect();
                model.add_constraint(terms, milp::Sense::Le, set.b()[i]);
            }
        };
        add_membership(&mut model, &self.state_set, 0);
        add_membership(&mut model, &self.input_set, n);

        // The positive violation margin must dominate the integrality leak
        // int_tol * big or a relaxation vertex can fake a hole.
        let margin = (20.0 * config.int_tol * big).max(1e-7);
        for (ri, r) in self.regions.iter().enumerate() {
            let g = &r.guard;
            let mut betas = Vec::new();
            for f in 0..g.num_facets() {
                let beta = model.add_binary(format!("beta_{ri}_{f}"));
                // beta = 1 forces facet f strictly violated:
                // -H_f xi <= -h_f - margin + big (1 - beta)
                let mut terms: Vec<_> = (0..g.dim())
                    .filter(|&j| g.a()[(f, j)] != 0.0)
                    .map(|j| (xi[j], -g.a()[(f, j)]))
                    .collect();
                terms.push((beta, big));
                model.add_constraint(terms, milp::Sense::Le, big - g.b()[f] - margin);
                betas.push(beta);
            }
            model.add_constraint(
                betas.iter().map(|&b| (b, 1.0)).collect(),
                milp::Sense::Ge,
                1.0,
            );
        }
        model.set_objective(Vec::new(), milp::Direction::Maximize);
        let r = milp::solve(&model, config)?;
        Ok(r.status == milp::SolveStatus::Infeasible)
    }
}

/// Nominal PWA step `A x + B u + p` with the active region index; on guard
/// boundaries the lowest region index wins.
pub fn eval_pwa(
    sys: &PwaSystem,
    x: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<(DVector<f64>, usize), ModelError> {
    let region = sys.region_of(x, u)?;
    let r = &sys.regions[region];
    Ok((&r.a * x + &r.b * u + &r.p, region))
}

/// One maxout hidden layer: `p * w` affine preactivations feeding `w` neurons
/// that each take the max over their `p` contiguous channels.
#[derive(Debug, Clone)]
pub struct MaxoutLayer {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub channels: usize,
}

impl MaxoutLayer {
    pub fn width(&self) -> usize {
        self.weights.nrows() / self.channels
    }
}

/// Feed-forward maxout network; with no hidden layers it degenerates to the
/// affine output map.
#[derive(Debug, Clone)]
pub struct MaxoutNet {
    layers: Vec<MaxoutLayer>,
    output_weights: DMatrix<f64>,
    output_bias: DVector<f64>,
}

impl MaxoutNet {
    pub fn new(
        layers: Vec<MaxoutLayer>,
        output_weights: DMatrix<f64>,
        output_bias: DVector<f64>,
    ) -> Result<Self, ModelError> {
        let mut width = None;
        for (i, l) in layers.iter().enumerate() {
            if l.channels == 0 || l.weights.nrows() % l.channels != 0 {
                return Err(ModelError::BadChannelCount {
                    layer: i,
                    rows: l.weights.nrows(),
                    channels: l.channels.max(1),
                });
            }
            if l.bias.len() != l.weights.nrows() {
                return Err(ModelError::DimensionMismatch {
                    expected: l.weights.nrows(),
                    got: l.bias.len(),
                });
            }
            if let Some(w) = width {
                if l.weights.ncols() != w {
                    return Err(ModelError::LayerChainMismatch {
                        layer: i,
                        expected: w,
                        got: l.weights.ncols(),
                    });
                }
            }
            width = Some(l.width());
        }
        if let Some(w) = width {
            if output_weights.ncols() != w {
                return Err(ModelError::LayerChainMismatch {
                    layer: layers.len(),
                    expected: w,
                    got: output_weights.ncols(),
                });
            }
        }
        if output_bias.len() != output_weights.nrows() {
            return Err(ModelError::DimensionMismatch {
                expected: output_weights.nrows(),
                got: output_bias.len(),
            });
        }
        Ok(Self {
            layers,
            output_weights,
            output_bias,
        })
    }

    pub fn layers(&self) -> &[MaxoutLayer] {
        &self.layers
    }

    pub fn output_weights(&self) -> &DMatrix<f64> {
        &self.output_weights
    }

    pub fn output_bias(&self) -> &DVector<f64> {
        &self.output_bias
    }

    pub fn input_dim(&self) -> usize {
        self.layers
            .first()
            .map(|l| l.weights.ncols())
            .unwrap_or_else(|| self.output_weights.ncols())
    }

    pub fn output_dim(&self) -> usize {
        self.output_weights.nrows()
    }

    /// Binary variables one closed-loop encoding step spends on this network.
    pub fn binaries_per_step(&self) -> usize {
        self.layers.iter().map(|l| l.weights.nrows()).sum()
    }
}

/// Exact forward pass.
pub fn eval_nn(net: &MaxoutNet, x: &DVector<f64>) -> Result<DVector<f64>, ModelError> {
    if x.len() != net.input_dim() {
        return Err(ModelError::DimensionMismatch {
            expected: net.input_dim(),
            got: x.len(),
        });
    }
    let mut y = x.clone();
    for layer in &net.layers {
        let z = &layer.weights * &y + &layer.bias;
        let w = layer.width();
        let p = layer.channels;
        let mut out = DVector::zeros(w);
        for l in 0..w {
            out[l] = (0..p).map(|j| z[p * l + j]).fold(f64::NEG_INFINITY, f64::max);
        }
        y = out;
    }
    Ok(&net.output_weights * y + &net.output_bias)
}

/// Interval bounds per layer: preactivation intervals and a slack constant
/// valid for the big-M maxout rows on the given input box.
#[derive(Debug, Clone)]
pub struct LayerBounds {
    /// Per layer: (lower, upper) preactivation bounds, `p*w` entries each.
    pub preactivation: Vec<(DVector<f64>, DVector<f64>)>,
    /// Per layer: slack constant for the channel-selection rows.
    pub big_b: Vec<f64>,
    /// Output interval of the full network.
    pub output: (DVector<f64>, DVector<f64>),
    /// The box the bounds were computed on.
    pub input_box: Box,
}

impl LayerBounds {
    pub fn output_box(&self) -> Box {
        Box::new(self.output.0.clone(), self.output.1.clone()).expect("interval bounds ordered")
    }
}

fn affine_interval(
    w: &DMatrix<f64>,
    b: &DVector<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let rows = w.nrows();
    let mut zlo = b.clone();
    let mut zhi = b.clone();
    for i in 0..rows {
        for j in 0..w.ncols() {
            let c = w[(i, j)];
            if c >= 0.0 {
                zlo[i] += c * lo[j];
                zhi[i] += c * hi[j];
            } else {
                zlo[i] += c * hi[j];
                zhi[i] += c * lo[j];
            }
        }
    }
    (zlo, zhi)
}

/// Conservative interval propagation through the network over `input`.
///
/// The per-layer slack constant is the largest possible gap between a neuron
/// value and any of its channel preactivations (plus a unit margin), which is
/// exactly what the channel-selection big-M rows need to stay feasible for
/// every input in the box.
pub fn interval_bounds(net: &MaxoutNet, input: &Box) -> Result<LayerBounds, ModelError> {
    if input.dim() != net.input_dim() {
        return Err(ModelError::DimensionMismatch {
            expected: net.input_dim(),
            got: input.dim(),
        });
    }
    let mut lo = input.lo().clone();
    let mut hi = input.hi().clone();
    let mut preactivation = Vec::new();
    let mut big_b = Vec::new();

    for layer in &net.layers {
        let (zlo, zhi) = affine_interval(&layer.weights, &layer.bias, &lo, &hi);
        let w = layer.width();
        let p = layer.channels;
        let mut ylo = DVector::zeros(w);
        let mut yhi = DVector::zeros(w);
        let mut slack = 0.0f64;
        let mut magnitude = 0.0f64;
        for l in 0..w {
            let channel = |j: usize| p * l + j;
            ylo[l] = (0..p).map(|j| zlo[channel(j)]).fold(f64::NEG_INFINITY, f64::max);
            yhi[l] = (0..p).map(|j| zhi[channel(j)]).fold(f64::NEG_INFINITY, f64::max);
            let hi_max = yhi[l];
            let lo_min = (0..p).map(|j| zlo[channel(j)]).fold(f64::INFINITY, f64::min);
            slack = slack.max(hi_max - lo_min);
        }
        for v in zlo.iter().chain(zhi.iter()) {
            magnitude = magnitude.max(v.abs());
        }
        preactivation.push((zlo, zhi));
        big_b.push(slack.max(magnitude) + 1.0);
        lo = ylo;
        hi = yhi;
    }

    let output = affine_interval(&net.output_weights, &net.output_bias, &lo, &hi);
    Ok(LayerBounds {
        preactivation,
        big_b,
        output,
        input_box: input.clone(),
    })
}

/// Exact two-hidden-layer maxout net computing `clamp(K x, u_lo, u_hi)`:
/// layer 1 is `max(K x, u_lo)`, layer 2 is `max(-y, -u_hi)`, the output map
/// negates. Single-input controllers only.
pub fn sat_linear_to_maxout(
    gain: &DVector<f64>,
    u_lo: f64,
    u_hi: f64,
) -> Result<MaxoutNet, ModelError> {
    if !(u_lo < u_hi) {
        return Err(ModelError::BadBounds(u_lo, u_hi));
    }
    let n = gain.len();
    let mut w1 = DMatrix::zeros(2, n);
    w1.row_mut(0).copy_from(&gain.transpose());
    let b1 = DVector::from_column_slice(&[0.0, u_lo]);
    let layer1 = MaxoutLayer {
        weights: w1,
        bias: b1,
        channels: 2,
    };
    let w2 = DMatrix::from_column_slice(2, 1, &[-1.0, 0.0]);
    let b2 = DVector::from_column_slice(&[0.0, -u_hi]);
    let layer2 = MaxoutLayer {
        weights: w2,
        bias: b2,
        channels: 2,
    };
    MaxoutNet::new(
        vec![layer1, layer2],
        DMatrix::from_element(1, 1, -1.0),
        DVector::zeros(1),
    )
}

fn stack(x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
    let mut xi = DVector::zeros(x.len() + u.len());
    xi.rows_mut(0, x.len()).copy_from(x);
    xi.rows_mut(x.len(), u.len()).copy_from(u);
    xi
}

pub(crate) fn sample_box(b: &Box, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(b.dim(), |i, _| {
        if b.hi()[i] > b.lo()[i] {
            rng.random_range(b.lo()[i]..=b.hi()[i])
        } else {
            b.lo()[i]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn eval_pwa_quadrant_system() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let (x_next, region) = eval_pwa(&sys, &dvector![1.0, 1.0], &dvector![0.0]).unwrap();
        assert_eq!(region, 2); // region index 3 in 1-based counting
        assert_relative_eq!(x_next[0], -0.042, epsilon = 1e-12);
        assert_relative_eq!(x_next[1], 1.111, epsilon = 1e-12);
    }

    #[test]
    fn eval_pwa_scalar_system() {
        let sys = presets::scalar_system().unwrap();
        let (x_next, region) = eval_pwa(&sys, &dvector![0.6], &dvector![0.0]).unwrap();
        assert_eq!(region, 0);
        assert_relative_eq!(x_next[0], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn eval_pwa_boundary_tie_break() {
        let sys = presets::quadrant_system(0.15).unwrap();
        // The negative x1 axis lies on the boundary of regions 1 and 2
        // (0-based 0 and 1); the lowest index must win.
        let (_, region) = eval_pwa(&sys, &dvector![-1.0, 0.0], &dvector![0.0]).unwrap();
        assert_eq!(region, 0);
    }

    #[test]
    fn eval_pwa_no_region() {
        let sys = presets::scalar_system().unwrap();
        assert!(matches!(
            eval_pwa(&sys, &dvector![0.0], &dvector![5.0]),
            Err(ModelError::NoRegion)
        ));
    }

    #[test]
    fn relu_as_maxout() {
        let net = presets::relu_net();
        assert_relative_eq!(eval_nn(&net, &dvector![-3.0]).unwrap()[0], 0.0);
        assert_relative_eq!(eval_nn(&net, &dvector![2.0]).unwrap()[0], 2.0);
    }

    #[test]
    fn saturated_linear_clamps() {
        let net = sat_linear_to_maxout(&dvector![-0.5], -1.0, 1.0).unwrap();
        assert_relative_eq!(eval_nn(&net, &dvector![4.0]).unwrap()[0], -1.0);
        assert_relative_eq!(eval_nn(&net, &dvector![0.0]).unwrap()[0], 0.0);
        assert_relative_eq!(eval_nn(&net, &dvector![-4.0]).unwrap()[0], 1.0);
        let net2 = sat_linear_to_maxout(&dvector![-0.6, -1.2], -2.0, 2.0).unwrap();
        assert_relative_eq!(eval_nn(&net2, &dvector![1.0, 1.0]).unwrap()[0], -1.8);
    }

    #[test]
    fn saturated_linear_matches_clamp_everywhere() {
        let k = dvector![-0.7, 0.3];
        let net = sat_linear_to_maxout(&k, -1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = dvector![
                rng.random_range(-20.0..20.0),
                rng.random_range(-20.0..20.0)
            ];
            let expect = (k.dot(&x)).clamp(-1.5, 0.5);
            let got = eval_nn(&net, &x).unwrap()[0];
            assert!((got - expect).abs() < 1e-12, "got {got}, expect {expect}");
        }
    }

    #[test]
    fn sat_linear_rejects_bad_bounds() {
        assert!(matches!(
            sat_linear_to_maxout(&dvector![1.0], 1.0, 1.0),
            Err(ModelError::BadBounds(_, _))
        ));
    }

    #[test]
    fn interval_bounds_relu() {
        let net = presets::relu_net();
        let bounds = interval_bounds(&net, &Box::new(dvector![-1.0], dvector![2.0]).unwrap())
            .unwrap();
        let (lo, hi) = &bounds.preactivation[0];
        assert_relative_eq!(lo[0], -1.0);
        assert_relative_eq!(hi[0], 2.0);
        assert_relative_eq!(lo[1], 0.0);
        assert_relative_eq!(hi[1], 0.0);
        // Slack must cover hi_max - lo_min = 2 - (-1) = 3.
        assert!(bounds.big_b[0] >= 3.0);
    }

    #[test]
    fn interval_bounds_zero_weight_net() {
        let layer = MaxoutLayer {
            weights: DMatrix::zeros(2, 1),
            bias: dvector![0.25, 0.25],
            channels: 2,
        };
        let net = MaxoutNet::new(
            vec![layer],
            DMatrix::from_element(1, 1, 1.0),
            DVector::zeros(1),
        )
        .unwrap();
        let bounds =
            interval_bounds(&net, &Box::new(dvector![-5.0], dvector![5.0]).unwrap()).unwrap();
        let (lo, hi) = &bounds.preactivation[0];
        assert_relative_eq!(lo[0], 0.25);
        assert_relative_eq!(hi[0], 0.25);
        assert_relative_eq!(lo[1], 0.25);
        assert_relative_eq!(hi[1], 0.25);
    }

    #[test]
    fn interval_bounds_saturated_linear() {
        let net = sat_linear_to_maxout(&dvector![-0.5], -1.0, 1.0).unwrap();
        let bounds =
            interval_bounds(&net, &Box::new(dvector![-10.0], dvector![10.0]).unwrap()).unwrap();
        let (lo, hi) = &bounds.preactivation[0];
        assert_relative_eq!(lo[0], -5.0);
        assert_relative_eq!(hi[0], 5.0);
        assert_relative_eq!(lo[1], -1.0);
        assert_relative_eq!(hi[1], -1.0);
    }

    #[test]
    fn forward_pass_inside_interval_output() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        let bx = geometry::bounding_box(sys.state_set()).unwrap();
        let bounds = interval_bounds(&net, &bx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let x = sample_box(&bx, &mut rng);
            let u = eval_nn(&net, &x).unwrap();
            assert!(bounds.output_box().contains(&u, 1e-9));
        }
    }

    #[test]
    fn region_membership_consistent_with_guard() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bx = geometry::bounding_box(sys.state_set()).unwrap();
        for _ in 0..1000 {
            let x = sample_box(&bx, &mut rng);
            let u = dvector![0.0];
            let (_, region) = eval_pwa(&sys, &x, &u).unwrap();
            let xi = stack(&x, &u);
            assert!(sys.regions()[region].guard.contains_point(&xi, GUARD_TOL));
        }
    }

    #[test]
    fn disjoint_interiors_pass_on_presets() {
        assert!(presets::quadrant_system(0.15).is_ok());
        assert!(presets::scalar_system().is_ok());
    }

    #[test]
    fn overlapping_regions_rejected() {
        // Duplicate a full-dimensional quadrant guard; the open-intersection
        // probe must flag the pair.
        let sys = presets::quadrant_system(0.15).unwrap();
        let mut regions: Vec<_> = sys.regions().to_vec();
        regions.push(regions[2].clone());
        let err = PwaSystem::new(regions, sys.state_set().clone(), sys.input_set().clone());
        assert!(matches!(err, Err(ModelError::OverlappingRegions(2, 4))));
    }

    #[test]
    fn exact_coverage_check() {
        let sys = presets::quadrant_system(0.15).unwrap();
        assert!(sys
            .verify_coverage_exact(&milp::SolverConfig::default())
            .unwrap());
    }
}
