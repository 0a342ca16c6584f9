//! Big-M encoding of the disturbed PWA closed loop as mixed-integer linear
//! constraints.
//!
//! One step of the loop contributes three blocks:
//!
//! - maxout network rows tying `u(k)` to `x(k)` through per-neuron channel
//!   selection binaries,
//! - region selection rows activating exactly one guard binary per step,
//! - gated dynamics rows forcing `x(k+1) = A x + B u + p + d` with the
//!   disturbance confined to the active region's set.
//!
//! Any integral-feasible assignment of the resulting model is a genuine
//! closed-loop trajectory, which is what makes reachable-set support values
//! exact MILP optima.

use nalgebra::DVector;
use thiserror::Error;

use crate::geometry::{self, Box, GeomError, HPolyhedron};
use crate::milp::{MilpModel, Sense, VarId};
use crate::sysmodel::{interval_bounds, LayerBounds, MaxoutNet, ModelError, PwaSystem};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("horizon must be at least 1")]
    BadHorizon,
    #[error("initial set is empty")]
    EmptyInitSet,
    #[error("initial set must be bounded")]
    UnboundedInitSet,
    #[error("state or input set must be bounded")]
    UnboundedStateInput,
    #[error("layer bounds cover {covered:?} but the encoding needs {needed:?}")]
    BoundsTooTight { covered: Vec<f64>, needed: Vec<f64> },
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Variable map of a closed-loop encoding over a fixed horizon.
#[derive(Debug)]
pub struct ClosedLoopEncoding {
    pub model: MilpModel,
    pub horizon: usize,
    /// States x(0..K), one inner vec per step.
    pub x_vars: Vec<Vec<VarId>>,
    /// Inputs u(0..K-1).
    pub u_vars: Vec<Vec<VarId>>,
    /// Disturbances d(0..K-1).
    pub d_vars: Vec<Vec<VarId>>,
    /// Region selectors per step (s binaries each).
    pub gamma_vars: Vec<Vec<VarId>>,
    /// Masked per-region successor copies, `[step][region][component]`.
    pub xtilde_vars: Vec<Vec<Vec<VarId>>>,
    /// Neuron outputs per step and hidden layer.
    pub q_vars: Vec<Vec<Vec<VarId>>>,
    /// Channel selectors per step and hidden layer.
    pub delta_vars: Vec<Vec<Vec<VarId>>>,
    pub big_m: f64,
    pub binaries_per_step: usize,
}

impl ClosedLoopEncoding {
    /// Reads the state trajectory out of a solver assignment.
    pub fn states(&self, assignment: &[f64]) -> Vec<DVector<f64>> {
        self.x_vars
            .iter()
            .map(|vars| DVector::from_iterator(vars.len(), vars.iter().map(|&v| assignment[v])))
            .collect()
    }

    pub fn inputs(&self, assignment: &[f64]) -> Vec<DVector<f64>> {
        self.u_vars
            .iter()
            .map(|vars| DVector::from_iterator(vars.len(), vars.iter().map(|&v| assignment[v])))
            .collect()
    }

    pub fn disturbances(&self, assignment: &[f64]) -> Vec<DVector<f64>> {
        self.d_vars
            .iter()
            .map(|vars| DVector::from_iterator(vars.len(), vars.iter().map(|&v| assignment[v])))
            .collect()
    }

    /// Active region per step (the index whose selector exceeds 1/2).
    pub fn regions(&self, assignment: &[f64]) -> Vec<usize> {
        self.gamma_vars
            .iter()
            .map(|gs| {
                gs.iter()
                    .position(|&g| assignment[g] > 0.5)
                    .expect("one selector active per step")
            })
            .collect()
    }
}

/// Per-step interval envelopes of the closed loop, used to size layer bounds
/// and the big-M constant for multi-step encodings.
struct HorizonBoxes {
    /// State envelope per step 0..=K.
    state: Vec<Box>,
    /// Input envelope per step 0..K.
    input: Vec<Box>,
}

fn propagate_boxes(
    sys: &PwaSystem,
    net: &MaxoutNet,
    init: &Box,
    horizon: usize,
) -> Result<HorizonBoxes, EncodeError> {
    let n = sys.state_dim();
    let mut state = vec![init.clone()];
    let mut input = Vec::new();
    for k in 0..horizon {
        let ub = interval_bounds(net, &state[k])?.output_box();
        // Disturbed affine image, hulled over the regions.
        let mut next: Option<Box> = None;
        for r in sys.regions() {
            let dbox = geometry::bounding_box(&r.dist)?;
            let mut lo = DVector::zeros(n);
            let mut hi = DVector::zeros(n);
            for c in 0..n {
                let mut l = r.p[c] + dbox.lo()[c];
                let mut h = r.p[c] + dbox.hi()[c];
                for j in 0..n {
                    let a = r.a[(c, j)];
                    if a >= 0.0 {
                        l += a * state[k].lo()[j];
                        h += a * state[k].hi()[j];
                    } else {
                        l += a * state[k].hi()[j];
                        h += a * state[k].lo()[j];
                    }
                }
                for j in 0..sys.input_dim() {
                    let b = r.b[(c, j)];
                    if b >= 0.0 {
                        l += b * ub.lo()[j];
                        h += b * ub.hi()[j];
                    } else {
                        l += b * ub.hi()[j];
                        h += b * ub.lo()[j];
                    }
                }
                lo[c] = l;
                hi[c] = h;
            }
            let image = Box::new(lo, hi).expect("interval image ordered");
            next = Some(match next {
                None => image,
                Some(acc) => acc.hull(&image),
            });
        }
        input.push(ub);
        state.push(next.expect("at least one region"));
    }
    Ok(HorizonBoxes { state, input })
}

fn interval_of_row(
    coeffs: impl Iterator<Item = (f64, f64, f64)>,
    constant: f64,
) -> (f64, f64) {
    // Items are (coefficient, lo, hi) per variable.
    let mut lo = constant;
    let mut hi = constant;
    for (c, l, h) in coeffs {
        if c >= 0.0 {
            lo += c * l;
            hi += c * h;
        } else {
            lo += c * h;
            hi += c * l;
        }
    }
    (lo, hi)
}

fn big_m_over(sys: &PwaSystem, state: &Box, input: &Box) -> f64 {
    let n = sys.state_dim();
    let m = sys.input_dim();
    let mut need = 1.0f64;
    let mut d_lo = DVector::zeros(n);
    let mut d_hi = DVector::zeros(n);
    let mut first = true;
    for r in sys.regions() {
        let dbox = geometry::bounding_box(&r.dist).expect("disturbance sets validated bounded");
        if first {
            d_lo = dbox.lo().clone();
            d_hi = dbox.hi().clone();
            first = false;
        } else {
            d_lo = d_lo.zip_map(dbox.lo(), f64::min);
            d_hi = d_hi.zip_map(dbox.hi(), f64::max);
        }
    }

    for r in sys.regions() {
        // Guard rows over the (state, input) envelope.
        let g = &r.guard;
        for i in 0..g.num_facets() {
            let coeffs = (0..n)
                .map(|j| (g.a()[(i, j)], state.lo()[j], state.hi()[j]))
                .chain((0..m).map(|j| (g.a()[(i, n + j)], input.lo()[j], input.hi()[j])));
            let (lo, hi) = interval_of_row(coeffs, -g.b()[i]);
            need = need.max(lo.abs()).max(hi.abs());
        }
        // Nominal and disturbed successor components.
        for c in 0..n {
            let coeffs = (0..n)
                .map(|j| (r.a[(c, j)], state.lo()[j], state.hi()[j]))
                .chain((0..m).map(|j| (r.b[(c, j)], input.lo()[j], input.hi()[j])));
            let (lo, hi) = interval_of_row(coeffs, r.p[c]);
            need = need.max(lo.abs()).max(hi.abs());
            need = need.max((lo + d_lo[c]).abs()).max((hi + d_hi[c]).abs());
        }
        // Disturbance guard rows over the pooled disturbance envelope.
        let dg = &r.dist;
        for i in 0..dg.num_facets() {
            let coeffs = (0..n).map(|j| (dg.a()[(i, j)], d_lo[j], d_hi[j]));
            let (lo, hi) = interval_of_row(coeffs, -dg.b()[i]);
            need = need.max(lo.abs()).max(hi.abs());
        }
    }
    need * 1.1
}

/// Conservative single big-M constant for one closed-loop step over `X x U`:
/// the largest magnitude any gated row can attain over the interval envelope
/// of states, controller outputs, and disturbances, with a 10% margin.
pub fn compute_big_m(sys: &PwaSystem, net: &MaxoutNet) -> Result<f64, EncodeError> {
    let state = geometry::bounding_box(sys.state_set())
        .map_err(|_| EncodeError::UnboundedStateInput)?;
    let u_set = geometry::bounding_box(sys.input_set())
        .map_err(|_| EncodeError::UnboundedStateInput)?;
    let u_net = interval_bounds(net, &state)?.output_box();
    Ok(big_m_over(sys, &state, &u_set.hull(&u_net)))
}

/// Adds the maxout rows for one step: channel lower bounds, gated channel
/// upper bounds, one-hot channel selection, and the affine output map.
/// Returns `(u_vars, q_vars per layer, delta_vars per layer)`.
pub fn encode_nn(
    model: &mut MilpModel,
    net: &MaxoutNet,
    x_vars: &[VarId],
    bounds: &LayerBounds,
    step: usize,
) -> Result<(Vec<VarId>, Vec<Vec<VarId>>, Vec<Vec<VarId>>), EncodeError> {
    // The supplied bounds must cover the values the state variables can take.
    for (j, &xv) in x_vars.iter().enumerate() {
        let (lo, hi) = model.variables()[xv].bounds();
        if lo < bounds.input_box.lo()[j] - 1e-12 || hi > bounds.input_box.hi()[j] + 1e-12 {
            return Err(EncodeError::BoundsTooTight {
                covered: vec![bounds.input_box.lo()[j], bounds.input_box.hi()[j]],
                needed: vec![lo, hi],
            });
        }
    }

    let mut q_prev: Vec<VarId> = x_vars.to_vec();
    let mut q_all = Vec::new();
    let mut delta_all = Vec::new();

    for (li, layer) in net.layers().iter().enumerate() {
        let w = layer.width();
        let p = layer.channels;
        let (zlo, zhi) = &bounds.preactivation[li];
        let slack = bounds.big_b[li];

        let mut q_layer = Vec::with_capacity(w);
        let mut delta_layer = Vec::with_capacity(p * w);
        for l in 0..w {
            let q_lo = (0..p).map(|j| zlo[p * l + j]).fold(f64::NEG_INFINITY, f64::max);
            let q_hi = (0..p).map(|j| zhi[p * l + j]).fold(f64::NEG_INFINITY, f64::max);
            q_layer.push(model.add_continuous(format!("q{step}_{li}_{l}"), q_lo, q_hi));
        }
        for r in 0..p * w {
            delta_layer.push(model.add_binary(format!("delta{step}_{li}_{r}")));
        }

        for l in 0..w {
            let q = q_layer[l];
            for j in 0..p {
                let row = p * l + j;
                let wrow: Vec<(VarId, f64)> = q_prev
                    .iter()
                    .enumerate()
                    .filter(|&(c, _)| layer.weights[(row, c)] != 0.0)
                    .map(|(c, &v)| (v, layer.weights[(row, c)]))
                    .collect();

                // q_l >= W_row q_prev + b_row
                let mut lower = wrow.clone();
                lower.push((q, -1.0));
                model.add_constraint(lower, Sense::Le, -layer.bias[row]);

                // q_l <= W_row q_prev + b_row + slack (1 - delta_row)
                let mut upper: Vec<(VarId, f64)> =
                    wrow.iter().map(|&(v, c)| (v, -c)).collect();
                upper.push((q, 1.0));
                upper.push((delta_layer[row], slack));
                model.add_constraint(upper, Sense::Le, layer.bias[row] + slack);
            }
            // Exactly one active channel per neuron.
            let one_hot: Vec<(VarId, f64)> =
                (0..p).map(|j| (delta_layer[p * l + j], 1.0)).collect();
            model.add_constraint(one_hot, Sense::Eq, 1.0);
        }

        q_prev = q_layer.clone();
        q_all.push(q_layer);
        delta_all.push(delta_layer);
    }

    // Affine output map u = W_out q + b_out.
    let m_out = net.output_dim();
    let (ulo, uhi) = &bounds.output;
    let mut u_vars = Vec::with_capacity(m_out);
    for c in 0..m_out {
        let u = model.add_continuous(format!("u{step}_{c}"), ulo[c], uhi[c]);
        let mut terms: Vec<(VarId, f64)> = q_prev
            .iter()
            .enumerate()
            .filter(|&(j, _)| net.output_weights()[(c, j)] != 0.0)
            .map(|(j, &v)| (v, -net.output_weights()[(c, j)]))
            .collect();
        terms.push((u, 1.0));
        model.add_constraint(terms, Sense::Eq, net.output_bias()[c]);
        u_vars.push(u);
    }

    Ok((u_vars, q_all, delta_all))
}

/// Adds the region-selection rows for one step: each guard is enforced up to
/// `M (1 - gamma_i)` slack, and exactly one selector is active.
pub fn encode_regions(
    model: &mut MilpModel,
    sys: &PwaSystem,
    x_vars: &[VarId],
    u_vars: &[VarId],
    big_m: f64,
    step: usize,
) -> Vec<VarId> {
    let n = sys.state_dim();
    let s = sys.num_regions();
    let gammas: Vec<VarId> = (0..s)
        .map(|i| model.add_binary(format!("gamma{step}_{i}")))
        .collect();

    for (i, r) in sys.regions().iter().enumerate() {
        let g = &r.guard;
        for f in 0..g.num_facets() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for j in 0..n {
                let c = g.a()[(f, j)];
                if c != 0.0 {
                    terms.push((x_vars[j], c));
                }
            }
            for j in 0..u_vars.len() {
                let c = g.a()[(f, n + j)];
                if c != 0.0 {
                    terms.push((u_vars[j], c));
                }
            }
            terms.push((gammas[i], big_m));
            model.add_constraint(terms, Sense::Le, g.b()[f] + big_m);
        }
    }
    model.add_constraint(gammas.iter().map(|&g| (g, 1.0)).collect(), Sense::Eq, 1.0);
    gammas
}

/// Adds the gated disturbed dynamics for one step and returns the successor
/// state and disturbance variables (plus the masked per-region copies).
#[allow(clippy::too_many_arguments)]
pub fn encode_dynamics_disturbed(
    model: &mut MilpModel,
    sys: &PwaSystem,
    x_vars: &[VarId],
    u_vars: &[VarId],
    gamma_vars: &[VarId],
    big_m: f64,
    next_box: &Box,
    step: usize,
) -> (Vec<VarId>, Vec<VarId>, Vec<Vec<VarId>>) {
    let n = sys.state_dim();
    let s = sys.num_regions();

    // Pooled disturbance envelope for variable bounds.
    let mut d_lo = DVector::from_element(n, f64::INFINITY);
    let mut d_hi = DVector::from_element(n, f64::NEG_INFINITY);
    for r in sys.regions() {
        let db = geometry::bounding_box(&r.dist).expect("disturbance sets validated bounded");
        d_lo = d_lo.zip_map(db.lo(), f64::min);
        d_hi = d_hi.zip_map(db.hi(), f64::max);
    }
    let d_vars: Vec<VarId> = (0..n)
        .map(|c| model.add_continuous(format!("d{step}_{c}"), d_lo[c], d_hi[c]))
        .collect();

    let xtilde: Vec<Vec<VarId>> = (0..s)
        .map(|i| {
            (0..n)
                .map(|c| model.add_continuous(format!("xt{step}_{i}_{c}"), -big_m, big_m))
                .collect()
        })
        .collect();

    let x_next: Vec<VarId> = (0..n)
        .map(|c| model.add_continuous(format!("x{}_{c}", step + 1), next_box.lo()[c], next_box.hi()[c]))
        .collect();

    for (i, r) in sys.regions().iter().enumerate() {
        let gamma = gamma_vars[i];
        for c in 0..n {
            // Dynamics residual rows, gated both ways.
            let mut base: Vec<(VarId, f64)> = Vec::new();
            for j in 0..n {
                let a = r.a[(c, j)];
                if a != 0.0 {
                    base.push((x_vars[j], a));
                }
            }
            for j in 0..u_vars.len() {
                let b = r.b[(c, j)];
                if b != 0.0 {
                    base.push((u_vars[j], b));
                }
            }
            base.push((d_vars[c], 1.0));
            base.push((xtilde[i][c], -1.0));

            let mut up = base.clone();
            up.push((gamma, big_m));
            model.add_constraint(up, Sense::Le, big_m - r.p[c]);

            let mut down: Vec<(VarId, f64)> = base.iter().map(|&(v, c2)| (v, -c2)).collect();
            down.push((gamma, big_m));
            model.add_constraint(down, Sense::Le, big_m + r.p[c]);

            // Masking rows: |xtilde_i| <= M gamma_i.
            model.add_constraint(
                vec![(xtilde[i][c], 1.0), (gamma, -big_m)],
                Sense::Le,
                0.0,
            );
            model.add_constraint(
                vec![(xtilde[i][c], -1.0), (gamma, -big_m)],
                Sense::Le,
                0.0,
            );
        }
        // Region-gated disturbance membership.
        let dg = &r.dist;
        for f in 0..dg.num_facets() {
            let mut terms: Vec<(VarId, f64)> = (0..n)
                .filter(|&j| dg.a()[(f, j)] != 0.0)
                .map(|j| (d_vars[j], dg.a()[(f, j)]))
                .collect();
            terms.push((gamma, big_m));
            model.add_constraint(terms, Sense::Le, dg.b()[f] + big_m);
        }
    }

    // Successor assembled from the masked copies.
    for c in 0..n {
        let mut terms: Vec<(VarId, f64)> = vec![(x_next[c], 1.0)];
        for i in 0..s {
            terms.push((xtilde[i][c], -1.0));
        }
        model.add_constraint(terms, Sense::Eq, 0.0);
    }

    (x_next, d_vars, xtilde)
}

/// Builds the full closed-loop feasibility model over `horizon` steps with
/// `x(0)` constrained to `init_set`. No objective is set.
pub fn encode_closed_loop(
    sys: &PwaSystem,
    net: &MaxoutNet,
    init_set: &HPolyhedron,
    horizon: usize,
) -> Result<ClosedLoopEncoding, EncodeError> {
    if horizon == 0 {
        return Err(EncodeError::BadHorizon);
    }
    if geometry::is_empty(init_set)? {
        return Err(EncodeError::EmptyInitSet);
    }
    let init_box = geometry::bounding_box(init_set).map_err(|e| match e {
        GeomError::Unbounded(_) => EncodeError::UnboundedInitSet,
        other => EncodeError::Geometry(other),
    })?;
    let state_box =
        geometry::bounding_box(sys.state_set()).map_err(|_| EncodeError::UnboundedStateInput)?;
    let input_box =
        geometry::bounding_box(sys.input_set()).map_err(|_| EncodeError::UnboundedStateInput)?;

    // Interval envelopes per step; the network rows are sized on the hull of
    // the visited state envelopes so multi-step encodings stay sound even
    // when intermediate states leave X.
    let boxes = propagate_boxes(sys, net, &state_box.hull(&init_box), horizon)?;
    let mut nn_box = boxes.state[0].clone();
    for b in &boxes.state[1..horizon] {
        nn_box = nn_box.hull(b);
    }
    let bounds = interval_bounds(net, &nn_box)?;

    let m_box = nn_box.hull(&boxes.state[horizon]);
    let mut u_hull = input_box;
    for b in &boxes.input {
        u_hull = u_hull.hull(b);
    }
    let big_m = big_m_over(sys, &m_box, &u_hull);

    let n = sys.state_dim();
    let mut model = MilpModel::new();

    // x(0) with membership rows.
    let x0: Vec<VarId> = (0..n)
        .map(|c| model.add_continuous(format!("x0_{c}"), init_box.lo()[c], init_box.hi()[c]))
        .collect();
    for f in 0..init_set.num_facets() {
        let terms: Vec<(VarId, f64)> = (0..n)
            .filter(|&j| init_set.a()[(f, j)] != 0.0)
            .map(|j| (x0[j], init_set.a()[(f, j)]))
            .collect();
        model.add_constraint(terms, Sense::Le, init_set.b()[f]);
    }

    let mut enc = ClosedLoopEncoding {
        model,
        horizon,
        x_vars: vec![x0],
        u_vars: Vec::new(),
        d_vars: Vec::new(),
        gamma_vars: Vec::new(),
        xtilde_vars: Vec::new(),
        q_vars: Vec::new(),
        delta_vars: Vec::new(),
        big_m,
        binaries_per_step: sys.num_regions() + net.binaries_per_step(),
    };

    for k in 0..horizon {
        let x_k = enc.x_vars[k].clone();
        let (u_k, q_k, delta_k) = encode_nn(&mut enc.model, net, &x_k, &bounds, k)?;
        let gamma_k = encode_regions(&mut enc.model, sys, &x_k, &u_k, big_m, k);
        let (x_next, d_k, xt_k) = encode_dynamics_disturbed(
            &mut enc.model,
            sys,
            &x_k,
            &u_k,
            &gamma_k,
            big_m,
            &boxes.state[k + 1],
            k,
        );
        enc.u_vars.push(u_k);
        enc.q_vars.push(q_k);
        enc.delta_vars.push(delta_k);
        enc.gamma_vars.push(gamma_k);
        enc.d_vars.push(d_k);
        enc.xtilde_vars.push(xt_k);
        enc.x_vars.push(x_next);
    }

    debug_assert_eq!(
        enc.model.num_binaries(),
        horizon * enc.binaries_per_step,
        "binary count must be s + sum(p_i w_i) per step"
    );
    Ok(enc)
}

/// Network-only model over a bounded polyhedral domain: `x` ranges over
/// `domain` and `u = Phi(x)`. Used for input-constraint verification.
pub fn encode_nn_over_domain(
    net: &MaxoutNet,
    domain: &HPolyhedron,
) -> Result<(MilpModel, Vec<VarId>, Vec<VarId>), EncodeError> {
    let dbox = geometry::bounding_box(domain)?;
    let bounds = interval_bounds(net, &dbox)?;
    let mut model = MilpModel::new();
    let xs: Vec<VarId> = (0..domain.dim())
        .map(|c| model.add_continuous(format!("x_{c}"), dbox.lo()[c], dbox.hi()[c]))
        .collect();
    for f in 0..domain.num_facets() {
        let terms: Vec<(VarId, f64)> = (0..domain.dim())
            .filter(|&j| domain.a()[(f, j)] != 0.0)
            .map(|j| (xs[j], domain.a()[(f, j)]))
            .collect();
        model.add_constraint(terms, Sense::Le, domain.b()[f]);
    }
    let (us, _, _) = encode_nn(&mut model, net, &xs, &bounds, 0)?;
    Ok((model, xs, us))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{self, Direction, SolveStatus, SolverConfig};
    use crate::presets;
    use crate::sysmodel::{eval_nn, sat_linear_to_maxout};
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn feasibility(model: &MilpModel) -> milp::SolveResult {
        milp::solve(model, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn big_m_scalar_floor() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let m = compute_big_m(&sys, &net).unwrap();
        assert!(m >= 1.1 * 1.0_f64.max(0.6).max(0.1));
        assert!(m <= 30.0);
    }

    #[test]
    fn big_m_quadrant_magnitude() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        let m = compute_big_m(&sys, &net).unwrap();
        // Interval oracle: guard rows reach 10, the worst successor row is
        // |A3 row 1| * 10 + |u| + |d| = 16.72 + 1 + 0.15.
        let floor = 1.1 * (16.72 + 1.0 + 0.15);
        assert!(m >= floor - 1e-9, "m = {m}, floor = {floor}");
        assert!(m <= 25.0, "m = {m}");
    }

    #[test]
    fn big_m_guard_contribution_scales_with_state_set() {
        // System whose guard rows dominate every other bound: doubling X
        // doubles M.
        let build = |x_bound: f64| {
            let guard = HPolyhedron::new(
                nalgebra::dmatrix![100.0, 0.0; -100.0, 0.0; 0.0, 1.0; 0.0, -1.0],
                nalgebra::dvector![100.0 * x_bound, 100.0 * x_bound, 0.0, 0.0],
            )
            .unwrap();
            let region = crate::sysmodel::PwaRegion {
                a: nalgebra::dmatrix![0.1],
                b: nalgebra::dmatrix![0.0],
                p: dvector![0.0],
                guard,
                dist: presets::interval(-0.01, 0.01),
            };
            crate::sysmodel::PwaSystem::new(
                vec![region],
                presets::interval(-x_bound, x_bound),
                presets::interval(0.0, 0.0),
            )
            .unwrap()
        };
        let net = presets::zero_net(1, 1);
        let m1 = compute_big_m(&build(1.0), &net).unwrap();
        let m2 = compute_big_m(&build(2.0), &net).unwrap();
        assert_relative_eq!(m2 / m1, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn nn_rows_relu_fixed_inputs() {
        let net = presets::relu_net();
        for (x, want) in [(-3.0, 0.0), (2.0, 2.0)] {
            let domain = presets::interval(-5.0, 5.0);
            let (mut model, xs, us) = encode_nn_over_domain(&net, &domain).unwrap();
            model.fix_var(xs[0], x);
            model.set_objective(Vec::new(), Direction::Maximize);
            let r = feasibility(&model);
            assert_eq!(r.status, SolveStatus::Optimal);
            assert_relative_eq!(r.assignment[us[0]], want, epsilon = 1e-7);
        }
    }

    #[test]
    fn nn_rows_saturated_linear_fixed_input() {
        let net = sat_linear_to_maxout(&dvector![-0.5], -1.0, 1.0).unwrap();
        let domain = presets::interval(-10.0, 10.0);
        let (mut model, xs, us) = encode_nn_over_domain(&net, &domain).unwrap();
        model.fix_var(xs[0], 4.0);
        model.set_objective(Vec::new(), Direction::Maximize);
        let r = feasibility(&model);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_relative_eq!(r.assignment[us[0]], -1.0, epsilon = 1e-7);
    }

    #[test]
    fn nn_rows_relu_maximize_output() {
        let net = presets::relu_net();
        let domain = presets::interval(-1.0, 2.0);
        let (mut model, _, us) = encode_nn_over_domain(&net, &domain).unwrap();
        model.set_objective(vec![(us[0], 1.0)], Direction::Maximize);
        let r = feasibility(&model);
        assert_relative_eq!(r.objective_value, 2.0, epsilon = 1e-7);
    }

    #[test]
    fn region_rows_pick_quadrant() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::zero_net(2, 1);
        for (x, want_region) in [
            (dvector![1.0, 1.0], 2usize),
            (dvector![-1.0, -1.0], 0usize),
        ] {
            let enc = encode_closed_loop(&sys, &net, sys.state_set(), 1).unwrap();
            let mut model = enc.model.clone();
            model.fix_var(enc.x_vars[0][0], x[0]);
            model.fix_var(enc.x_vars[0][1], x[1]);
            let r = feasibility(&model);
            assert_eq!(r.status, SolveStatus::Optimal);
            let regions = enc.regions(&r.assignment);
            assert_eq!(regions[0], want_region);
        }
    }

    #[test]
    fn forcing_two_selectors_is_infeasible() {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::zero_net(2, 1);
        let enc = encode_closed_loop(&sys, &net, sys.state_set(), 1).unwrap();
        let mut model = enc.model.clone();
        model.fix_var(enc.gamma_vars[0][0], 1.0);
        model.fix_var(enc.gamma_vars[0][1], 1.0);
        let r = feasibility(&model);
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn disturbed_step_interval_scalar() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let enc = encode_closed_loop(&sys, &net, sys.state_set(), 1).unwrap();
        let mut max_model = enc.model.clone();
        max_model.fix_var(enc.x_vars[0][0], 0.6);
        max_model.set_objective(vec![(enc.x_vars[1][0], 1.0)], Direction::Maximize);
        let r = feasibility(&max_model);
        assert_relative_eq!(r.objective_value, 0.4, epsilon = 1e-7);

        let mut min_model = enc.model.clone();
        min_model.fix_var(enc.x_vars[0][0], 0.6);
        min_model.set_objective(vec![(enc.x_vars[1][0], 1.0)], Direction::Minimize);
        let r = feasibility(&min_model);
        assert_relative_eq!(r.objective_value, 0.2, epsilon = 1e-7);
    }

    #[test]
    fn zero_width_disturbance_reduces_to_nominal() {
        // Same scalar plant with D = {0}: x(1) is pinned to 0.5 x(0).
        let guard = HPolyhedron::new(
            nalgebra::dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0],
            nalgebra::dvector![1.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        let region = crate::sysmodel::PwaRegion {
            a: nalgebra::dmatrix![0.5],
            b: nalgebra::dmatrix![0.0],
            p: dvector![0.0],
            guard,
            dist: presets::interval(0.0, 0.0),
        };
        let sys = crate::sysmodel::PwaSystem::new(
            vec![region],
            presets::interval(-1.0, 1.0),
            presets::interval(0.0, 0.0),
        )
        .unwrap();
        let net = presets::zero_net(1, 1);
        let enc = encode_closed_loop(&sys, &net, sys.state_set(), 1).unwrap();
        for dir in [Direction::Maximize, Direction::Minimize] {
            let mut model = enc.model.clone();
            model.fix_var(enc.x_vars[0][0], 0.6);
            model.set_objective(vec![(enc.x_vars[1][0], 1.0)], dir);
            let r = feasibility(&model);
            assert_relative_eq!(r.objective_value, 0.3, epsilon = 1e-7);
        }
    }

    #[test]
    fn binary_counts_match_formula() {
        let sys = presets::scalar_system().unwrap();
        let net = presets::zero_net(1, 1);
        let enc = encode_closed_loop(&sys, &net, sys.state_set(), 1).unwrap();
        assert_eq!(enc.binaries_per_step, 1);
        assert_eq!(enc.model.num_binaries(), 1);

        let sys = presets::quadrant_system(0.15).unwrap();
        let net = three_by_three_net();
        let enc = encode_closed_loop(&sys, &net, sys.state_set(), 1).unwrap();
        assert_eq!(enc.binaries_per_step, 4 + 27);
        assert_eq!(enc.model.num_binaries(), 31);
        let enc2 = encode_closed_loop(&sys, &net, sys.state_set(), 2).unwrap();
        assert_eq!(enc2.model.num_binaries(), 62);
    }

    /// A small dense 3x3 maxout net (3 hidden layers, 3 channels, width 3)
    /// with fixed weights, for structural tests.
    fn three_by_three_net() -> MaxoutNet {
        use crate::sysmodel::MaxoutLayer;
        use nalgebra::{DMatrix, DVector};
        let mut layers = Vec::new();
        let widths = [2usize, 3, 3, 3];
        for li in 0..3 {
            let rows = 3 * widths[li + 1];
            let cols = widths[li];
            let weights = DMatrix::from_fn(rows, cols, |r, c| {
                0.11 * ((r + 2 * c + li) % 5) as f64 - 0.2
            });
            let bias = DVector::from_fn(rows, |r, _| 0.01 * (r % 3) as f64);
            layers.push(MaxoutLayer {
                weights,
                bias,
                channels: 3,
            });
        }
        MaxoutNet::new(
            layers,
            DMatrix::from_fn(1, 3, |_, c| 0.05 * (c as f64 + 1.0)),
            DVector::zeros(1),
        )
        .unwrap()
    }

    #[test]
    fn encoding_matches_forward_pass_on_random_states() {
        // Fix x and check the unique feasible u equals the exact forward
        // pass, for a net with genuinely competing channels.
        let net = three_by_three_net();
        let domain = presets::inf_ball(2, 10.0);
        let mut rng = crate::test_rng(42);
        for _ in 0..25 {
            let x = dvector![
                rand::Rng::random_range(&mut rng, -10.0..10.0),
                rand::Rng::random_range(&mut rng, -10.0..10.0)
            ];
            let (mut model, xs, us) = encode_nn_over_domain(&net, &domain).unwrap();
            model.fix_var(xs[0], x[0]);
            model.fix_var(xs[1], x[1]);
            model.set_objective(vec![(us[0], 1.0)], Direction::Maximize);
            let r = feasibility(&model);
            assert_eq!(r.status, SolveStatus::Optimal);
            let want = eval_nn(&net, &x).unwrap();
            assert_relative_eq!(r.assignment[us[0]], want[0], epsilon = 1e-6);
        }
    }
}
