//! Built-in example systems and controllers.
//!
//! These are the models the tests and the shipped example input files are
//! generated from, so file parsing and in-code fixtures cannot drift apart.

use nalgebra::{dmatrix, dvector, DMatrix, DVector};

use crate::geometry::{Box, HPolyhedron};
use crate::sysmodel::{
    sat_linear_to_maxout, MaxoutLayer, MaxoutNet, ModelError, PwaRegion, PwaSystem,
};

/// Interval `[lo, hi]` as a one-dimensional polyhedron.
pub fn interval(lo: f64, hi: f64) -> HPolyhedron {
    HPolyhedron::new(dmatrix![1.0; -1.0], dvector![hi, -lo]).expect("interval shape")
}

/// Infinity-norm ball `|x_i| <= r` in dimension `n`.
pub fn inf_ball(n: usize, r: f64) -> HPolyhedron {
    Box::centered(n, r).to_polyhedron()
}

/// Scalar contraction test system: `x+ = 0.5 x + d`, `X = [-1, 1]`,
/// `U = {0}`, `|d| <= 0.1`, one region covering all of X x U.
///
/// Closed form for analysis: with the zero controller the interval bound
/// `c` maps to `0.5 c + 0.1` per step, with fixed point `0.2`.
pub fn scalar_system() -> Result<PwaSystem, ModelError> {
    let guard = HPolyhedron::new(
        dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0],
        dvector![1.0, 1.0, 0.0, 0.0],
    )
    .expect("guard shape");
    let region = PwaRegion {
        a: dmatrix![0.5],
        b: dmatrix![0.0],
        p: dvector![0.0],
        guard,
        dist: interval(-0.1, 0.1),
    };
    PwaSystem::new(vec![region], interval(-1.0, 1.0), interval(0.0, 0.0))
}

/// Zero controller (no hidden layers, zero output map).
pub fn zero_net(n: usize, m: usize) -> MaxoutNet {
    MaxoutNet::new(Vec::new(), DMatrix::zeros(m, n), DVector::zeros(m))
        .expect("zero net is well-formed")
}

/// ReLU as a two-channel maxout: `max(x, 0)` with identity output.
pub fn relu_net() -> MaxoutNet {
    let layer = MaxoutLayer {
        weights: dmatrix![1.0; 0.0],
        bias: dvector![0.0, 0.0],
        channels: 2,
    };
    MaxoutNet::new(vec![layer], dmatrix![1.0], dvector![0.0]).expect("relu net is well-formed")
}

/// Four-quadrant planar PWA benchmark with `B = (1, 0)^T`, no offsets,
/// `|x|_inf <= 10`, `|u| <= 1`, and `|d|_inf <= dist_bound` in every region.
///
/// Region guards partition the plane by sign pattern: region 1 is the
/// nonpositive quadrant, region 2 is `x1 <= 0 <= x2`, region 3 the
/// nonnegative quadrant, region 4 is `x2 <= 0 <= x1`.
pub fn quadrant_system(dist_bound: f64) -> Result<PwaSystem, ModelError> {
    let a_mats = [
        dmatrix![-0.04, -0.461; -0.139, 0.341],
        dmatrix![0.936, 0.323; 0.788, -0.049],
        dmatrix![-0.857, 0.815; 0.491, 0.62],
        dmatrix![-0.022, 0.644; 0.758, 0.271],
    ];
    // Guard rows over (x1, x2, u); h = 0.
    let guards = [
        dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 0.0],
        dmatrix![1.0, 0.0, 0.0; 0.0, -1.0, 0.0],
        dmatrix![-1.0, 0.0, 0.0; 0.0, -1.0, 0.0],
        dmatrix![-1.0, 0.0, 0.0; 0.0, 1.0, 0.0],
    ];
    let regions = a_mats
        .into_iter()
        .zip(guards)
        .map(|(a, g)| {
            let rows = g.nrows();
            PwaRegion {
                a,
                b: dmatrix![1.0; 0.0],
                p: dvector![0.0, 0.0],
                guard: HPolyhedron::new(g, DVector::zeros(rows)).expect("guard shape"),
                dist: inf_ball(2, dist_bound),
            }
        })
        .collect();
    PwaSystem::new(regions, inf_ball(2, 10.0), interval(-1.0, 1.0))
}

/// Saturated linear controller for [`quadrant_system`]: an LQR gain for the
/// averaged dynamics, clamped to the input bounds `|u| <= 1`.
pub fn quadrant_controller() -> Result<MaxoutNet, ModelError> {
    sat_linear_to_maxout(
        &dvector![-0.03938343824130132, -0.2073480309568585],
        -1.0,
        1.0,
    )
}

/// Nonlinear double integrator map
/// `f(x, u) = [[1, 1], [0, 1]] x + (0.5, 1)^T u + (0.025, 0.025)^T x^T x`.
pub fn nonlinear_double_integrator(x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
    let quad = x.dot(x);
    dvector![
        x[0] + x[1] + 0.5 * u[0] + 0.025 * quad,
        x[1] + u[0] + 0.025 * quad
    ]
}

/// Saturated LQR controller for the double integrator's linear part,
/// clamped to `|u| <= 2`.
pub fn double_integrator_controller() -> Result<MaxoutNet, ModelError> {
    sat_linear_to_maxout(
        &dvector![-0.43448324327595583, -1.0284659329503845],
        -2.0,
        2.0,
    )
}

/// State and input sets of the double integrator case: `|x|_inf <= 6`,
/// `|u| <= 2`.
pub fn double_integrator_domain() -> (HPolyhedron, HPolyhedron) {
    (inf_ball(2, 6.0), interval(-2.0, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::eval_nn;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_system_shape() {
        let sys = scalar_system().unwrap();
        assert_eq!(sys.state_dim(), 1);
        assert_eq!(sys.input_dim(), 1);
        assert_eq!(sys.num_regions(), 1);
    }

    #[test]
    fn quadrant_controller_unsaturated_gain() {
        let net = quadrant_controller().unwrap();
        let u = eval_nn(&net, &dvector![1.0, 1.0]).unwrap();
        assert_relative_eq!(u[0], -0.03938343824130132 - 0.2073480309568585, epsilon = 1e-14);
    }

    #[test]
    fn nonlinear_double_integrator_value() {
        let f = nonlinear_double_integrator(&dvector![1.0, 2.0], &dvector![0.5]);
        // [1+2+0.25+0.125, 2+0.5+0.125]
        assert_relative_eq!(f[0], 3.375, epsilon = 1e-15);
        assert_relative_eq!(f[1], 2.625, epsilon = 1e-15);
    }
}
