//! Certification toolkit for piecewise-affine (PWA) systems with bounded
//! additive disturbances and maxout neural-network controllers.
//!
//! The closed loop is represented as mixed-integer linear constraints, which
//! makes support functions of disturbed reachable sets exact MILP values.
//! On top of that sit template over-approximations of reachable sets, robustly
//! positively invariant (RPI) set computation, and stability / ultimate
//! boundedness certificates. Nonlinear systems are handled through PWA
//! least-squares fits whose residual bounds become the disturbance sets.
//!
//! Module layering, bottom up:
//!
//! - [`milp`] — self-contained LP/MILP solver (bounded-variable simplex,
//!   best-bound branch-and-bound) and MPS export.
//! - [`geometry`] — halfspace polytopes: support functions, containment,
//!   scaling, redundancy removal.
//! - [`sysmodel`] — PWA plants, maxout networks, interval bounds.
//! - [`encode`] — big-M encoding of the disturbed closed loop.
//! - [`reach`] — reachable-set support values and template over-approximations.
//! - [`certify`] — safe set, terminal set, contraction margin, certificates.
//! - [`approx`] — PWA fitting of sampled nonlinear dynamics with error bounds.
//! - [`sim`] — closed-loop simulation and brute-force cross-checks.
//! - [`presets`] — built-in example systems and controllers.

pub mod approx;
pub mod certify;
pub mod encode;
pub mod geometry;
pub mod milp;
pub mod presets;
pub mod reach;
pub mod sim;
pub mod sysmodel;

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand_chacha::rand_core::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
