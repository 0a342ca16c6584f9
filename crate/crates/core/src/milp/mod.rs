//! Mixed-integer linear programming: model container, bounded-variable
//! simplex for LP relaxations, best-bound branch-and-bound over binaries,
//! and fixed-format MPS export for cross-checking against external solvers.
//!
//! The solver is deliberately dense and presolve-free: the models produced by
//! the closed-loop encodings are small (tens of binaries, a few hundred rows)
//! and reproducibility matters more than raw speed. Identical model + config
//! always yields the identical objective and node count.

mod branch_bound;
mod model;
mod mps;
mod simplex;

pub use branch_bound::solve;
pub use model::{Constraint, Direction, MilpModel, Sense, VarId, VarKind, Variable};
pub use mps::export_mps;
pub use simplex::lp_solve;

use thiserror::Error;

/// Errors from model validation and the solver kernels.
#[derive(Debug, Error)]
pub enum MilpError {
    #[error("constraint {constraint} references undeclared variable {var}")]
    UndeclaredVariable { constraint: usize, var: usize },
    #[error("non-finite coefficient in {place}")]
    NonFiniteCoefficient { place: String },
    #[error("model has no variables")]
    NoVariables,
    #[error("invalid variable bounds [{lower}, {upper}] for variable {var}")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("simplex numerical failure: {0}")]
    NumericalFailure(String),
    #[error("solver configuration invalid: {0}")]
    BadConfig(String),
}

/// Termination status of an LP or MILP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NodeLimit,
    TimeLimit,
}

/// Outcome of a solve. For `Optimal` the objective and best bound agree to
/// the configured absolute gap; for the limit statuses the incumbent (if any)
/// is reported together with the proven bound.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective of the incumbent (NaN when no incumbent exists).
    pub objective_value: f64,
    /// Proven bound on the optimum (upper bound for maximization).
    pub best_bound: f64,
    /// Variable values of the incumbent, indexed by [`VarId`]. Empty when no
    /// incumbent exists.
    pub assignment: Vec<f64>,
    /// Number of LP relaxations solved.
    pub node_count: u64,
    /// Dual values per constraint row; populated by [`lp_solve`] only.
    pub row_duals: Option<Vec<f64>>,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value_of(&self, var: VarId) -> f64 {
        self.assignment[var]
    }
}

/// Branching variable selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum BranchRule {
    /// Binary whose relaxation value is closest to 1/2; ties to lowest id.
    #[default]
    MostFractional,
    /// Lowest-id fractional binary.
    LowestIndex,
}

/// Solver tolerances and limits.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    /// A binary is integral when within this distance of 0 or 1.
    pub int_tol: f64,
    /// Absolute optimality gap at which nodes are pruned.
    pub gap_abs: f64,
    /// Feasibility tolerance of the simplex (phase-1 objective threshold).
    pub lp_tol: f64,
    /// Maximum number of branch-and-bound nodes.
    pub max_nodes: u64,
    /// Wall-clock limit in seconds; `None` disables the check.
    pub time_limit: Option<f64>,
    pub branching: BranchRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            int_tol: 1e-6,
            gap_abs: 1e-9,
            lp_tol: 1e-9,
            max_nodes: 10_000_000,
            time_limit: None,
            branching: BranchRule::MostFractional,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), MilpError> {
        if !(self.int_tol > 0.0 && self.gap_abs > 0.0 && self.lp_tol > 0.0) {
            return Err(MilpError::BadConfig(
                "tolerances must be positive".to_string(),
            ));
        }
        Ok(())
    }
}
