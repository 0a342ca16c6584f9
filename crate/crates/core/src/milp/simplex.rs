//! Two-phase primal simplex with bounded variables, dense tableau.
//!
//! Every constraint row gets a slack column (coefficient +1) whose bounds
//! express the sense: `<=` gives `[0, inf)`, `>=` gives `(-inf, 0]`, `=`
//! pins the slack to zero. Phase 1 introduces artificial columns only on
//! rows whose slack cannot absorb the initial residual and maximizes the
//! negated artificial sum. Nonbasic variables rest at a bound (free ones at
//! zero); the ratio test admits bound flips. Dantzig pricing by default with
//! Bland's rule engaged after a run of degenerate pivots.

use nalgebra::{DMatrix, DVector};

use super::model::{Direction, MilpModel, Sense};
use super::{MilpError, SolveResult, SolveStatus};

/// Pivot elements smaller than this are rejected.
const PIVOT_TOL: f64 = 1e-9;
/// Hard floor below which a pivot is numerically meaningless.
const PIVOT_FLOOR: f64 = 1e-12;
/// Consecutive (near-)degenerate pivots before Bland's rule takes over.
const DEGENERATE_LIMIT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct RawLpResult {
    pub status: LpStatus,
    /// Objective in canonical maximize form; meaningful only when optimal.
    pub objective: f64,
    /// Values of the structural variables.
    pub values: Vec<f64>,
    /// Duals per original row (canonical maximize sign convention).
    pub duals: Vec<f64>,
}

/// Immutable LP data shared by all branch-and-bound nodes.
pub(crate) struct LpInstance {
    pub nstruct: usize,
    pub nrows: usize,
    /// m x (nstruct + m): structural columns then the slack identity block.
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    /// Canonical maximize objective over structural + slack columns.
    obj: DVector<f64>,
    /// Default column bounds (structural bounds, then slack bounds).
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// True when the model direction was `Minimize` (objective negated).
    pub negated: bool,
    /// Dual pricing tolerance scale.
    dual_tol: f64,
}

impl LpInstance {
    pub fn build(model: &MilpModel) -> Self {
        let nstruct = model.num_vars();
        let nrows = model.num_constraints();
        let ncols = nstruct + nrows;
        let mut matrix = DMatrix::zeros(nrows, ncols);
        let mut rhs = DVector::zeros(nrows);
        let mut lower = vec![0.0; ncols];
        let mut upper = vec![0.0; ncols];

        for (j, v) in model.variables().iter().enumerate() {
            let (lo, up) = v.bounds();
            lower[j] = lo;
            upper[j] = up;
        }
        for (i, c) in model.constraints().iter().enumerate() {
            for &(v, coef) in &c.terms {
                matrix[(i, v)] += coef;
            }
            let s = nstruct + i;
            matrix[(i, s)] = 1.0;
            rhs[i] = c.rhs;
            let (lo, up) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower[s] = lo;
            upper[s] = up;
        }

        let (terms, direction) = model.objective();
        let sign = match direction {
            Direction::Maximize => 1.0,
            Direction::Minimize => -1.0,
        };
        let mut obj = DVector::zeros(ncols);
        for &(v, coef) in terms {
            obj[v] += sign * coef;
        }
        let cmax = obj.iter().fold(0.0f64, |m, &c: &f64| m.max(c.abs()));

        Self {
            nstruct,
            nrows,
            matrix,
            rhs,
            obj,
            lower,
            upper,
            negated: sign < 0.0,
            dual_tol: 1e-9 * (1.0 + cmax),
        }
    }

    /// Solves with per-column bounds `(lower, upper)` (length nstruct + m).
    pub fn solve(&self, lower: &[f64], upper: &[f64], lp_tol: f64) -> Result<RawLpResult, MilpError> {
        Solver::new(self, lower, upper, lp_tol).run()
    }

    pub fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lower.clone(), self.upper.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column resting at zero.
    Free,
}

struct Solver<'a> {
    inst: &'a LpInstance,
    lp_tol: f64,
    /// m x (ncols + m); artificial block appended after the slack block.
    tab: DMatrix<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    status: Vec<ColStatus>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    ncols: usize,
    ntotal: usize,
    bland: bool,
    degenerate_run: usize,
}

enum StepOutcome {
    Progressed,
    Optimal,
    Unbounded,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a LpInstance, lower: &[f64], upper: &[f64], lp_tol: f64) -> Self {
        let m = inst.nrows;
        let ncols = inst.nstruct + m;
        let ntotal = ncols + m;
        let mut tab = DMatrix::zeros(m, ntotal);
        tab.view_mut((0, 0), (m, ncols)).copy_from(&inst.matrix);

        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        // Artificial columns start disabled.
        lo.extend(std::iter::repeat(0.0).take(m));
        up.extend(std::iter::repeat(0.0).take(m));

        Self {
            inst,
            lp_tol,
            tab,
            lower: lo,
            upper: up,
            status: vec![ColStatus::AtLower; ntotal],
            basis: vec![0; m],
            xb: vec![0.0; m],
            ncols,
            ntotal,
            bland: false,
            degenerate_run: 0,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            ColStatus::AtLower => self.lower[j],
            ColStatus::AtUpper => self.upper[j],
            ColStatus::Free => 0.0,
            ColStatus::Basic => unreachable!("basic column has no resting value"),
        }
    }

    fn run(mut self) -> Result<RawLpResult, MilpError> {
        let m = self.inst.nrows;

        // Rest structural and slack columns at a finite bound.
        for j in 0..self.ncols {
            self.status[j] = if self.lower[j].is_finite() {
                ColStatus::AtLower
            } else if self.upper[j].is_finite() {
                ColStatus::AtUpper
            } else {
                ColStatus::Free
            };
        }

        // Initial residuals with every column at rest; slacks absorb what
        // their bounds allow, artificials take the remainder.
        let mut artificial_used = vec![false; m];
        for i in 0..m {
            let mut r = self.inst.rhs[i];
            for j in 0..self.inst.nstruct {
                let v = self.nonbasic_value(j);
                if v != 0.0 {
                    r -= self.tab[(i, j)] * v;
                }
            }
            let s = self.inst.nstruct + i;
            if r >= self.lower[s] && r <= self.upper[s] {
                self.basis[i] = s;
                self.status[s] = ColStatus::Basic;
                self.xb[i] = r;
            } else {
                let sval = r.clamp(self.lower[s], self.upper[s]);
                self.status[s] = if sval == self.lower[s] {
                    ColStatus::AtLower
                } else {
                    ColStatus::AtUpper
                };
                let resid = r - sval;
                let t = self.ncols + i;
                let sigma = if resid >= 0.0 { 1.0 } else { -1.0 };
                self.tab[(i, t)] = 1.0;
                if sigma < 0.0 {
                    // Normalize the row so the artificial enters at +|resid|.
                    for j in 0..self.ntotal {
                        self.tab[(i, j)] = -self.tab[(i, j)];
                    }
                    self.tab[(i, t)] = 1.0;
                }
                self.lower[t] = 0.0;
                self.upper[t] = f64::INFINITY;
                self.basis[i] = t;
                self.status[t] = ColStatus::Basic;
                self.xb[i] = resid.abs();
                artificial_used[i] = true;
            }
        }

        if artificial_used.iter().any(|&u| u) {
            // Phase 1: drive the artificial sum to zero.
            let mut p1_obj = DVector::zeros(self.ntotal);
            for i in 0..m {
                if artificial_used[i] {
                    p1_obj[self.ncols + i] = -1.0;
                }
            }
            self.iterate(&p1_obj, false)?;
            let infeas: f64 = (0..m)
                .filter(|&i| self.basis[i] >= self.ncols)
                .map(|i| self.xb[i].max(0.0))
                .sum();
            if infeas > self.lp_tol {
                return Ok(RawLpResult {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    values: Vec::new(),
                    duals: Vec::new(),
                });
            }
            self.evict_artificials();
            for t in self.ncols..self.ntotal {
                self.lower[t] = 0.0;
                self.upper[t] = 0.0;
            }
        }

        // Phase 2 with the real objective.
        let mut obj = DVector::zeros(self.ntotal);
        obj.rows_mut(0, self.ncols).copy_from(&self.inst.obj);
        self.bland = false;
        self.degenerate_run = 0;
        match self.iterate(&obj, true)? {
            LpStatus::Unbounded => Ok(RawLpResult {
                status: LpStatus::Unbounded,
                objective: f64::INFINITY,
                values: Vec::new(),
                duals: Vec::new(),
            }),
            _ => {
                self.refine_basic_values();
                let values = self.extract_values();
                let objective: f64 = (0..self.inst.nstruct)
                    .map(|j| self.inst.obj[j] * values[j])
                    .sum();
                let duals = self.extract_duals(&obj);
                Ok(RawLpResult {
                    status: LpStatus::Optimal,
                    objective,
                    values,
                    duals,
                })
            }
        }
    }

    /// Pivots leftover basic artificials out of the basis where possible;
    /// rows that cannot be cleared are redundant and keep a zero-fixed
    /// artificial as a placeholder.
    fn evict_artificials(&mut self) {
        for row in 0..self.inst.nrows {
            if self.basis[row] < self.ncols {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if self.status[j] == ColStatus::Basic {
                    continue;
                }
                let a = self.tab[(row, j)].abs();
                if a > PIVOT_TOL && best.map_or(true, |(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let enter_val = self.nonbasic_value(j);
                let leaving = self.basis[row];
                self.status[leaving] = ColStatus::AtLower;
                self.pivot(row, j, enter_val);
            }
        }
    }

    /// Runs simplex iterations for the given objective. Returns `Optimal` or
    /// `Unbounded` (the latter only when `allow_unbounded`).
    fn iterate(&mut self, obj: &DVector<f64>, allow_unbounded: bool) -> Result<LpStatus, MilpError> {
        let max_iters = 1000 + 100 * (self.inst.nrows + self.ncols);
        for _ in 0..max_iters {
            match self.step(obj)? {
                StepOutcome::Optimal => return Ok(LpStatus::Optimal),
                StepOutcome::Unbounded => {
                    if allow_unbounded {
                        return Ok(LpStatus::Unbounded);
                    }
                    return Err(MilpError::NumericalFailure(
                        "phase-1 subproblem reported unbounded".to_string(),
                    ));
                }
                StepOutcome::Progressed => {}
            }
        }
        Err(MilpError::NumericalFailure(format!(
            "simplex iteration limit ({max_iters}) exceeded"
        )))
    }

    /// One pricing + ratio-test + pivot step.
    fn step(&mut self, obj: &DVector<f64>) -> Result<StepOutcome, MilpError> {
        let m = self.inst.nrows;
        let dtol = self.inst.dual_tol.max(self.lp_tol);

        // Reduced costs d_j = c_j - c_B^T B^-1 a_j, priced off the tableau.
        let mut cb = vec![0.0; m];
        for i in 0..m {
            cb[i] = obj[self.basis[i]];
        }
        let mut candidates: Vec<(usize, f64, i8)> = Vec::new();
        for j in 0..self.ntotal {
            if self.status[j] == ColStatus::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let mut d = obj[j];
            for i in 0..m {
                if cb[i] != 0.0 {
                    d -= cb[i] * self.tab[(i, j)];
                }
            }
            let dir: i8 = match self.status[j] {
                ColStatus::AtLower if d > dtol => 1,
                ColStatus::AtUpper if d < -dtol => -1,
                ColStatus::Free if d > dtol => 1,
                ColStatus::Free if d < -dtol => -1,
                _ => continue,
            };
            candidates.push((j, d.abs(), dir));
        }
        if candidates.is_empty() {
            return Ok(StepOutcome::Optimal);
        }
        if self.bland {
            candidates.sort_by_key(|&(j, _, _)| j);
        } else {
            candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        }

        // Try candidates in order, skipping those whose best pivot element is
        // numerically hopeless.
        let mut saw_tiny_pivot = false;
        for &(enter, _, dir) in &candidates {
            match self.ratio_test(enter, dir as f64) {
                RatioOutcome::Unbounded => return Ok(StepOutcome::Unbounded),
                RatioOutcome::Flip(span) => {
                    let delta = dir as f64 * span;
                    for i in 0..m {
                        self.xb[i] -= self.tab[(i, enter)] * delta;
                    }
                    self.status[enter] = match self.status[enter] {
                        ColStatus::AtLower => ColStatus::AtUpper,
                        ColStatus::AtUpper => ColStatus::AtLower,
                        other => other,
                    };
                    self.note_progress(span);
                    return Ok(StepOutcome::Progressed);
                }
                RatioOutcome::Pivot {
                    row,
                    ratio,
                    leaves_to_lower,
                } => {
                    if self.tab[(row, enter)].abs() < PIVOT_FLOOR {
                        saw_tiny_pivot = true;
                        continue;
                    }
                    let enter_val = self.nonbasic_value(enter) + dir as f64 * ratio;
                    let delta = dir as f64 * ratio;
                    let leaving = self.basis[row];
                    for i in 0..m {
                        if i != row {
                            self.xb[i] -= self.tab[(i, enter)] * delta;
                        }
                    }
                    self.status[leaving] = if leaves_to_lower {
                        ColStatus::AtLower
                    } else {
                        ColStatus::AtUpper
                    };
                    self.pivot(row, enter, enter_val);
                    self.note_progress(ratio);
                    return Ok(StepOutcome::Progressed);
                }
            }
        }
        if saw_tiny_pivot {
            return Err(MilpError::NumericalFailure(
                "all candidate pivots below 1e-12".to_string(),
            ));
        }
        // Every candidate was blocked by a zero ratio without a usable pivot;
        // treat as optimal within tolerance.
        Ok(StepOutcome::Optimal)
    }

    fn note_progress(&mut self, step: f64) {
        if step <= 1e-11 {
            self.degenerate_run += 1;
            if self.degenerate_run > DEGENERATE_LIMIT {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
    }

    fn ratio_test(&self, enter: usize, dir: f64) -> RatioOutcome {
        let m = self.inst.nrows;
        let mut best = f64::INFINITY;
        let mut best_row: Option<usize> = None;
        let mut best_pivot = 0.0f64;
        let mut best_to_lower = true;

        for i in 0..m {
            let coef = dir * self.tab[(i, enter)];
            let b = self.basis[i];
            let (ratio, pivot_mag, to_lower) = if coef > PIVOT_TOL {
                if !self.lower[b].is_finite() {
                    continue;
                }
                (((self.xb[i] - self.lower[b]) / coef).max(0.0), coef, true)
            } else if coef < -PIVOT_TOL {
                if !self.upper[b].is_finite() {
                    continue;
                }
                (((self.upper[b] - self.xb[i]) / -coef).max(0.0), -coef, false)
            } else {
                continue;
            };
            let tie = (ratio - best).abs() <= 1e-9 * (1.0 + best.abs());
            if ratio < best - 1e-12 || (tie && pivot_mag > best_pivot) {
                best = ratio.min(best);
                best_row = Some(i);
                best_pivot = pivot_mag;
                best_to_lower = to_lower;
            }
        }

        // Bound flip of the entering column itself.
        let span = self.upper[enter] - self.lower[enter];
        if span.is_finite() && span < best {
            return RatioOutcome::Flip(span);
        }
        match best_row {
            Some(row) => RatioOutcome::Pivot {
                row,
                ratio: best,
                leaves_to_lower: best_to_lower,
            },
            None => RatioOutcome::Unbounded,
        }
    }

    fn pivot(&mut self, row: usize, enter: usize, enter_val: f64) {
        let m = self.inst.nrows;
        let p = self.tab[(row, enter)];
        for j in 0..self.ntotal {
            self.tab[(row, j)] /= p;
        }
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = self.tab[(i, enter)];
            if f != 0.0 {
                for j in 0..self.ntotal {
                    self.tab[(i, j)] -= f * self.tab[(row, j)];
                }
                self.tab[(i, enter)] = 0.0;
            }
        }
        self.basis[row] = enter;
        self.status[enter] = ColStatus::Basic;
        self.xb[row] = enter_val;
    }

    /// Recomputes basic values through B^-1 (read off the slack block of the
    /// tableau), clearing accumulated pivot drift.
    fn refine_basic_values(&mut self) {
        let m = self.inst.nrows;
        let mut residual = DVector::zeros(m);
        residual.copy_from(&self.inst.rhs);
        for j in 0..self.ncols {
            if self.status[j] == ColStatus::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for i in 0..m {
                    residual[i] -= self.inst.matrix[(i, j)] * v;
                }
            }
        }
        for i in 0..m {
            let mut val = 0.0;
            for k in 0..m {
                let binv = self.tab[(i, self.inst.nstruct + k)];
                if binv != 0.0 {
                    val += binv * residual[k];
                }
            }
            // Rows normalized during phase-1 setup flip B^-1's sign along
            // with rhs, so this stays consistent: residual uses the original
            // matrix and rhs throughout.
            self.xb[i] = val;
        }
    }

    fn extract_values(&self) -> Vec<f64> {
        let mut values = vec![0.0; self.inst.nstruct];
        for (j, value) in values.iter_mut().enumerate() {
            *value = match self.status[j] {
                ColStatus::Basic => 0.0,
                _ => self.nonbasic_value(j),
            };
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.inst.nstruct {
                values[b] = self.xb[i];
            }
        }
        values
    }

    fn extract_duals(&self, obj: &DVector<f64>) -> Vec<f64> {
        let m = self.inst.nrows;
        let mut duals = vec![0.0; m];
        for (k, dual) in duals.iter_mut().enumerate() {
            let mut y = 0.0;
            for i in 0..m {
                let c = obj[self.basis[i]];
                if c != 0.0 {
                    y += c * self.tab[(i, self.inst.nstruct + k)];
                }
            }
            *dual = y;
        }
        duals
    }
}

enum RatioOutcome {
    Pivot {
        row: usize,
        ratio: f64,
        leaves_to_lower: bool,
    },
    Flip(f64),
    Unbounded,
}

/// Solves the LP relaxation of `model` (binaries relaxed to `[0, 1]`).
///
/// Returns an optimal basic solution, or infeasible/unbounded status. Row
/// duals are reported in the canonical maximize convention (negated for
/// minimization models).
pub fn lp_solve(model: &MilpModel) -> Result<SolveResult, MilpError> {
    model.validate()?;
    let inst = LpInstance::build(model);
    let (lower, upper) = inst.default_bounds();
    let raw = inst.solve(&lower, &upper, 1e-9)?;
    Ok(raw_to_result(&inst, raw))
}

pub(crate) fn raw_to_result(inst: &LpInstance, raw: RawLpResult) -> SolveResult {
    let sign = if inst.negated { -1.0 } else { 1.0 };
    match raw.status {
        LpStatus::Optimal => SolveResult {
            status: SolveStatus::Optimal,
            objective_value: sign * raw.objective,
            best_bound: sign * raw.objective,
            assignment: raw.values,
            node_count: 1,
            row_duals: Some(raw.duals),
        },
        LpStatus::Infeasible => SolveResult {
            status: SolveStatus::Infeasible,
            objective_value: f64::NAN,
            best_bound: f64::NAN,
            assignment: Vec::new(),
            node_count: 1,
            row_duals: None,
        },
        LpStatus::Unbounded => SolveResult {
            status: SolveStatus::Unbounded,
            objective_value: sign * f64::INFINITY,
            best_bound: sign * f64::INFINITY,
            assignment: Vec::new(),
            node_count: 1,
            row_duals: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::{Direction, Sense};
    use approx::assert_relative_eq;

    fn simple_box_lp() -> MilpModel {
        // max x1 + x2 with x1, x2 in [0, 1]
        let mut m = MilpModel::new();
        let x1 = m.add_continuous("x1", 0.0, 1.0);
        let x2 = m.add_continuous("x2", 0.0, 1.0);
        m.set_objective(vec![(x1, 1.0), (x2, 1.0)], Direction::Maximize);
        m
    }

    #[test]
    fn box_lp_maximum() {
        let r = lp_solve(&simple_box_lp()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_relative_eq!(r.objective_value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn interval_via_rows() {
        // max x s.t. x <= 0.6, -x <= 0.6 with free x
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        m.add_constraint(vec![(x, 1.0)], Sense::Le, 0.6);
        m.add_constraint(vec![(x, -1.0)], Sense::Le, 0.6);
        m.set_objective(vec![(x, 1.0)], Direction::Maximize);
        let r = lp_solve(&m).unwrap();
        assert_relative_eq!(r.objective_value, 0.6, epsilon = 1e-9);
        assert_relative_eq!(r.assignment[x], 0.6, epsilon = 1e-9);
    }

    #[test]
    fn relaxed_binary_bound() {
        // max x s.t. x <= 1, x <= 2 - g, g binary relaxed to [0,1]
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        let g = m.add_binary("g");
        m.add_constraint(vec![(x, 1.0)], Sense::Le, 1.0);
        m.add_constraint(vec![(x, 1.0), (g, 1.0)], Sense::Le, 2.0);
        m.set_objective(vec![(x, 1.0)], Direction::Maximize);
        let r = lp_solve(&m).unwrap();
        assert_relative_eq!(r.objective_value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        m.add_constraint(vec![(x, 1.0)], Sense::Le, -1.0);
        m.add_constraint(vec![(x, -1.0)], Sense::Le, 0.0);
        m.set_objective(vec![(x, 1.0)], Direction::Maximize);
        let r = lp_solve(&m).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        m.add_constraint(vec![(x, -1.0)], Sense::Le, 0.0);
        m.set_objective(vec![(x, 1.0)], Direction::Maximize);
        let r = lp_solve(&m).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded);
    }

    #[test]
    fn minimize_direction() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", -2.0, 5.0);
        m.set_objective(vec![(x, 1.0)], Direction::Minimize);
        let r = lp_solve(&m).unwrap();
        assert_relative_eq!(r.objective_value, -2.0, epsilon = 1e-9);
    }

    #[test]
    fn equality_rows() {
        // max x + y s.t. x + y = 1, x - y = 0 => x = y = 1/2
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        let y = m.add_free("y");
        m.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 1.0);
        m.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Eq, 0.0);
        m.set_objective(vec![(x, 1.0), (y, 1.0)], Direction::Maximize);
        let r = lp_solve(&m).unwrap();
        assert_relative_eq!(r.assignment[x], 0.5, epsilon = 1e-9);
        assert_relative_eq!(r.assignment[y], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn ge_rows_negative_side() {
        // min x s.t. x >= -3 (Ge row), x free
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        m.add_constraint(vec![(x, 1.0)], Sense::Ge, -3.0);
        m.set_objective(vec![(x, 1.0)], Direction::Minimize);
        let r = lp_solve(&m).unwrap();
        assert_relative_eq!(r.objective_value, -3.0, epsilon = 1e-9);
    }
}
