//! Best-bound branch-and-bound over binary variables.
//!
//! Nodes are selected by highest LP bound; ties break toward deeper nodes
//! (depth-first dives) and then insertion order, so the node count is a
//! deterministic function of model and configuration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::model::MilpModel;
use super::simplex::{LpInstance, LpStatus};
use super::{BranchRule, MilpError, SolveResult, SolveStatus, SolverConfig};

struct Node {
    /// LP bound inherited from the parent (canonical maximize form).
    bound: f64,
    depth: u32,
    seq: u64,
    /// Branching decisions on the path from the root.
    fixes: Vec<(usize, bool)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key(other)
    }
}

impl Node {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Solves a MILP to proven optimality (within `config.gap_abs`).
///
/// `Optimal` means a feasible assignment with all binaries integral to
/// `config.int_tol` whose objective is within the gap of the global optimum.
/// Node and time limits return the incumbent (if any) with the proven bound.
pub fn solve(model: &MilpModel, config: &SolverConfig) -> Result<SolveResult, MilpError> {
    model.validate()?;
    config.validate()?;

    let inst = LpInstance::build(model);
    let sign = if inst.negated { -1.0 } else { 1.0 };
    let binaries = model.binary_ids();
    let (lower0, upper0) = inst.default_bounds();
    let start = Instant::now();

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut node_count: u64 = 0;
    let mut seq: u64 = 0;
    let mut pruned_bound = f64::NEG_INFINITY;

    heap.push(Node {
        bound: f64::INFINITY,
        depth: 0,
        seq: 0,
        fixes: Vec::new(),
    });

    let mut limit_status: Option<(SolveStatus, f64)> = None;

    while let Some(node) = heap.pop() {
        let inc_obj = incumbent.as_ref().map(|(o, _)| *o);
        if let Some(inc) = inc_obj {
            if node.bound <= inc + config.gap_abs {
                pruned_bound = pruned_bound.max(node.bound);
                // Best-bound order: everything left is prunable too.
                break;
            }
        }
        if node_count >= config.max_nodes {
            limit_status = Some((SolveStatus::NodeLimit, node.bound));
            break;
        }
        if let Some(limit) = config.time_limit {
            if start.elapsed().as_secs_f64() > limit {
                limit_status = Some((SolveStatus::TimeLimit, node.bound));
                break;
            }
        }

        let mut lower = lower0.clone();
        let mut upper = upper0.clone();
        for &(var, one) in &node.fixes {
            let v = if one { 1.0 } else { 0.0 };
            lower[var] = v;
            upper[var] = v;
        }
        let raw = inst.solve(&lower, &upper, config.lp_tol)?;
        node_count += 1;

        match raw.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                // A child LP relaxation is a subset of the root's, so this
                // can only fire at the root; the MILP itself is unbounded or
                // has an unbounded relaxation, which we report as such.
                return Ok(SolveResult {
                    status: SolveStatus::Unbounded,
                    objective_value: sign * f64::INFINITY,
                    best_bound: sign * f64::INFINITY,
                    assignment: Vec::new(),
                    node_count,
                    row_duals: None,
                });
            }
            LpStatus::Optimal => {}
        }

        if let Some(inc) = inc_obj {
            if raw.objective <= inc + config.gap_abs {
                pruned_bound = pruned_bound.max(raw.objective);
                continue;
            }
        }

        let branch_var = pick_branch_var(&binaries, &raw.values, config);
        match branch_var {
            None => {
                // Candidate incumbent. Binaries may rest within int_tol of a
                // bound without being exactly integral, which would leak
                // int_tol * M through big-M rows; polish by re-solving with
                // every binary pinned to its rounded value.
                let exact = binaries
                    .iter()
                    .all(|&b| raw.values[b] == 0.0 || raw.values[b] == 1.0);
                let polished = if exact {
                    Some((raw.objective, raw.values.clone()))
                } else {
                    for &b in &binaries {
                        let v = raw.values[b].round();
                        lower[b] = v;
                        upper[b] = v;
                    }
                    let fixed = inst.solve(&lower, &upper, config.lp_tol)?;
                    node_count += 1;
                    match fixed.status {
                        LpStatus::Optimal => Some((fixed.objective, fixed.values)),
                        _ => None,
                    }
                };
                match polished {
                    Some((obj, values)) => {
                        let better = incumbent.as_ref().map_or(true, |(o, _)| obj > *o);
                        if better {
                            incumbent = Some((obj, values));
                        }
                    }
                    None => {
                        // Rounding was infeasible: branch on the binary
                        // farthest from integrality (nonzero by failure).
                        let var = binaries
                            .iter()
                            .copied()
                            .max_by(|&a, &b| {
                                let fa = (raw.values[a] - raw.values[a].round()).abs();
                                let fb = (raw.values[b] - raw.values[b].round()).abs();
                                fa.total_cmp(&fb).then(b.cmp(&a))
                            })
                            .expect("model has binaries if polish can fail");
                        for one in [false, true] {
                            seq += 1;
                            let mut fixes = node.fixes.clone();
                            fixes.push((var, one));
                            heap.push(Node {
                                bound: raw.objective,
                                depth: node.depth + 1,
                                seq,
                                fixes,
                            });
                        }
                    }
                }
            }
            Some(var) => {
                for one in [false, true] {
                    seq += 1;
                    let mut fixes = node.fixes.clone();
                    fixes.push((var, one));
                    heap.push(Node {
                        bound: raw.objective,
                        depth: node.depth + 1,
                        seq,
                        fixes,
                    });
                }
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .fold(f64::NEG_INFINITY, f64::max);

    match (limit_status, incumbent) {
        (Some((status, bound)), inc) => {
            let (obj, assignment) = match inc {
                Some((o, a)) => (o, a),
                None => (f64::NAN, Vec::new()),
            };
            Ok(SolveResult {
                status,
                objective_value: sign * obj,
                best_bound: sign * bound,
                assignment,
                node_count,
                row_duals: None,
            })
        }
        (None, Some((obj, assignment))) => {
            let bound = obj.max(pruned_bound).max(open_bound);
            Ok(SolveResult {
                status: SolveStatus::Optimal,
                objective_value: sign * obj,
                best_bound: sign * bound,
                assignment,
                node_count,
                row_duals: None,
            })
        }
        (None, None) => Ok(SolveResult {
            status: SolveStatus::Infeasible,
            objective_value: f64::NAN,
            best_bound: f64::NAN,
            assignment: Vec::new(),
            node_count,
            row_duals: None,
        }),
    }
}

fn pick_branch_var(binaries: &[usize], values: &[f64], config: &SolverConfig) -> Option<usize> {
    let frac = |v: f64| (v - v.round()).abs();
    match config.branching {
        BranchRule::LowestIndex => binaries
            .iter()
            .copied()
            .find(|&b| frac(values[b]) > config.int_tol),
        BranchRule::MostFractional => {
            let mut best: Option<(usize, f64)> = None;
            for &b in binaries {
                let f = frac(values[b]);
                if f <= config.int_tol {
                    continue;
                }
                // Most fractional: value closest to 1/2; ties to lowest id.
                let score = (values[b] - 0.5).abs();
                if best.map_or(true, |(_, s)| score < s - 1e-15) {
                    best = Some((b, score));
                }
            }
            best.map(|(b, _)| b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::{Direction, Sense};
    use approx::assert_relative_eq;

    #[test]
    fn big_m_toggle() {
        // max x s.t. x <= 0.5 + 10(1-g), x <= 10g, g binary.
        // g=1: x <= 0.5; g=0: x <= 0 => optimum 0.5 at g=1.
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        let g = m.add_binary("g");
        m.add_constraint(vec![(x, 1.0), (g, 10.0)], Sense::Le, 10.5);
        m.add_constraint(vec![(x, 1.0), (g, -10.0)], Sense::Le, 0.0);
        m.set_objective(vec![(x, 1.0)], Direction::Maximize);
        let r = solve(&m, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_relative_eq!(r.objective_value, 0.5, epsilon = 1e-8);
        assert!((r.assignment[g] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn relu_maximum_over_interval() {
        // maximize q = max(x, 0) for x in [-1, 2] via the two-channel maxout
        // rows: q >= x, q >= 0, q <= x + M(1-d1), q <= 0 + M(1-d2), d1+d2 = 1.
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", -1.0, 2.0);
        let q = m.add_free("q");
        let d1 = m.add_binary("d1");
        let d2 = m.add_binary("d2");
        let big = 10.0;
        m.add_constraint(vec![(q, -1.0), (x, 1.0)], Sense::Le, 0.0);
        m.add_constraint(vec![(q, -1.0)], Sense::Le, 0.0);
        m.add_constraint(vec![(q, 1.0), (x, -1.0), (d1, big)], Sense::Le, big);
        m.add_constraint(vec![(q, 1.0), (d2, big)], Sense::Le, big);
        m.add_constraint(vec![(d1, 1.0), (d2, 1.0)], Sense::Eq, 1.0);
        m.set_objective(vec![(q, 1.0)], Direction::Maximize);
        let r = solve(&m, &SolverConfig::default()).unwrap();
        assert_relative_eq!(r.objective_value, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        let mut m = MilpModel::new();
        let x = m.add_free("x");
        let g = m.add_binary("g");
        m.add_constraint(vec![(x, 1.0)], Sense::Le, -1.0);
        m.add_constraint(vec![(x, 1.0)], Sense::Ge, 0.0);
        m.set_objective(vec![(x, 1.0), (g, 0.0)], Direction::Maximize);
        let r = solve(&m, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn deterministic_node_count() {
        let build = || {
            let mut m = MilpModel::new();
            let xs: Vec<_> = (0..6).map(|i| m.add_binary(format!("b{i}"))).collect();
            let y = m.add_continuous("y", 0.0, 10.0);
            for (i, &b) in xs.iter().enumerate() {
                m.add_constraint(vec![(y, 1.0), (b, 1.5 + i as f64 * 0.3)], Sense::Le, 7.3);
            }
            m.add_constraint(
                xs.iter().map(|&b| (b, 1.0)).collect::<Vec<_>>(),
                Sense::Ge,
                2.0,
            );
            let mut obj: Vec<_> = xs.iter().map(|&b| (b, 0.7)).collect();
            obj.push((y, 1.0));
            m.set_objective(obj, Direction::Maximize);
            m
        };
        let cfg = SolverConfig::default();
        let a = solve(&build(), &cfg).unwrap();
        let b = solve(&build(), &cfg).unwrap();
        assert_eq!(a.node_count, b.node_count);
        assert_eq!(a.objective_value, b.objective_value);
    }

    #[test]
    fn minimize_milp() {
        // min x + 2g s.t. x >= 1 - g, x >= 0, g binary: g=1 gives 2, g=0 gives 1.
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, f64::INFINITY);
        let g = m.add_binary("g");
        m.add_constraint(vec![(x, 1.0), (g, 1.0)], Sense::Ge, 1.0);
        m.set_objective(vec![(x, 1.0), (g, 2.0)], Direction::Minimize);
        let r = solve(&m, &SolverConfig::default()).unwrap();
        assert_relative_eq!(r.objective_value, 1.0, epsilon = 1e-8);
        assert!(r.assignment[g] < 1e-6);
    }
}
