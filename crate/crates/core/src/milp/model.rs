//! Model container: variables, sparse linear constraints, objective.

use super::MilpError;

/// Dense variable index; ids are assigned consecutively from 0.
pub type VarId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum VarKind {
    /// Continuous with bounds; either bound may be infinite.
    Continuous { lower: f64, upper: f64 },
    /// Binary in {0, 1}.
    Binary,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

impl Variable {
    pub fn bounds(&self) -> (f64, f64) {
        match self.kind {
            VarKind::Continuous { lower, upper } => (lower, upper),
            VarKind::Binary => (0.0, 1.0),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.kind, VarKind::Binary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Sparse row as (variable, coefficient) pairs.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

/// A mixed-integer linear program.
///
/// Rows and columns keep insertion order; that order is part of the model
/// identity (it fixes simplex pivoting, branching ties, and MPS output).
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    direction: Direction,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            kind: VarKind::Continuous { lower, upper },
        });
        self.variables.len() - 1
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> VarId {
        self.add_continuous(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            kind: VarKind::Binary,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { terms, sense, rhs });
    }

    /// Adds `expr == rhs` pinning a single variable, a common test helper.
    pub fn fix_var(&mut self, var: VarId, value: f64) {
        self.add_constraint(vec![(var, 1.0)], Sense::Eq, value);
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, f64)>, direction: Direction) {
        self.objective = terms;
        self.direction = direction;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> (&[(VarId, f64)], Direction) {
        (&self.objective, self.direction)
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.is_binary()).count()
    }

    pub fn binary_ids(&self) -> Vec<VarId> {
        (0..self.variables.len())
            .filter(|&i| self.variables[i].is_binary())
            .collect()
    }

    /// Objective value of an assignment under the model's own direction.
    pub fn eval_objective(&self, assignment: &[f64]) -> f64 {
        self.objective
            .iter()
            .map(|&(v, c)| c * assignment[v])
            .sum()
    }

    pub fn validate(&self) -> Result<(), MilpError> {
        if self.variables.is_empty() {
            return Err(MilpError::NoVariables);
        }
        for (i, v) in self.variables.iter().enumerate() {
            if let VarKind::Continuous { lower, upper } = v.kind {
                if lower.is_nan() || upper.is_nan() || lower > upper {
                    return Err(MilpError::InvalidBounds {
                        var: i,
                        lower,
                        upper,
                    });
                }
            }
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(MilpError::NonFiniteCoefficient {
                    place: format!("rhs of constraint {ci}"),
                });
            }
            for &(v, coef) in &c.terms {
                if v >= self.variables.len() {
                    return Err(MilpError::UndeclaredVariable {
                        constraint: ci,
                        var: v,
                    });
                }
                if !coef.is_finite() {
                    return Err(MilpError::NonFiniteCoefficient {
                        place: format!("constraint {ci}, variable {v}"),
                    });
                }
            }
        }
        for &(v, coef) in &self.objective {
            if v >= self.variables.len() {
                return Err(MilpError::UndeclaredVariable {
                    constraint: usize::MAX,
                    var: v,
                });
            }
            if !coef.is_finite() {
                return Err(MilpError::NonFiniteCoefficient {
                    place: format!("objective, variable {v}"),
                });
            }
        }
        Ok(())
    }
}
