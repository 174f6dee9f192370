//! The surrogate LP over the high-degree set `H` and a thin wrapper around
//! the `minilp` simplex solver.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};
use serde::Serialize;

use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Feasibility tolerance for verifying solver output.
pub const LP_TOLERANCE: f64 = 1e-7;

/// A `≥` row: `Σ coeff·x ≥ rhs` over variable indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    fn lhs(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// `min Σ (c/d̂_v)·x_v` over `x ∈ [0,1]^H` subject to the edge-coverage row
/// `Σ d̂_v·x_v ≥ 2(1-ε)·k` and one neighbourhood row per `v ∈ H`,
/// `Σ_{u∈H∩N(v)} x_u ≥ d̂_v/(1+ε)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpModel {
    /// Node behind each variable, ascending.
    pub nodes: Vec<usize>,
    pub objective: Vec<f64>,
    pub coverage: Row,
    pub neighborhoods: Vec<Row>,
    pub edge_guess: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Clamped to `[0, 1]`; empty when infeasible.
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    fn infeasible() -> Self {
        LpSolution { status: LpStatus::Infeasible, x: Vec::new(), objective: f64::INFINITY }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - LP_TOLERANCE * rhs.abs().max(1.0)
}

impl LpModel {
    /// Builds the model. Every node of `h` needs a positive estimate.
    pub fn build(
        graph: &Graph,
        h: ActionSet,
        d_hat: &[f64],
        cost: f64,
        epsilon: f64,
        edge_guess: u64,
    ) -> Result<Self> {
        let nodes = h.to_vec();
        if nodes.is_empty() {
            return Err(Error::LpModel("high-degree set is empty".into()));
        }
        let mut position = vec![usize::MAX; graph.n()];
        for (j, &v) in nodes.iter().enumerate() {
            if d_hat[v].is_nan() || d_hat[v] <= 0.0 {
                return Err(Error::LpModel(format!("node {v} in H has estimate {}", d_hat[v])));
            }
            position[v] = j;
        }
        let objective = nodes.iter().map(|&v| cost / d_hat[v]).collect();
        let coverage = Row {
            terms: nodes.iter().enumerate().map(|(j, &v)| (j, d_hat[v])).collect(),
            rhs: 2.0 * (1.0 - epsilon) * edge_guess as f64,
        };
        let neighborhoods = nodes
            .iter()
            .map(|&v| Row {
                terms: graph.neighbors(v).intersection(h).iter().map(|u| (position[u], 1.0)).collect(),
                rhs: d_hat[v] / (1.0 + epsilon),
            })
            .collect();
        Ok(LpModel { nodes, objective, coverage, neighborhoods, edge_guess })
    }

    pub fn num_vars(&self) -> usize {
        self.nodes.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Checks bounds and all rows within [`LP_TOLERANCE`].
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| (-LP_TOLERANCE..=1.0 + LP_TOLERANCE).contains(v))
            && within(self.coverage.lhs(x), self.coverage.rhs)
            && self.neighborhoods.iter().all(|r| within(r.lhs(x), r.rhs))
    }

    /// The indicator of `s` as a point of this model (nodes outside `H` ignored).
    pub fn indicator(&self, s: ActionSet) -> Vec<f64> {
        self.nodes.iter().map(|&v| if s.contains(v) { 1.0 } else { 0.0 }).collect()
    }

    /// Cheap certificates of infeasibility: some row unsatisfiable at `x = 1`.
    pub fn trivially_infeasible(&self) -> bool {
        let ones = vec![1.0; self.num_vars()];
        !within(self.coverage.lhs(&ones), self.coverage.rhs)
            || self.neighborhoods.iter().any(|r| !within(r.lhs(&ones), r.rhs))
    }

    fn base_problem(&self) -> (Problem, Vec<Variable>) {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = self.objective.iter().map(|&c| problem.add_var(c, (0.0, 1.0))).collect();
        for row in &self.neighborhoods {
            problem.add_constraint(expr(&vars, row), ComparisonOp::Ge, row.rhs);
        }
        (problem, vars)
    }

    /// Turns raw solver values into a verified solution.
    fn finish(&self, raw: Vec<f64>) -> Result<LpSolution> {
        if !self.is_feasible(&raw) {
            return Err(Error::LpSolver(format!(
                "solver returned a point violating the model by more than {LP_TOLERANCE} \
                 ({} variables, edge guess {})",
                self.num_vars(),
                self.edge_guess
            )));
        }
        let x: Vec<f64> = raw.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let objective = self.objective_value(&x);
        Ok(LpSolution { status: LpStatus::Optimal, x, objective })
    }
}

fn expr(vars: &[Variable], row: &Row) -> LinearExpr {
    let mut e = LinearExpr::empty();
    for &(j, a) in &row.terms {
        e.add(vars[j], a);
    }
    e
}

fn values(solution: &minilp::Solution, vars: &[Variable]) -> Vec<f64> {
    vars.iter().map(|&v| *solution.var_value(v)).collect()
}

/// Solves `model` from scratch.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    if model.trivially_infeasible() {
        return Ok(LpSolution::infeasible());
    }
    let (mut problem, vars) = model.base_problem();
    problem.add_constraint(expr(&vars, &model.coverage), ComparisonOp::Ge, model.coverage.rhs);
    match problem.solve() {
        Ok(solution) => model.finish(values(&solution, &vars)),
        Err(minilp::Error::Infeasible) => Ok(LpSolution::infeasible()),
        Err(e) => Err(Error::LpSolver(e.to_string())),
    }
}

/// Models sharing `H` and estimates but differing in the edge guess: the
/// neighbourhood rows are solved once and the coverage row is added to a
/// copy of that solution (dual simplex warm start).
pub(crate) struct LpFamily {
    base: Option<(minilp::Solution, Vec<Variable>)>,
}

impl LpFamily {
    pub(crate) fn new(template: &LpModel) -> Result<Self> {
        if template.neighborhoods.iter().any(|r| !within(r.terms.len() as f64, r.rhs)) {
            return Ok(LpFamily { base: None });
        }
        let (problem, vars) = template.base_problem();
        match problem.solve() {
            Ok(solution) => Ok(LpFamily { base: Some((solution, vars)) }),
            Err(minilp::Error::Infeasible) => Ok(LpFamily { base: None }),
            Err(e) => Err(Error::LpSolver(e.to_string())),
        }
    }

    /// `false` when the neighbourhood rows alone are infeasible.
    pub(crate) fn is_feasible(&self) -> bool {
        self.base.is_some()
    }

    pub(crate) fn solve(&self, model: &LpModel) -> Result<LpSolution> {
        let Some((base, vars)) = &self.base else {
            return Ok(LpSolution::infeasible());
        };
        if model.trivially_infeasible() {
            return Ok(LpSolution::infeasible());
        }
        let warm = base.clone().add_constraint(
            expr(vars, &model.coverage),
            ComparisonOp::Ge,
            model.coverage.rhs,
        );
        match warm {
            Ok(solution) => match model.finish(values(&solution, vars)) {
                Ok(s) => Ok(s),
                // Numerical drift in the warm start; retry cold.
                Err(_) => solve_lp(model),
            },
            Err(minilp::Error::Infeasible) => Ok(LpSolution::infeasible()),
            Err(e) => Err(Error::LpSolver(e.to_string())),
        }
    }
}
