//! Embedded LP/ILP solving for execution-accuracy evaluation.
//!
//! [`solve_lp`] runs a two-phase simplex, [`solve_ilp`] adds best-bound
//! branch-and-bound on top, and [`brute_force_ilp`] enumerates a finite box
//! as an independent oracle. [`lpfile`] reads and writes CPLEX LP files.

pub mod lpfile;
mod simplex;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::{CanonicalLP, Sense};
use crate::ir::ObjectiveDirection;
use crate::quantity::rational_to_f64;
use simplex::{DenseRow, SimplexOutcome};

pub use lpfile::{LpSyntaxError, emit_lp_file, parse_lp_file};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the solver accepts exactly one objective")]
    MultiObjectiveUnsupported,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("brute-force box has {0} points (limit 10^7)")]
    BoxTooLarge(u128),
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("branch-and-bound node limit reached")]
    NodeLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "Optimal",
            Status::Infeasible => "Infeasible",
            Status::Unbounded => "Unbounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Row feasibility tolerance, relative to `max(1, |rhs|)`.
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub pivot_tol: f64,
    pub max_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { feasibility_tol: 1e-9, integrality_tol: 1e-6, pivot_tol: 1e-9, max_nodes: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_value: Option<f64>,
    pub assignment: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlpSolution {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_value: Option<f64>,
    pub assignment: IndexMap<String, f64>,
    pub node_count: usize,
}

impl IlpSolution {
    fn without_point(status: Status, node_count: usize) -> Self {
        Self { status, objective_value: None, assignment: IndexMap::new(), node_count }
    }
}

/// Dense float view of a single-objective problem.
struct Prepared {
    objective: Vec<f64>,
    maximize: bool,
    rows: Vec<DenseRow>,
    nonneg: Vec<bool>,
    integral: Vec<bool>,
    names: Vec<String>,
}

fn prepare(lp: &CanonicalLP) -> Result<Prepared, SolveError> {
    if lp.objectives.len() != 1 {
        return Err(SolveError::MultiObjectiveUnsupported);
    }
    let n = lp.n_vars();
    let obj = &lp.objectives[0];
    if obj.coefficients.len() != n {
        return Err(SolveError::DimensionMismatch(format!(
            "objective has {} coefficients for {n} variables",
            obj.coefficients.len()
        )));
    }
    if lp.nonneg.len() != n || lp.integral.len() != n {
        return Err(SolveError::DimensionMismatch("bound flags do not match variable count".into()));
    }
    let mut rows = Vec::with_capacity(lp.rows.len());
    for (i, r) in lp.rows.iter().enumerate() {
        if r.coefficients.len() != n {
            return Err(SolveError::DimensionMismatch(format!(
                "row {i} has {} coefficients for {n} variables",
                r.coefficients.len()
            )));
        }
        rows.push(DenseRow {
            coefficients: r.coefficients.iter().map(rational_to_f64).collect(),
            sense: r.sense,
            rhs: rational_to_f64(&r.rhs),
        });
    }
    Ok(Prepared {
        objective: obj.coefficients.iter().map(rational_to_f64).collect(),
        maximize: obj.direction == ObjectiveDirection::Maximize,
        rows,
        nonneg: lp.nonneg.clone(),
        integral: lp.integral.clone(),
        names: lp.variable_order.clone(),
    })
}

/// Objective value at `x`, summed in variable order.
fn evaluate(objective: &[f64], x: &[f64]) -> f64 {
    objective.iter().zip(x).map(|(c, v)| c * v).sum()
}

enum Relaxation {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

impl Prepared {
    /// Solves the relaxation with extra per-variable bounds.
    fn relax(&self, lower: &[Option<f64>], upper: &[Option<f64>], opts: &SolverOptions) -> Result<Relaxation, SolveError> {
        let n = self.objective.len();
        // column layout: x⁺ for all variables, then x⁻ for free ones
        let free: Vec<usize> = (0..n).filter(|&j| !self.nonneg[j]).collect();
        let width = n + free.len();
        let expand = |coeffs: &[f64]| {
            let mut out = coeffs.to_vec();
            out.extend(free.iter().map(|&j| -coeffs[j]));
            out
        };
        let sign = if self.maximize { 1.0 } else { -1.0 };
        let c: Vec<f64> = expand(&self.objective.iter().map(|v| sign * v).collect::<Vec<_>>());
        let mut rows: Vec<DenseRow> = self
            .rows
            .iter()
            .map(|r| DenseRow { coefficients: expand(&r.coefficients), sense: r.sense, rhs: r.rhs })
            .collect();
        let unit = |j: usize| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            expand(&e)
        };
        for j in 0..n {
            if let Some(lb) = lower[j]
                && (lb > 0.0 || !self.nonneg[j])
            {
                rows.push(DenseRow { coefficients: unit(j), sense: Sense::Ge, rhs: lb });
            }
            if let Some(ub) = upper[j] {
                rows.push(DenseRow { coefficients: unit(j), sense: Sense::Le, rhs: ub });
            }
        }
        debug_assert!(rows.iter().all(|r| r.coefficients.len() == width));
        match simplex::maximize(&c, &rows, opts.pivot_tol, opts.feasibility_tol) {
            SimplexOutcome::Optimal { x, .. } => {
                let mut point = x[..n].to_vec();
                for (k, &j) in free.iter().enumerate() {
                    point[j] -= x[n + k];
                }
                Ok(Relaxation::Optimal(point))
            }
            SimplexOutcome::Infeasible => Ok(Relaxation::Infeasible),
            SimplexOutcome::Unbounded => Ok(Relaxation::Unbounded),
            SimplexOutcome::IterationLimit => Err(SolveError::IterationLimit),
        }
    }

    fn assignment(&self, x: &[f64]) -> IndexMap<String, f64> {
        self.names.iter().cloned().zip(x.iter().copied()).collect()
    }
}

/// Solves the continuous relaxation (integrality flags are ignored).
pub fn solve_lp(lp: &CanonicalLP) -> Result<LpSolution, SolveError> {
    solve_lp_with(lp, &SolverOptions::default())
}

pub fn solve_lp_with(lp: &CanonicalLP, opts: &SolverOptions) -> Result<LpSolution, SolveError> {
    let p = prepare(lp)?;
    let n = p.objective.len();
    Ok(match p.relax(&vec![None; n], &vec![None; n], opts)? {
        Relaxation::Optimal(x) => LpSolution {
            status: Status::Optimal,
            objective_value: Some(evaluate(&p.objective, &x)),
            assignment: p.assignment(&x),
        },
        Relaxation::Infeasible => {
            LpSolution { status: Status::Infeasible, objective_value: None, assignment: IndexMap::new() }
        }
        Relaxation::Unbounded => {
            LpSolution { status: Status::Unbounded, objective_value: None, assignment: IndexMap::new() }
        }
    })
}

struct Node {
    /// Relaxation value in maximization sense.
    bound: f64,
    seq: usize,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        // best bound first; older nodes first among equals
        self.bound.total_cmp(&other.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Solves with integrality enforced on flagged variables.
pub fn solve_ilp(lp: &CanonicalLP) -> Result<IlpSolution, SolveError> {
    solve_ilp_with(lp, &SolverOptions::default())
}

pub fn solve_ilp_with(lp: &CanonicalLP, opts: &SolverOptions) -> Result<IlpSolution, SolveError> {
    let p = prepare(lp)?;
    match branch_and_bound(&p, opts, true)? {
        (Search::Unbounded, nodes) => {
            // The relaxation is unbounded; with rational data the integer
            // program is then unbounded iff it has any integer point.
            let mut feas = Prepared { objective: vec![0.0; p.objective.len()], ..p };
            feas.maximize = true;
            match branch_and_bound(&feas, opts, false)? {
                (Search::Found(_), more) => Ok(IlpSolution::without_point(Status::Unbounded, nodes + more)),
                (_, more) => Ok(IlpSolution::without_point(Status::Infeasible, nodes + more)),
            }
        }
        (Search::Infeasible, nodes) => Ok(IlpSolution::without_point(Status::Infeasible, nodes)),
        (Search::Found(x), nodes) => Ok(IlpSolution {
            status: Status::Optimal,
            objective_value: Some(evaluate(&p.objective, &x)),
            assignment: p.assignment(&x),
            node_count: nodes,
        }),
    }
}

enum Search {
    Found(Vec<f64>),
    Infeasible,
    Unbounded,
}

fn branch_and_bound(p: &Prepared, opts: &SolverOptions, optimize: bool) -> Result<(Search, usize), SolveError> {
    let n = p.objective.len();
    let sign = if p.maximize { 1.0 } else { -1.0 };
    let score = |x: &[f64]| sign * evaluate(&p.objective, x);
    let mut nodes = 1;
    let lower = vec![None; n];
    let upper = vec![None; n];
    let root = match p.relax(&lower, &upper, opts)? {
        Relaxation::Optimal(x) => x,
        Relaxation::Infeasible => return Ok((Search::Infeasible, nodes)),
        Relaxation::Unbounded => return Ok((Search::Unbounded, nodes)),
    };
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(Node { bound: score(&root), seq, lower, upper, x: root });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent
            && node.bound <= best + 1e-9 * best.abs().max(1.0)
        {
            continue;
        }
        // most fractional: fractional part closest to one half
        let branch_var = (0..n)
            .filter(|&j| p.integral[j] && (node.x[j] - node.x[j].round()).abs() > opts.integrality_tol)
            .map(|j| (j, (node.x[j] - node.x[j].floor() - 0.5).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((j, _)) = branch_var else {
            let mut x = node.x.clone();
            for (xk, &int) in x.iter_mut().zip(&p.integral) {
                if int {
                    *xk = xk.round();
                }
            }
            let value = score(&x);
            if incumbent.as_ref().is_none_or(|(best, _)| value > *best) {
                incumbent = Some((value, x));
            }
            if !optimize {
                break;
            }
            continue;
        };
        let v = node.x[j];
        for (lo, hi) in [(node.lower[j], Some(v.floor())), (Some(v.ceil()), node.upper[j])] {
            if let (Some(l), Some(h)) = (lo, hi)
                && l > h
            {
                continue;
            }
            let mut lower = node.lower.clone();
            let mut upper = node.upper.clone();
            lower[j] = lo;
            upper[j] = hi;
            nodes += 1;
            if nodes > opts.max_nodes {
                return Err(SolveError::NodeLimit);
            }
            match p.relax(&lower, &upper, opts)? {
                Relaxation::Optimal(x) => {
                    seq += 1;
                    heap.push(Node { bound: score(&x), seq, lower, upper, x });
                }
                Relaxation::Infeasible => {}
                // a subproblem of a bounded relaxation is bounded
                Relaxation::Unbounded => return Ok((Search::Unbounded, nodes)),
            }
        }
    }
    Ok(match incumbent {
        Some((_, x)) => (Search::Found(x), nodes),
        None => (Search::Infeasible, nodes),
    })
}

/// Exhaustive search over the integer points of `bounds` (inclusive ranges,
/// one per variable). Points violating a row or a nonnegativity flag are
/// skipped.
pub fn brute_force_ilp(lp: &CanonicalLP, bounds: &[(i64, i64)]) -> Result<IlpSolution, SolveError> {
    brute_force_ilp_with(lp, bounds, &SolverOptions::default())
}

pub fn brute_force_ilp_with(
    lp: &CanonicalLP,
    bounds: &[(i64, i64)],
    opts: &SolverOptions,
) -> Result<IlpSolution, SolveError> {
    let p = prepare(lp)?;
    let n = p.objective.len();
    if bounds.len() != n {
        return Err(SolveError::DimensionMismatch(format!("box has {} ranges for {n} variables", bounds.len())));
    }
    if bounds.iter().any(|(lo, hi)| lo > hi) {
        return Ok(IlpSolution::without_point(Status::Infeasible, 0));
    }
    let size: u128 = bounds.iter().map(|(lo, hi)| (hi - lo + 1) as u128).product();
    if size > 10_000_000 {
        return Err(SolveError::BoxTooLarge(size));
    }
    let sign = if p.maximize { 1.0 } else { -1.0 };
    let mut x: Vec<f64> = bounds.iter().map(|(lo, _)| *lo as f64).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut visited = 0usize;
    'outer: loop {
        visited += 1;
        let feasible = (0..n).all(|j| !p.nonneg[j] || x[j] >= 0.0)
            && p.rows.iter().all(|r| {
                let lhs = evaluate(&r.coefficients, &x);
                let slack = opts.feasibility_tol * r.rhs.abs().max(1.0);
                match r.sense {
                    Sense::Le => lhs <= r.rhs + slack,
                    Sense::Ge => lhs >= r.rhs - slack,
                }
            });
        if feasible {
            let value = sign * evaluate(&p.objective, &x);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, x.clone()));
            }
        }
        for j in (0..n).rev() {
            if (x[j] as i64) < bounds[j].1 {
                x[j] += 1.0;
                continue 'outer;
            }
            x[j] = bounds[j].0 as f64;
        }
        break;
    }
    Ok(match best {
        Some((_, x)) => IlpSolution {
            status: Status::Optimal,
            objective_value: Some(evaluate(&p.objective, &x)),
            assignment: p.assignment(&x),
            node_count: visited,
        },
        None => IlpSolution::without_point(Status::Infeasible, visited),
    })
}
