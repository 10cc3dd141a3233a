//! Best-first branch-and-bound over the one-hot side groups.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::convex::{root_bounds, solve_convex_subproblem, NodeBounds, SubproblemResult, SubproblemSolution};
use super::settings::SolverSettings;
use super::warm::Assignment;
use crate::problem::{DecisionVector, MiConvexProblem};

const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    SubproblemFailure,
}

impl SolveStatus {
    /// Whether the outcome carries a usable incumbent.
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::NodeLimit)
    }
}

/// Incumbent and global bound after each processed node.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub incumbent: Vec<f64>,
    pub bound: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub x: Option<Vec<f64>>,
    pub primal: Option<DecisionVector>,
    pub assignment: Option<Assignment>,
    /// Incumbent objective, `+inf` without one.
    pub objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub root_bound: f64,
    /// Tree nodes whose relaxation was solved.
    pub nodes: usize,
    /// All continuous solves, including incumbent polishing.
    pub subproblems: usize,
    pub trace: SearchTrace,
    pub elapsed: Duration,
    pub failure: Option<String>,
}

struct Node {
    id: usize,
    bound: f64,
    bounds: NodeBounds,
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
    // BinaryHeap is a max-heap: reverse so the lowest bound, then lowest id, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.id.cmp(&self.id))
    }
}

struct Search<'a> {
    problem: &'a MiConvexProblem,
    settings: &'a SolverSettings,
    subproblems: usize,
    incumbent: Option<(f64, Vec<f64>, Assignment)>,
    failure: Option<String>,
}

impl Search<'_> {
    fn solve(&mut self, bounds: &[(f64, f64)]) -> SubproblemResult {
        self.subproblems += 1;
        solve_convex_subproblem(self.problem, bounds, self.settings)
    }

    fn incumbent_value(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |i| i.0)
    }

    /// Re-solves with the assignment fixed and keeps it if it improves.
    fn try_assignment(&mut self, assignment: Assignment, base: &NodeBounds) {
        let fixed = assignment.fix(self.problem, base);
        match self.solve(&fixed) {
            SubproblemResult::Solved(s) if s.objective < self.incumbent_value() => {
                self.incumbent = Some((s.objective, s.x, assignment));
            }
            SubproblemResult::Failed { reason } => {
                self.failure.get_or_insert(reason);
            }
            _ => {}
        }
    }
}

/// Group and member whose relaxed value is nearest 0.5, or `None` if integral.
fn branching_choice(problem: &MiConvexProblem, x: &[f64]) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (g, group) in problem.one_hot.iter().enumerate() {
        for (k, v) in group.members.iter().enumerate() {
            let frac = x[v.0].min(1.0 - x[v.0]);
            if frac > INTEGRALITY_TOL && best.is_none_or(|b| frac > b.0) {
                best = Some((frac, g, k));
            }
        }
    }
    best.map(|(_, g, k)| (g, k))
}

/// Exact optimum over the one-hot assignments, to within `absolute_gap`,
/// unless the node limit or a subproblem failure intervenes.
pub fn branch_and_bound(
    problem: &MiConvexProblem,
    settings: &SolverSettings,
    warm: Option<&Assignment>,
) -> SolveOutcome {
    let start = Instant::now();
    let root = root_bounds(problem);
    let mut search = Search { problem, settings, subproblems: 0, incumbent: None, failure: None };
    if let Some(a) = warm {
        search.try_assignment(a.clone(), &root);
    }

    let mut trace = SearchTrace::default();
    let mut nodes = 1;
    let root_solution = match search.solve(&root) {
        SubproblemResult::Solved(s) => s,
        SubproblemResult::Infeasible => {
            return finish(problem, search, SolveStatus::Infeasible, f64::INFINITY, f64::INFINITY, 1, trace, start)
        }
        SubproblemResult::Failed { reason } => {
            search.failure = Some(reason);
            return finish(
                problem,
                search,
                SolveStatus::SubproblemFailure,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
                1,
                trace,
                start,
            );
        }
    };
    let root_bound = root_solution.lower_bound;

    let mut heap = BinaryHeap::new();
    let mut next_id = 1;
    // bounds of subtrees whose relaxation could not be solved; they stay open forever
    let mut unresolved = f64::INFINITY;
    let enqueue = |search: &mut Search, heap: &mut BinaryHeap<Node>, id: usize, bounds: NodeBounds, s: SubproblemSolution| {
        if branching_choice(problem, &s.x).is_none() {
            let a = Assignment::from_point(problem, &s.x);
            search.try_assignment(a, &bounds);
        } else {
            heap.push(Node { id, bound: s.lower_bound, bounds, x: s.x });
        }
    };
    enqueue(&mut search, &mut heap, 0, root, root_solution);

    let global_bound = |heap: &BinaryHeap<Node>, unresolved: f64, inc: f64| {
        heap.peek().map_or(inc, |n| n.bound).min(unresolved).min(inc)
    };
    let mut limit_hit = false;
    trace.incumbent.push(search.incumbent_value());
    trace.bound.push(global_bound(&heap, unresolved, search.incumbent_value()).max(root_bound));

    while let Some(node) = heap.pop() {
        if node.bound >= search.incumbent_value() - settings.absolute_gap {
            heap.clear();
            break;
        }
        if nodes + 2 > settings.max_nodes {
            heap.push(node);
            limit_hit = true;
            break;
        }
        let (g, k) = branching_choice(problem, &node.x).expect("queued nodes are fractional");
        let group = &problem.one_hot[g];
        let mut one = node.bounds.clone();
        for (j, v) in group.members.iter().enumerate() {
            let val = if j == k { 1.0 } else { 0.0 };
            one[v.0] = (val, val);
        }
        let mut zero = node.bounds.clone();
        zero[group.members[k].0].1 = 0.0;

        for child in [one, zero] {
            let id = next_id;
            next_id += 1;
            nodes += 1;
            match search.solve(&child) {
                SubproblemResult::Solved(mut s) => {
                    s.lower_bound = s.lower_bound.max(node.bound);
                    if s.lower_bound < search.incumbent_value() - settings.absolute_gap {
                        enqueue(&mut search, &mut heap, id, child, s);
                    }
                }
                SubproblemResult::Infeasible => {}
                SubproblemResult::Failed { reason } => {
                    log::warn!("node {id}: {reason}");
                    search.failure.get_or_insert(reason);
                    unresolved = unresolved.min(node.bound);
                }
            }
        }
        let inc = search.incumbent_value();
        let bound = global_bound(&heap, unresolved, inc);
        trace.incumbent.push(inc);
        trace.bound.push(bound.max(*trace.bound.last().unwrap_or(&f64::NEG_INFINITY)).min(inc));
    }

    let inc = search.incumbent_value();
    let lower = global_bound(&heap, unresolved, inc).max(root_bound.min(inc));
    let status = if search.incumbent.is_none() {
        if unresolved.is_finite() {
            SolveStatus::SubproblemFailure
        } else {
            SolveStatus::Infeasible
        }
    } else if limit_hit {
        SolveStatus::NodeLimit
    } else if unresolved.is_finite() && unresolved < inc - settings.absolute_gap {
        SolveStatus::SubproblemFailure
    } else {
        SolveStatus::Optimal
    };
    let mut out = finish(problem, search, status, lower, root_bound, nodes, trace, start);
    if status == SolveStatus::Optimal {
        out.failure = None;
    }
    out
}

/// Solves the warm-start assignment only, with the root relaxation as bound.
pub fn heuristic_solve(problem: &MiConvexProblem, settings: &SolverSettings, warm: &Assignment) -> SolveOutcome {
    let start = Instant::now();
    let root = root_bounds(problem);
    let mut search = Search { problem, settings, subproblems: 0, incumbent: None, failure: None };
    search.try_assignment(warm.clone(), &root);
    let root_bound = match search.solve(&root) {
        SubproblemResult::Solved(s) => s.lower_bound,
        SubproblemResult::Infeasible => {
            return finish(problem, search, SolveStatus::Infeasible, f64::INFINITY, f64::INFINITY, 1, SearchTrace::default(), start)
        }
        SubproblemResult::Failed { .. } => f64::NEG_INFINITY,
    };
    let inc = search.incumbent_value();
    let status = match &search.incumbent {
        Some(_) if inc - root_bound <= settings.absolute_gap => SolveStatus::Optimal,
        Some(_) => SolveStatus::NodeLimit,
        None if search.failure.is_some() => SolveStatus::SubproblemFailure,
        None => SolveStatus::Infeasible,
    };
    let trace = SearchTrace { incumbent: vec![inc], bound: vec![root_bound.min(inc)] };
    finish(problem, search, status, root_bound.min(inc), root_bound, 1, trace, start)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &MiConvexProblem,
    search: Search,
    status: SolveStatus,
    lower_bound: f64,
    root_bound: f64,
    nodes: usize,
    trace: SearchTrace,
    start: Instant,
) -> SolveOutcome {
    let (objective, x, assignment) = match search.incumbent {
        Some((obj, x, a)) => (obj, Some(x), Some(a)),
        None => (f64::INFINITY, None, None),
    };
    let gap = if objective.is_finite() { (objective - lower_bound).max(0.0) } else { f64::INFINITY };
    SolveOutcome {
        status,
        primal: x.as_ref().map(|x| problem.decode(x)),
        x,
        assignment,
        objective,
        lower_bound,
        gap,
        root_bound,
        nodes,
        subproblems: search.subproblems,
        trace,
        elapsed: start.elapsed(),
        failure: search.failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{LinExpr, Sense, SquaredTerm, VarId, VarKind};
    use crate::solver::exhaustive_enumeration;

    /// min (y - target)^2 with y = sum_k c_k x_k, one one-hot group.
    fn pick_one(coeffs: &[f64], target: f64) -> MiConvexProblem {
        let mut p = MiConvexProblem::empty();
        let y = p.add_var("y", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let xs: Vec<_> = (0..coeffs.len()).map(|k| p.add_var(format!("x{k}"), VarKind::Binary, 0.0, 1.0)).collect();
        let mut def = LinExpr::scaled(y, -1.0);
        for (x, c) in xs.iter().zip(coeffs) {
            def.push(*x, *c);
        }
        p.add_affine("def", def, Sense::Eq);
        p.add_one_hot(1, xs);
        p.objective.squares.push(SquaredTerm { weight: 1.0, expr: LinExpr::var(y).plus(-target) });
        p
    }

    #[test]
    fn picks_the_closest_value() {
        let p = pick_one(&[0.0, 1.0, 3.0, 7.0], 2.6);
        let out = branch_and_bound(&p, &SolverSettings::default(), None);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.assignment, Some(Assignment(vec![2])));
        assert!((out.objective - 0.16).abs() < 1e-7);
        let e = exhaustive_enumeration(&p, &SolverSettings::default());
        assert!((e.objective - out.objective).abs() < 1e-7);
    }

    #[test]
    fn traces_are_monotone() {
        let p = pick_one(&[0.0, 1.0, 3.0, 7.0, 2.0, 5.5], 4.1);
        let out = branch_and_bound(&p, &SolverSettings::default(), Some(&Assignment(vec![0])));
        assert_eq!(out.status, SolveStatus::Optimal);
        for w in out.trace.incumbent.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in out.trace.bound.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!(out.gap <= 1e-6);
        assert!(out.root_bound <= out.objective + 1e-9);
    }

    #[test]
    fn node_limit_keeps_incumbent() {
        let p = pick_one(&[0.0, 1.0, 3.0, 7.0, 2.0, 5.5], 4.1);
        let settings = SolverSettings { max_nodes: 1, ..SolverSettings::default() };
        let out = branch_and_bound(&p, &settings, Some(&Assignment(vec![0])));
        assert_eq!(out.status, SolveStatus::NodeLimit);
        assert!((out.objective - 4.1f64.powi(2)).abs() < 1e-6);
        assert!(out.gap > 0.0);
    }

    #[test]
    fn infeasible_everywhere() {
        let mut p = pick_one(&[0.0, 1.0], 0.5);
        let y = VarId(0);
        p.add_affine("y>=2", LinExpr::scaled(y, -1.0).plus(2.0), Sense::Le);
        let out = branch_and_bound(&p, &SolverSettings::default(), None);
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.x.is_none());
    }

    #[test]
    fn heuristic_matches_fixed_solve() {
        let p = pick_one(&[0.0, 1.0, 3.0], 0.8);
        let warm = Assignment(vec![2]);
        let out = heuristic_solve(&p, &SolverSettings::default(), &warm);
        let fixed = warm.fix(&p, &root_bounds(&p));
        let direct = solve_convex_subproblem(&p, &fixed, &SolverSettings::default());
        assert_eq!(out.objective, direct.solution().unwrap().objective);
        assert_eq!(out.status, SolveStatus::NodeLimit);
    }
}
