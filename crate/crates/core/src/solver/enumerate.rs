use super::convex::{root_bounds, solve_convex_subproblem, SubproblemResult};
use super::settings::SolverSettings;
use super::warm::Assignment;
use crate::problem::MiConvexProblem;

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    /// `+inf` when no assignment is feasible.
    pub objective: f64,
    pub assignment: Option<Assignment>,
    pub x: Option<Vec<f64>>,
    /// Assignments whose fixed subproblem was solved.
    pub evaluated: usize,
    pub failures: usize,
}

/// Solves every one-hot assignment with the continuous solver and keeps the
/// best. Exponential in the number of groups; meant for small instances.
pub fn exhaustive_enumeration(problem: &MiConvexProblem, settings: &SolverSettings) -> EnumerationResult {
    let root = root_bounds(problem);
    let sizes: Vec<usize> = problem.one_hot.iter().map(|g| g.members.len()).collect();
    let mut current = vec![0usize; sizes.len()];
    let mut best = EnumerationResult { objective: f64::INFINITY, assignment: None, x: None, evaluated: 0, failures: 0 };
    loop {
        let assignment = Assignment(current.clone());
        let allowed = problem
            .one_hot
            .iter()
            .zip(&current)
            .all(|(g, &k)| problem.variables[g.members[k].0].upper > 0.0);
        if allowed {
            best.evaluated += 1;
            match solve_convex_subproblem(problem, &assignment.fix(problem, &root), settings) {
                SubproblemResult::Solved(s) if s.objective < best.objective => {
                    best.objective = s.objective;
                    best.x = Some(s.x);
                    best.assignment = Some(assignment);
                }
                SubproblemResult::Failed { .. } => best.failures += 1,
                _ => {}
            }
        }
        // odometer increment
        let mut g = 0;
        loop {
            if g == sizes.len() {
                return best;
            }
            current[g] += 1;
            if current[g] < sizes[g] {
                break;
            }
            current[g] = 0;
            g += 1;
        }
    }
}
