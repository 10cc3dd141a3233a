//! Mixed-integer solver: interior-point relaxations under a best-first
//! branch-and-bound over the polygon side groups.

mod bnb;
mod convex;
mod enumerate;
mod settings;
mod warm;

pub use bnb::{branch_and_bound, heuristic_solve, SearchTrace, SolveOutcome, SolveStatus};
pub use convex::{root_bounds, solve_convex_subproblem, NodeBounds, SubproblemResult, SubproblemSolution};
pub use enumerate::{exhaustive_enumeration, EnumerationResult};
pub use settings::SolverSettings;
pub use warm::{nearest_side, warm_start, Assignment};

use crate::problem::{MiConvexProblem, VoltageEstimate};

/// Warm start from `estimate`, then either the full search or the heuristic
/// alone depending on `settings.heuristic_only`.
pub fn solve_mi(problem: &MiConvexProblem, estimate: &VoltageEstimate, settings: &SolverSettings) -> SolveOutcome {
    let warm = warm_start(problem, estimate);
    if settings.heuristic_only {
        heuristic_solve(problem, settings, &warm)
    } else {
        branch_and_bound(problem, settings, Some(&warm))
    }
}
