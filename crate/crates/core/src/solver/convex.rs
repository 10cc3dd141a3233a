//! Continuous subproblem: the program with binaries relaxed to (or fixed within)
//! per-node bounds, handed to the Clarabel interior-point solver.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::settings::SolverSettings;
use crate::problem::{MiConvexProblem, Residuals, Sense};

/// Per-variable `(lower, upper)` bounds for one node.
pub type NodeBounds = Vec<(f64, f64)>;

pub fn root_bounds(problem: &MiConvexProblem) -> NodeBounds {
    problem.variables.iter().map(|v| (v.lower, v.upper)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Valid lower bound on the subproblem optimum.
    pub lower_bound: f64,
    pub residuals: Residuals,
    pub iterations: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubproblemResult {
    Solved(SubproblemSolution),
    /// The solver returned a primal infeasibility certificate.
    Infeasible,
    Failed { reason: String },
}

impl SubproblemResult {
    pub fn solution(&self) -> Option<&SubproblemSolution> {
        match self {
            SubproblemResult::Solved(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Default)]
struct Rows {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    fn row(&mut self, entries: impl IntoIterator<Item = (usize, f64)>, rhs: f64) {
        let r = self.b.len();
        for (c, v) in entries {
            if v != 0.0 {
                self.rows.push(r);
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.b.push(rhs);
    }

    fn append(&mut self, other: Rows) {
        let offset = self.b.len();
        self.rows.extend(other.rows.iter().map(|r| r + offset));
        self.cols.extend(other.cols);
        self.vals.extend(other.vals);
        self.b.extend(other.b);
    }
}

/// Solves the convex relaxation of `problem` under `bounds`.
///
/// Success requires the returned point to satisfy every affine, bound and
/// cone constraint to within `settings.kkt_tolerance`.
pub fn solve_convex_subproblem(
    problem: &MiConvexProblem,
    bounds: &[(f64, f64)],
    settings: &SolverSettings,
) -> SubproblemResult {
    let n = problem.num_vars();
    assert_eq!(bounds.len(), n, "bounds must cover every variable");
    for &(lo, hi) in bounds {
        if lo > hi {
            return SubproblemResult::Infeasible;
        }
    }

    // Ax + s = b with s in {0} (equalities), s >= 0 (inequalities), then cones.
    let mut zero = Rows::default();
    let mut nonneg = Rows::default();
    for c in &problem.affine {
        let entries = c.expr.terms.iter().map(|(v, k)| (v.0, *k));
        match c.sense {
            Sense::Eq => zero.row(entries, -c.expr.constant),
            Sense::Le => nonneg.row(entries, -c.expr.constant),
        }
    }
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        if lo == hi {
            zero.row([(j, 1.0)], lo);
            continue;
        }
        if lo.is_finite() {
            nonneg.row([(j, -1.0)], -lo);
        }
        if hi.is_finite() {
            nonneg.row([(j, 1.0)], hi);
        }
    }
    let mut cones = Vec::new();
    let n_zero = zero.b.len();
    let n_nonneg = nonneg.b.len();
    if n_zero > 0 {
        cones.push(SupportedConeT::ZeroConeT(n_zero));
    }
    if n_nonneg > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(n_nonneg));
    }
    let mut all = zero;
    all.append(nonneg);
    for soc in &problem.socs {
        let mut block = Rows::default();
        block.row(soc.bound.terms.iter().map(|(v, k)| (v.0, -k)), soc.bound.constant);
        for e in &soc.inner {
            block.row(e.terms.iter().map(|(v, k)| (v.0, -k)), e.constant);
        }
        cones.push(SupportedConeT::SecondOrderConeT(1 + soc.inner.len()));
        all.append(block);
    }

    let quad = problem.objective.to_quadratic(n);
    let (pi, pj, pv) = quad.p_upper.iter().fold(
        (Vec::new(), Vec::new(), Vec::new()),
        |(mut i, mut j, mut v), &(a, b, c)| {
            i.push(a);
            j.push(b);
            v.push(c);
            (i, j, v)
        },
    );
    let p = CscMatrix::new_from_triplets(n, n, pi, pj, pv);
    let m = all.b.len();
    let a = CscMatrix::new_from_triplets(m, n, all.rows, all.cols, all.vals);

    let tol = (settings.kkt_tolerance * 1e-2).clamp(1e-10, 1e-8);
    let clarabel_settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(200)
        .tol_feas(tol)
        .tol_gap_abs(tol)
        .tol_gap_rel(tol)
        .build()
        .expect("valid clarabel settings");
    let mut solver = match DefaultSolver::new(&p, &quad.q, &a, &all.b, &cones, clarabel_settings) {
        Ok(s) => s,
        Err(e) => return SubproblemResult::Failed { reason: format!("solver setup: {e:?}") },
    };
    solver.solve();
    let sol = &solver.solution;
    match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {}
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            return SubproblemResult::Infeasible
        }
        other => return SubproblemResult::Failed { reason: format!("interior-point status {other:?}") },
    }

    let x = sol.x.clone();
    let mut residuals = problem.evaluate(&x);
    residuals.bounds = bounds
        .iter()
        .zip(&x)
        .map(|(&(lo, hi), &xi)| (lo - xi).max(xi - hi))
        .fold(0.0, f64::max);
    if !(residuals.primal() <= settings.kkt_tolerance) {
        return SubproblemResult::Failed {
            reason: format!(
                "primal residual {:.3e} exceeds tolerance {:.1e} (status {:?})",
                residuals.primal(),
                settings.kkt_tolerance,
                sol.status
            ),
        };
    }
    let objective = problem.objective.eval(&x);
    let dual = sol.obj_val_dual + quad.constant;
    let lower_bound = if dual.is_finite() { dual.min(objective) } else { objective };
    SubproblemResult::Solved(SubproblemSolution {
        x,
        objective,
        lower_bound,
        residuals,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{LinExpr, Objective, SquaredTerm, VarKind};

    fn solve(problem: &MiConvexProblem) -> SubproblemSolution {
        match solve_convex_subproblem(problem, &root_bounds(problem), &SolverSettings::default()) {
            SubproblemResult::Solved(s) => s,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unconstrained_sequence_objective() {
        // min (v-)^2 + (v+ - 1)^2 with 0 <= v <= 1
        let mut p = MiConvexProblem::empty();
        let vp = p.add_var("v+", VarKind::Continuous, 0.0, 1.0);
        let vn = p.add_var("v-", VarKind::Continuous, 0.0, 1.0);
        p.objective = Objective {
            squares: vec![
                SquaredTerm { weight: 1.0, expr: LinExpr::var(vn) },
                SquaredTerm { weight: 1.0, expr: LinExpr::var(vp).plus(-1.0) },
            ],
            linear: LinExpr::new(),
        };
        let s = solve(&p);
        // both minimizers sit on a bound with a zero multiplier, so the
        // point converges only like the square root of the gap
        assert!((s.x[0] - 1.0).abs() < 1e-4, "{:?}", s.x);
        assert!(s.x[1].abs() < 1e-4);
        assert!(s.objective < 1e-8);
    }

    #[test]
    fn projection_onto_unit_disc() {
        // min (x - 2)^2 s.t. ||(x, y)|| <= 1
        let mut p = MiConvexProblem::empty();
        let x = p.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let y = p.add_var("y", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        p.add_soc("disc", vec![LinExpr::var(x), LinExpr::var(y)], LinExpr::constant(1.0));
        p.objective.squares.push(SquaredTerm { weight: 1.0, expr: LinExpr::var(x).plus(-2.0) });
        let s = solve(&p);
        assert!((s.x[0] - 1.0).abs() < 1e-6);
        assert!(s.x[1].abs() < 1e-6);
        assert!((s.objective - 1.0).abs() < 1e-6);
        assert!(s.lower_bound <= s.objective);
    }

    #[test]
    fn conflicting_rows_are_infeasible() {
        let mut p = MiConvexProblem::empty();
        let x = p.add_var("x", VarKind::Continuous, 0.0, 1.0);
        p.add_affine("ge2", LinExpr::scaled(x, -1.0).plus(2.0), Sense::Le);
        p.objective.squares.push(SquaredTerm { weight: 1.0, expr: LinExpr::var(x) });
        assert_eq!(
            solve_convex_subproblem(&p, &root_bounds(&p), &SolverSettings::default()),
            SubproblemResult::Infeasible
        );
    }

    #[test]
    fn crossed_bounds_short_circuit() {
        let mut p = MiConvexProblem::empty();
        p.add_var("x", VarKind::Binary, 0.0, 1.0);
        assert_eq!(
            solve_convex_subproblem(&p, &[(1.0, 0.0)], &SolverSettings::default()),
            SubproblemResult::Infeasible
        );
    }
}
