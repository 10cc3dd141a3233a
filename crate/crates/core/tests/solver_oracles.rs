use std::f64::consts::PI;

use proptest::prelude::*;
use vum_core::model::{IbrSpec, Line, SequenceNetworkModel};
use vum_core::problem::{
    build_problem, BuildOptions, LinExpr, MiConvexProblem, ObjectiveConfig, Sense, SquaredTerm, VarKind,
    VoltageEstimate,
};
use vum_core::seqflow::{solve_sequence_flow, InjectionSet};
use vum_core::solver::{
    branch_and_bound, exhaustive_enumeration, root_bounds, solve_convex_subproblem, solve_mi, warm_start,
    SolveStatus, SolverSettings, SubproblemResult,
};
use vum_core::synth::{feeder23, two_bus, SlackCase};

/// min w1 (x - a)^2 + w2 (y - b)^2 + c x
/// s.t. ||(x - cx, y - cy)|| <= r, x + k y <= h, |x|, |y| <= 2
struct Toy {
    w: (f64, f64),
    target: (f64, f64),
    c: f64,
    centre: (f64, f64),
    r: f64,
    k: f64,
    h: f64,
}

impl Toy {
    fn feasible(&self, x: f64, y: f64) -> bool {
        const TOL: f64 = 1e-12;
        x.abs() <= 2.0 + TOL
            && y.abs() <= 2.0 + TOL
            && (x - self.centre.0).hypot(y - self.centre.1) <= self.r + TOL
            && x + self.k * y <= self.h + TOL
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        self.w.0 * (x - self.target.0).powi(2) + self.w.1 * (y - self.target.1).powi(2) + self.c * x
    }

    fn problem(&self) -> MiConvexProblem {
        let mut p = MiConvexProblem::empty();
        let x = p.add_var("x", VarKind::Continuous, -2.0, 2.0);
        let y = p.add_var("y", VarKind::Continuous, -2.0, 2.0);
        p.add_soc(
            "disc",
            vec![LinExpr::var(x).plus(-self.centre.0), LinExpr::var(y).plus(-self.centre.1)],
            LinExpr::constant(self.r),
        );
        p.add_affine("half", LinExpr::var(x).with(y, self.k).plus(-self.h), Sense::Le);
        p.objective.squares.push(SquaredTerm { weight: self.w.0, expr: LinExpr::var(x).plus(-self.target.0) });
        p.objective.squares.push(SquaredTerm { weight: self.w.1, expr: LinExpr::var(y).plus(-self.target.1) });
        p.objective.linear = LinExpr::scaled(x, self.c);
        p
    }

    /// Smallest feasible value along a parametrized curve: a dense sweep,
    /// then repeated zooming around the best sample.
    fn curve_min(&self, at: impl Fn(f64) -> (f64, f64), t0: f64, t1: f64) -> Option<f64> {
        let eval = |t: f64| {
            let (x, y) = at(t);
            self.feasible(x, y).then(|| self.value(x, y))
        };
        let n = 20_000;
        let step = (t1 - t0) / n as f64;
        let mut best: Option<(f64, f64)> = None;
        for i in 0..=n {
            let t = t0 + i as f64 * step;
            if let Some(v) = eval(t) {
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, t));
                }
            }
        }
        let (mut v, mut t) = best?;
        let mut half = 2.0 * step;
        for _ in 0..40 {
            for i in 0..=40 {
                let s = (t - half + i as f64 * half / 20.0).clamp(t0, t1);
                if let Some(u) = eval(s) {
                    if u < v {
                        v = u;
                        t = s;
                    }
                }
            }
            half *= 0.25;
        }
        Some(v)
    }

    /// The objective is convex, so its minimum over the feasible set is
    /// either the unconstrained minimizer or lies on the set's boundary:
    /// the circle, the line or the box edges.
    fn oracle_min(&self) -> Option<f64> {
        let free = (self.target.0 - self.c / (2.0 * self.w.0), self.target.1);
        if self.feasible(free.0, free.1) {
            return Some(self.value(free.0, free.1));
        }
        let (cx, cy, r, k, h) = (self.centre.0, self.centre.1, self.r, self.k, self.h);
        let circle = self.curve_min(|t| (cx + r * t.cos(), cy + r * t.sin()), -PI, PI);
        // x + k y = h, parametrized by y
        let line = self.curve_min(|y| (h - k * y, y), -2.0, 2.0);
        let edges = [
            self.curve_min(|t| (-2.0, t), -2.0, 2.0),
            self.curve_min(|t| (2.0, t), -2.0, 2.0),
            self.curve_min(|t| (t, -2.0), -2.0, 2.0),
            self.curve_min(|t| (t, 2.0), -2.0, 2.0),
        ];
        [circle, line].into_iter().chain(edges).flatten().reduce(f64::min)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convex_solve_matches_boundary_oracle(
        w0 in 0.1f64..3.0, w1 in 0.1f64..3.0,
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0,
        cx in -0.5f64..0.5, cy in -0.5f64..0.5, r in 0.3f64..1.2,
        k in -2.0f64..2.0, h in -0.2f64..1.0,
    ) {
        let toy = Toy { w: (w0, w1), target: (a, b), c, centre: (cx, cy), r, k, h };
        let p = toy.problem();
        let solved = solve_convex_subproblem(&p, &root_bounds(&p), &SolverSettings::default());
        match toy.oracle_min() {
            Some(best) => {
                let s = solved.solution().expect("feasible program solves");
                prop_assert!((s.objective - best).abs() <= 1e-6, "solver {} oracle {}", s.objective, best);
                prop_assert!(s.lower_bound <= s.objective + 1e-12);
            }
            None => prop_assert!(matches!(solved, SubproblemResult::Infeasible)),
        }
    }
}

fn linearized(s: &vum_core::model::Scenario, cfg: &ObjectiveConfig, prune: bool) -> (MiConvexProblem, VoltageEstimate) {
    let model = SequenceNetworkModel::build(s).unwrap();
    let est = VoltageEstimate(solve_sequence_flow(&model, &s.slack, &InjectionSet::new()).dq());
    let p = build_problem(s, &model, &est, cfg, &BuildOptions { prune_dominated_sides: prune }).unwrap();
    (p, est)
}

fn two_regulated_buses(sides: usize) -> vum_core::model::Scenario {
    let mut s = two_bus(SlackCase::Moderate);
    s.m = 2;
    s.lines.push(Line { from: 1, to: 2, r: 0.02, x: 0.05 });
    s.ibrs.push(IbrSpec { bus: 2, i_max: 0.3, s_max: 0.25, p_min: 0.0, q_min: -0.2 });
    s.polygon_sides = sides;
    s
}

#[test]
fn two_bus_four_sides_matches_sixteen_assignments() {
    let s = two_regulated_buses(4);
    let cfg = ObjectiveConfig::new(1.0, 1.0, s.regulated_buses()).unwrap();
    let (p, _) = linearized(&s, &cfg, false);
    let settings = SolverSettings::default();
    let en = exhaustive_enumeration(&p, &settings);
    assert_eq!(en.evaluated, 16);
    let bb = branch_and_bound(&p, &settings, None);
    assert_eq!(bb.status, SolveStatus::Optimal);
    assert!((bb.objective - en.objective).abs() <= 1e-6, "{} vs {}", bb.objective, en.objective);
}

#[test]
fn unreachable_power_floor_is_infeasible() {
    let mut s = two_bus(SlackCase::Moderate);
    s.ibrs[0] = IbrSpec { bus: 1, i_max: 0.1, s_max: 10.0, p_min: 1.0, q_min: -1.0 };
    let cfg = ObjectiveConfig::new(1.0, 1.0, s.regulated_buses()).unwrap();
    let (p, est) = linearized(&s, &cfg, true);
    let out = solve_mi(&p, &est, &SolverSettings::default());
    assert_eq!(out.status, SolveStatus::Infeasible);
    assert!(out.x.is_none());
}

#[test]
fn heuristic_only_equals_fixed_subproblem() {
    let s = feeder23(SlackCase::Moderate);
    let cfg = ObjectiveConfig::new(1.0, 1.0, s.regulated_buses()).unwrap();
    let (p, est) = linearized(&s, &cfg, true);
    let settings = SolverSettings { heuristic_only: true, ..SolverSettings::default() };
    let out = solve_mi(&p, &est, &settings);
    let warm = warm_start(&p, &est);
    let fixed = solve_convex_subproblem(&p, &warm.fix(&p, &root_bounds(&p)), &settings);
    let SubproblemResult::Solved(direct) = fixed else { panic!("fixed assignment solves") };
    assert_eq!(out.objective, direct.objective);
    assert_eq!(out.assignment, Some(warm));
}

#[test]
fn warm_start_bounds_the_optimum_and_traces_are_monotone() {
    let settings = SolverSettings::default();
    for case in [SlackCase::Moderate, SlackCase::Severe] {
        for (alpha, lambda) in [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            let mut s = feeder23(case);
            s.regulated = vum_core::model::RegulatedSet::Keyword(vum_core::model::RegulatedKeyword::AllBuses);
            let cfg = ObjectiveConfig::new(alpha, lambda, s.regulated_buses()).unwrap().with_regularization(1e-6);
            let (p, est) = linearized(&s, &cfg, true);
            let warm = warm_start(&p, &est);
            let heur = vum_core::solver::heuristic_solve(&p, &settings, &warm);
            let bb = branch_and_bound(&p, &settings, Some(&warm));
            assert_eq!(bb.status, SolveStatus::Optimal);
            assert!(heur.objective >= bb.objective - 1e-9);
            assert!(bb.root_bound <= bb.objective + 1e-9);
            assert!(bb.gap <= settings.absolute_gap);
            for w in bb.trace.incumbent.windows(2) {
                assert!(w[1] <= w[0]);
            }
            for w in bb.trace.bound.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
            let r = p.evaluate(bb.x.as_ref().unwrap());
            assert!(r.primal() <= settings.kkt_tolerance);
            assert!(r.integrality <= 1e-6);
        }
    }
}

#[test]
fn search_is_deterministic() {
    let s = feeder23(SlackCase::Severe);
    let cfg = ObjectiveConfig::new(0.0, 1.0, s.regulated_buses()).unwrap().with_regularization(1e-6);
    let (p, est) = linearized(&s, &cfg, false);
    let a = solve_mi(&p, &est, &SolverSettings::default());
    let b = solve_mi(&p, &est, &SolverSettings::default());
    assert_eq!(a.x, b.x);
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.trace, b.trace);
}
