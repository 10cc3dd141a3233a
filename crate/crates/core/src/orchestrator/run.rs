//! Successive convexification: freeze the voltages in the power expressions,
//! solve, recompute exact voltages, repeat.

use std::f64::consts::PI;

use crate::error::{ConfigError, VumError};
use crate::model::{Scenario, SequenceNetworkModel};
use crate::problem::{build_problem, MiConvexProblem, ObjectiveConfig, VoltageEstimate};
use crate::report::{
    scenario_digest, BusRow, IbrRow, InjectionRow, RelaxationSummary, RunStatus, ScIterationTrace, SolveReport,
    SolverDiagnostics, TightnessCheck,
};
use crate::seqflow::{
    relaxation_gaps, solve_sequence_flow, verify_solution, ConstraintKind, FlowResult, InjectionSet,
    VerificationReport,
};
use crate::solver::{solve_mi, SolveOutcome, SolveStatus};

use super::strategy::{RunSettings, StrategyId};

/// Scenario with the polygon overrides applied, validated.
pub fn effective_scenario(scenario: &Scenario, settings: &RunSettings) -> Result<Scenario, VumError> {
    let mut s = scenario.clone();
    if let Some(n) = settings.polygon_sides {
        s.polygon_sides = n;
    }
    if let Some(m) = settings.big_m {
        s.big_m = m;
    }
    s.validate()?;
    if !(settings.lambda.is_finite() && settings.lambda >= 0.0) {
        return Err(ConfigError::NegativeWeight { name: "lambda", value: settings.lambda }.into());
    }
    Ok(s)
}

struct Iterate {
    problem: MiConvexProblem,
    outcome: SolveOutcome,
    x: Vec<f64>,
    raw_negative_deviation: f64,
    verification: VerificationReport,
    exact_objective: f64,
    relaxed_objective: f64,
}

/// Sets every magnitude variable that the objective and envelope leave slack
/// to the norm it bounds. Returns the largest `V-` adjustment at a regulated bus.
fn tighten_magnitudes(problem: &MiConvexProblem, x: &mut [f64]) -> f64 {
    let enveloped: Vec<usize> = problem.one_hot.iter().map(|g| g.bus).collect();
    let mut raw = 0.0f64;
    for (i, (dq, mag)) in problem.layout.bus_dq.iter().zip(&problem.layout.bus_mag).enumerate() {
        let neg = x[dq[2].0].hypot(x[dq[3].0]);
        let regulated = enveloped.contains(&(i + 1));
        if regulated {
            raw = raw.max((x[mag[1].0] - neg).abs());
        }
        x[mag[1].0] = neg;
        if !regulated {
            x[mag[0].0] = x[dq[0].0].hypot(x[dq[1].0]);
        }
    }
    raw
}

fn tightness(problem: &MiConvexProblem, x: &[f64], raw: f64, sides: usize, tol: f64) -> TightnessCheck {
    let cos = (PI / sides as f64).cos();
    let mut neg = 0.0f64;
    let mut pos = 0.0f64;
    for (dq, mag) in problem.layout.bus_dq.iter().zip(&problem.layout.bus_mag) {
        let np = x[dq[0].0].hypot(x[dq[1].0]);
        let nn = x[dq[2].0].hypot(x[dq[3].0]);
        neg = neg.max((x[mag[1].0] - nn).abs());
        let vp = x[mag[0].0];
        pos = pos.max(np - vp).max(vp - np / cos);
    }
    TightnessCheck {
        negative_deviation: neg,
        raw_negative_deviation: raw,
        positive_excess: pos.max(0.0),
        holds: neg <= tol && pos <= tol,
    }
}

fn exact_objective(cfg: &ObjectiveConfig, flow: &FlowResult, vpk: f64) -> f64 {
    cfg.evaluate(|b| flow.bus(b).v_pos, |b| flow.bus(b).v_neg, vpk)
}

fn max_change(buses: &[usize], old: &VoltageEstimate, new: &FlowResult) -> f64 {
    buses.iter().map(|&b| old.at(b).max_abs_diff(&new.bus(b).dq)).fold(0.0, f64::max)
}

/// Runs one strategy to convergence of the voltage estimate and verifies
/// the final injections on the exact network equations.
pub fn run_strategy(scenario: &Scenario, strategy: StrategyId, settings: &RunSettings) -> Result<SolveReport, VumError> {
    let scenario = effective_scenario(scenario, settings)?;
    settings.solver.validate().map_err(|reason| VumError::Solver { reason })?;
    let model = SequenceNetworkModel::build(&scenario)?;
    let regulated = scenario.regulated_buses();
    let vpk = scenario.v_ph_pk;
    let cfg = strategy.objective(settings.lambda, regulated.clone())?;
    let solve_cfg = cfg.clone().with_regularization(settings.current_regularization);
    let common = ObjectiveConfig::new(1.0, 1.0, regulated.clone())?;
    let ibr_buses = scenario.ibr_buses();

    let mut estimate = VoltageEstimate(solve_sequence_flow(&model, &scenario.slack, &InjectionSet::new()).dq());
    let mut trace = Vec::new();
    let mut iterates: Vec<Iterate> = Vec::new();
    let mut total_nodes = 0;
    let mut converged = false;

    for iteration in 0..settings.max_sc_iters.max(1) {
        let problem = build_problem(&scenario, &model, &estimate, &solve_cfg, &settings.build)?;
        let outcome = solve_mi(&problem, &estimate, &settings.solver);
        total_nodes += outcome.nodes;
        let Some(mut x) = outcome.x.clone().filter(|_| outcome.status != SolveStatus::Infeasible) else {
            if iterates.is_empty() {
                return Err(match outcome.status {
                    SolveStatus::Infeasible => VumError::Infeasible { iteration },
                    _ => VumError::Solver {
                        reason: outcome.failure.clone().unwrap_or_else(|| format!("{:?}", outcome.status)),
                    },
                });
            }
            log::warn!("linearization step {iteration}: {:?}, keeping earlier iterates", outcome.status);
            break;
        };
        let raw = tighten_magnitudes(&problem, &mut x);
        let decision = problem.decode(&x);
        let verification = verify_solution(&scenario, &model, &decision.currents, &settings.verify);
        let exact = exact_objective(&cfg, &verification.flow, vpk);
        let relaxed = cfg.evaluate(|b| decision.v_pos_at(b), |b| decision.v_neg_at(b), vpk);
        let change = max_change(&ibr_buses, &estimate, &verification.flow);
        log::debug!(
            "{strategy} step {iteration}: relaxed J {relaxed:.6e}, exact J {exact:.6e}, dV {change:.3e}, nodes {}",
            outcome.nodes
        );
        trace.push(ScIterationTrace {
            iteration,
            max_voltage_change: change,
            relaxed_objective: relaxed,
            exact_objective: exact,
            feasible: verification.feasible,
            worst_current_margin: verification.worst_margin(|k| matches!(k, ConstraintKind::PhaseCurrent { .. })),
            worst_power_margin: verification.worst_margin(|k| {
                matches!(
                    k,
                    ConstraintKind::ApparentPower | ConstraintKind::ActivePowerFloor | ConstraintKind::ReactivePowerFloor
                )
            }),
            solver_status: outcome.status,
            nodes: outcome.nodes,
        });
        estimate = VoltageEstimate(verification.flow.dq());
        iterates.push(Iterate {
            problem,
            outcome,
            x,
            raw_negative_deviation: raw,
            verification,
            exact_objective: exact,
            relaxed_objective: relaxed,
        });
        if change < settings.sc_tolerance {
            converged = true;
            break;
        }
    }

    let chosen = if converged {
        iterates.len() - 1
    } else {
        // lowest exact objective among verified iterates, else the last one
        iterates
            .iter()
            .enumerate()
            .filter(|(_, it)| it.verification.feasible)
            .min_by(|a, b| a.1.exact_objective.total_cmp(&b.1.exact_objective))
            .map(|(i, _)| i)
            .unwrap_or(iterates.len() - 1)
    };
    let it = &iterates[chosen];
    let status = if !converged {
        RunStatus::NonConverged
    } else if it.outcome.status == SolveStatus::NodeLimit {
        RunStatus::NodeLimit
    } else {
        RunStatus::Optimal
    };
    Ok(assemble(&scenario, strategy, settings, &cfg, &common, it, status, total_nodes, trace))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    scenario: &Scenario,
    strategy: StrategyId,
    settings: &RunSettings,
    cfg: &ObjectiveConfig,
    common: &ObjectiveConfig,
    it: &Iterate,
    status: RunStatus,
    total_nodes: usize,
    iterations: Vec<ScIterationTrace>,
) -> SolveReport {
    let vpk = scenario.v_ph_pk;
    let flow = &it.verification.flow;
    let problem = &it.problem;
    let decision = problem.decode(&it.x);
    let n = scenario.polygon_sides;
    let relaxed_pos: Vec<(usize, f64)> = cfg.regulated.iter().map(|&b| (b, decision.v_pos_at(b))).collect();
    let sec2 = 1.0 / (PI / n as f64).cos().powi(2) - 1.0;
    let bound = cfg.lambda * sec2 * cfg.regulated.iter().map(|&b| (flow.bus(b).v_pos / vpk).powi(2)).sum::<f64>();
    let discrepancy = it.relaxed_objective - it.exact_objective;
    let finite = |v: f64| v.is_finite().then_some(v);
    let o = &it.outcome;

    SolveReport {
        scenario_digest: scenario_digest(scenario),
        strategy,
        alpha: cfg.alpha,
        lambda: cfg.lambda,
        status,
        objective: it.exact_objective,
        common_objective: exact_objective(common, flow, vpk),
        feasible: it.verification.feasible,
        buses: flow
            .buses
            .iter()
            .map(|b| BusRow {
                bus: b.bus,
                v_pos: b.v_pos,
                v_neg: b.v_neg,
                v_pos_deg: b.dq.positive().arg().to_degrees(),
                v_neg_deg: b.dq.negative().arg().to_degrees(),
                vuf: b.vuf,
                regulated: cfg.regulated.contains(&b.bus),
            })
            .collect(),
        ibrs: it
            .verification
            .ibrs
            .iter()
            .map(|op| IbrRow {
                bus: op.bus,
                id_pos: op.injection.id_pos,
                iq_pos: op.injection.iq_pos,
                id_neg: op.injection.id_neg,
                iq_neg: op.injection.iq_neg,
                i_a: op.phase_currents[0],
                i_b: op.phase_currents[1],
                i_c: op.phase_currents[2],
                p: op.power.p,
                q: op.power.q,
                s: op.power.s,
                power_utilization: op.power_utilization,
                current_utilization: op.current_utilization,
            })
            .collect(),
        injections: decision.currents.iter().map(|(b, i)| InjectionRow::new(b, i)).collect(),
        checks: it.verification.checks.clone(),
        polygon_notes: it.verification.polygon_notes.clone(),
        solver: SolverDiagnostics {
            status: o.status,
            nodes: o.nodes,
            subproblems: o.subproblems,
            total_nodes,
            gap: finite(o.gap),
            lower_bound: finite(o.lower_bound),
            root_bound: finite(o.root_bound),
            heuristic_only: settings.solver.heuristic_only,
            kkt_tolerance: settings.solver.kkt_tolerance,
            absolute_gap: settings.solver.absolute_gap,
            seed: settings.solver.seed,
        },
        relaxation: RelaxationSummary {
            relaxed_objective: it.relaxed_objective,
            exact_objective: it.exact_objective,
            discrepancy,
            bound,
            within_bound: discrepancy.abs() <= bound + 1e-6,
            gaps: relaxation_gaps(flow, &relaxed_pos, n, 1e-6),
        },
        tightness: tightness(problem, &it.x, it.raw_negative_deviation, n, 1e-6),
        iterations,
    }
}
