use std::thread;

use crate::error::VumError;
use crate::model::Scenario;
use crate::report::{scenario_digest, ComparisonReport, Dominance, ScatterRow, SolveReport, StrategyEntry};

use super::run::{effective_scenario, run_strategy};
use super::strategy::{RunSettings, StrategyId};

/// Slack allowed on the proposed strategy's common objective before it
/// counts as beaten by a baseline.
pub const DOMINANCE_TOLERANCE: f64 = 1e-3;

/// Runs S1, S2 and S3 concurrently and compares them on the unit-weight
/// objective. A failing strategy is recorded and the others still run.
pub fn compare_strategies(scenario: &Scenario, settings: &RunSettings) -> Result<ComparisonReport, VumError> {
    let digest = scenario_digest(&effective_scenario(scenario, settings)?);
    let results: Vec<(StrategyId, Result<SolveReport, VumError>)> = thread::scope(|scope| {
        let handles: Vec<_> = StrategyId::ALL
            .iter()
            .map(|&id| (id, scope.spawn(move || run_strategy(scenario, id, settings))))
            .collect();
        handles.into_iter().map(|(id, h)| (id, h.join().expect("strategy thread panicked"))).collect()
    });

    let mut entries = Vec::new();
    let mut scatter = Vec::new();
    for (strategy, result) in results {
        match result {
            Ok(report) => {
                scatter.extend(report.buses.iter().map(|b| ScatterRow {
                    strategy,
                    bus: b.bus,
                    v_pos: b.v_pos,
                    v_neg: b.v_neg,
                }));
                entries.push(StrategyEntry {
                    strategy,
                    status: Some(report.status),
                    objective: Some(report.objective),
                    common_objective: Some(report.common_objective),
                    error: None,
                    infeasible: false,
                    report: Some(report),
                });
            }
            Err(e) => {
                log::warn!("{strategy} failed: {e}");
                entries.push(StrategyEntry {
                    strategy,
                    status: None,
                    objective: None,
                    common_objective: None,
                    error: Some(e.to_string()),
                    infeasible: matches!(e, VumError::Infeasible { .. }),
                    report: None,
                });
            }
        }
    }
    let common = |id: StrategyId| entries.iter().find(|e| e.strategy == id).and_then(|e| e.common_objective);
    let dominance = common(StrategyId::S3).map(|s3| {
        let best = [StrategyId::S1, StrategyId::S2]
            .into_iter()
            .filter_map(common)
            .fold(f64::INFINITY, f64::min);
        let best_baseline = if best.is_finite() { best } else { s3 };
        Dominance { s3, best_baseline, margin: best_baseline - s3, holds: s3 <= best_baseline + DOMINANCE_TOLERANCE }
    });
    Ok(ComparisonReport { scenario_digest: digest, entries, scatter, dominance })
}
