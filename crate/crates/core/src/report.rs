//! Serializable results of a strategy run and of a strategy comparison.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::Scenario;
use crate::orchestrator::StrategyId;
use crate::seqflow::{ConstraintCheck, Injection, InjectionSet, PolygonGapNote, RelaxationGap};
use crate::solver::SolveStatus;

/// SHA-256 of the canonical scenario JSON.
pub fn scenario_digest(scenario: &Scenario) -> String {
    hex::encode(Sha256::digest(scenario.to_json_pretty().as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusRow {
    pub bus: usize,
    pub v_pos: f64,
    pub v_neg: f64,
    /// Angles in the DQ+ and DQ- frames, degrees.
    pub v_pos_deg: f64,
    pub v_neg_deg: f64,
    pub vuf: Option<f64>,
    pub regulated: bool,
}

/// One IBR's sequence currents and resulting operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IbrRow {
    pub bus: usize,
    pub id_pos: f64,
    pub iq_pos: f64,
    pub id_neg: f64,
    pub iq_neg: f64,
    pub i_a: f64,
    pub i_b: f64,
    pub i_c: f64,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub power_utilization: f64,
    pub current_utilization: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectionRow {
    pub bus: usize,
    pub id_pos: f64,
    pub iq_pos: f64,
    pub id_neg: f64,
    pub iq_neg: f64,
}

impl InjectionRow {
    pub fn new(bus: usize, i: &Injection) -> Self {
        Self { bus, id_pos: i.id_pos, iq_pos: i.iq_pos, id_neg: i.id_neg, iq_neg: i.iq_neg }
    }

    pub fn injection(&self) -> Injection {
        Injection::new(self.id_pos, self.iq_pos, self.id_neg, self.iq_neg)
    }
}

/// Injection file accepted by verification: either a bare array of rows or
/// any object carrying an `injections` array (such as a solve report).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InjectionFile {
    Rows(Vec<InjectionRow>),
    Wrapped { injections: Vec<InjectionRow> },
}

impl InjectionFile {
    pub fn into_set(self) -> InjectionSet {
        let rows = match self {
            InjectionFile::Rows(r) | InjectionFile::Wrapped { injections: r } => r,
        };
        rows.iter().map(|r| (r.bus, r.injection())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Optimal,
    /// The last mixed-integer solve stopped at the node limit with an incumbent.
    NodeLimit,
    /// The voltage estimate did not settle within the iteration budget.
    NonConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub status: SolveStatus,
    pub nodes: usize,
    pub subproblems: usize,
    pub total_nodes: usize,
    pub gap: Option<f64>,
    pub lower_bound: Option<f64>,
    pub root_bound: Option<f64>,
    pub heuristic_only: bool,
    pub kkt_tolerance: f64,
    pub absolute_gap: f64,
    pub seed: u64,
}

/// One successive-convexification step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScIterationTrace {
    pub iteration: usize,
    /// Largest change of any voltage component at an IBR bus, pu.
    pub max_voltage_change: f64,
    pub relaxed_objective: f64,
    pub exact_objective: f64,
    pub feasible: bool,
    pub worst_current_margin: Option<f64>,
    pub worst_power_margin: Option<f64>,
    pub solver_status: SolveStatus,
    pub nodes: usize,
}

/// Relaxed program objective against the exact-voltage objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSummary {
    pub relaxed_objective: f64,
    pub exact_objective: f64,
    pub discrepancy: f64,
    /// `(1/cos^2(pi/n) - 1) * sum (V+/v_ph_pk)^2` over regulated buses.
    pub bound: f64,
    pub within_bound: bool,
    pub gaps: Vec<RelaxationGap>,
}

/// Agreement of the magnitude variables with the components they bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessCheck {
    /// Largest `|V- - ||(Vd-, Vq-)|||`.
    pub negative_deviation: f64,
    /// Same at regulated buses, before the magnitude variables were tightened.
    pub raw_negative_deviation: f64,
    /// Largest violation of `||(Vd+, Vq+)|| <= V+ <= ||.||/cos(pi/n)`.
    pub positive_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub scenario_digest: String,
    pub strategy: StrategyId,
    pub alpha: f64,
    pub lambda: f64,
    pub status: RunStatus,
    /// Strategy objective on exact power-flow voltages.
    pub objective: f64,
    /// Objective with unit weights on both terms, for comparing strategies.
    pub common_objective: f64,
    pub feasible: bool,
    pub buses: Vec<BusRow>,
    pub ibrs: Vec<IbrRow>,
    pub injections: Vec<InjectionRow>,
    pub checks: Vec<ConstraintCheck>,
    pub polygon_notes: Vec<PolygonGapNote>,
    pub solver: SolverDiagnostics,
    pub relaxation: RelaxationSummary,
    pub tightness: TightnessCheck,
    pub iterations: Vec<ScIterationTrace>,
}

impl SolveReport {
    pub fn injection_set(&self) -> InjectionSet {
        self.injections.iter().map(|r| (r.bus, r.injection())).collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub strategy: StrategyId,
    pub bus: usize,
    pub v_pos: f64,
    pub v_neg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub strategy: StrategyId,
    pub status: Option<RunStatus>,
    pub objective: Option<f64>,
    pub common_objective: Option<f64>,
    pub error: Option<String>,
    /// Set when the error was an infeasible program rather than a solver fault.
    pub infeasible: bool,
    pub report: Option<SolveReport>,
}

/// Common-objective ordering between the proposed strategy and the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub s3: f64,
    pub best_baseline: f64,
    /// `best_baseline - s3`; negative when a baseline does better.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario_digest: String,
    pub entries: Vec<StrategyEntry>,
    pub scatter: Vec<ScatterRow>,
    pub dominance: Option<Dominance>,
}

impl ComparisonReport {
    pub fn entry(&self, strategy: StrategyId) -> Option<&StrategyEntry> {
        self.entries.iter().find(|e| e.strategy == strategy)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
