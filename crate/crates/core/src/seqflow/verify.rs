//! Exact feasibility check of a candidate injection.
//!
//! Everything here uses the exact power flow and the exact circular/phase
//! limits; the polygonal approximations used by the optimizer only show up as
//! informational gap notes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::current::{phase_current_magnitude, Phase};
use super::flow::{solve_sequence_flow, FlowResult, Injection, InjectionSet};
use super::power::{apparent_power, PowerOutput};
use crate::model::{Scenario, SequenceNetworkModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    /// Absolute slack on phase current limits (pu).
    pub current: f64,
    /// Slack on the apparent power cap and power floors, relative to `s_max`
    /// (with a floor of 1 pu for the scale).
    pub power_rel: f64,
    /// Absolute slack on the sequence voltage caps (pu).
    pub voltage: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self { current: 1e-6, power_rel: 1e-3, voltage: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintKind {
    PhaseCurrent { phase: Phase },
    ApparentPower,
    ActivePowerFloor,
    ReactivePowerFloor,
    PositiveVoltageCap,
    NegativeVoltageCap,
    /// An injection was supplied at a bus without an IBR.
    NoIbrAtBus,
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintKind::PhaseCurrent { phase } => write!(f, "phase {phase} current limit"),
            ConstraintKind::ApparentPower => f.write_str("apparent power limit"),
            ConstraintKind::ActivePowerFloor => f.write_str("active power floor"),
            ConstraintKind::ReactivePowerFloor => f.write_str("reactive power floor"),
            ConstraintKind::PositiveVoltageCap => f.write_str("positive-sequence voltage cap"),
            ConstraintKind::NegativeVoltageCap => f.write_str("negative-sequence voltage cap"),
            ConstraintKind::NoIbrAtBus => f.write_str("injection at bus without IBR"),
        }
    }
}

/// One evaluated constraint. `margin >= 0` means satisfied exactly; the
/// check passes when `margin >= -tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub bus: usize,
    #[serde(flatten)]
    pub kind: ConstraintKind,
    pub value: f64,
    pub limit: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub satisfied: bool,
}

impl ConstraintCheck {
    fn upper(bus: usize, kind: ConstraintKind, value: f64, limit: f64, tolerance: f64) -> Self {
        let margin = limit - value;
        Self { bus, kind, value, limit, margin, tolerance, satisfied: margin >= -tolerance }
    }

    fn lower(bus: usize, kind: ConstraintKind, value: f64, limit: f64, tolerance: f64) -> Self {
        let margin = value - limit;
        Self { bus, kind, value, limit, margin, tolerance, satisfied: margin >= -tolerance }
    }
}

/// Operating point of one IBR under the exact flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbrOperatingPoint {
    pub bus: usize,
    pub injection: Injection,
    /// Peak current of phases a, b, c.
    pub phase_currents: [f64; 3],
    pub power: PowerOutput,
    /// `S / s_max` (0 for a unit rated at zero).
    pub power_utilization: f64,
    /// `max phase current / i_max` (0 for a unit rated at zero).
    pub current_utilization: f64,
}

/// Where the exact output leaves the inscribed power polygon. This is
/// expected: the polygon is only enforced at the frozen voltage estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonGapNote {
    pub bus: usize,
    pub s: f64,
    pub s_max: f64,
    /// Largest `P cos(theta_k) + Q sin(theta_k) - s_max cos(pi/n)` over sides.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub flow: FlowResult,
    pub ibrs: Vec<IbrOperatingPoint>,
    pub checks: Vec<ConstraintCheck>,
    pub polygon_notes: Vec<PolygonGapNote>,
    pub feasible: bool,
}

impl VerificationReport {
    pub fn violations(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.satisfied)
    }

    /// Smallest margin over all checks of the given family.
    pub fn worst_margin(&self, pred: impl Fn(&ConstraintKind) -> bool) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| pred(&c.kind))
            .map(|c| c.margin)
            .reduce(f64::min)
    }
}

/// Runs the exact flow for `inj` and evaluates every operating limit.
pub fn verify_solution(
    scenario: &Scenario,
    model: &SequenceNetworkModel,
    inj: &InjectionSet,
    tol: &VerifyTolerances,
) -> VerificationReport {
    let mut checks = Vec::new();
    let mut known = InjectionSet::new();
    for (bus, i) in inj.iter() {
        if scenario.ibr_at(bus).is_none() || !i.is_finite() {
            checks.push(ConstraintCheck::upper(bus, ConstraintKind::NoIbrAtBus, 1.0, 0.0, 0.0));
        } else {
            known.insert(bus, *i);
        }
    }
    let flow = solve_sequence_flow(model, &scenario.slack, &known);
    let n = scenario.polygon_sides;
    let shrink = (PI / n as f64).cos();

    let mut ibrs = Vec::with_capacity(scenario.ibrs.len());
    let mut polygon_notes = Vec::new();
    for spec in &scenario.ibrs {
        let injection = known.get(spec.bus);
        let v = flow.bus(spec.bus).dq;
        let phase_currents = Phase::ALL.map(|p| phase_current_magnitude(&injection, p));
        for (p, value) in Phase::ALL.iter().zip(phase_currents) {
            checks.push(ConstraintCheck::upper(
                spec.bus,
                ConstraintKind::PhaseCurrent { phase: *p },
                value,
                spec.i_max,
                tol.current,
            ));
        }
        let power = apparent_power(&v, &injection);
        let ptol = tol.power_rel * spec.s_max.max(1.0);
        checks.push(ConstraintCheck::upper(spec.bus, ConstraintKind::ApparentPower, power.s, spec.s_max, ptol));
        checks.push(ConstraintCheck::lower(spec.bus, ConstraintKind::ActivePowerFloor, power.p, spec.p_min, ptol));
        checks.push(ConstraintCheck::lower(spec.bus, ConstraintKind::ReactivePowerFloor, power.q, spec.q_min, ptol));

        let excess = (0..n)
            .map(|k| {
                let theta = 2.0 * k as f64 * PI / n as f64;
                power.p * theta.cos() + power.q * theta.sin() - spec.s_max * shrink
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if excess > 0.0 {
            polygon_notes.push(PolygonGapNote { bus: spec.bus, s: power.s, s_max: spec.s_max, excess });
        }

        let max_current = phase_currents.iter().copied().fold(0.0, f64::max);
        ibrs.push(IbrOperatingPoint {
            bus: spec.bus,
            injection,
            phase_currents,
            power,
            power_utilization: ratio(power.s, spec.s_max),
            current_utilization: ratio(max_current, spec.i_max),
        });
    }

    for bv in &flow.buses {
        checks.push(ConstraintCheck::upper(
            bv.bus,
            ConstraintKind::PositiveVoltageCap,
            bv.v_pos,
            scenario.v_ph_pk,
            tol.voltage,
        ));
        checks.push(ConstraintCheck::upper(
            bv.bus,
            ConstraintKind::NegativeVoltageCap,
            bv.v_neg,
            scenario.v_ph_pk,
            tol.voltage,
        ));
    }

    let feasible = checks.iter().all(|c| c.satisfied);
    VerificationReport { flow, ibrs, checks, polygon_notes, feasible }
}

fn ratio(value: f64, rating: f64) -> f64 {
    if rating > 0.0 {
        value / rating
    } else {
        0.0
    }
}

/// Ratio between a relaxed positive-sequence voltage variable and the exact
/// magnitude at the same bus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationGap {
    pub bus: usize,
    pub exact: f64,
    pub relaxed: f64,
    /// `relaxed / exact - 1`.
    pub gap: f64,
    /// `1 / cos(pi/n) - 1`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Compares relaxed `V+` values against an exact flow; `slack` absorbs solver
/// tolerance on the bound.
pub fn relaxation_gaps(flow: &FlowResult, relaxed: &[(usize, f64)], sides: usize, slack: f64) -> Vec<RelaxationGap> {
    let bound = 1.0 / (PI / sides as f64).cos() - 1.0;
    relaxed
        .iter()
        .map(|&(bus, v)| {
            let exact = flow.bus(bus).v_pos;
            let gap = if exact > 0.0 { v / exact - 1.0 } else { f64::INFINITY };
            RelaxationGap { bus, exact, relaxed: v, gap, bound, within_bound: gap <= bound + slack }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::{IbrSpec, Line, Phasor, RegulatedSet, SlackVoltages};

    fn scenario(p_min: f64, q_min: f64) -> Scenario {
        Scenario {
            m: 2,
            v_ph_pk: 1.0,
            polygon_sides: 8,
            big_m: 1.0,
            slack: SlackVoltages {
                v0_plus: Phasor::from_degrees(0.8, 0.0),
                v0_minus: Phasor::from_degrees(0.1, -90.0),
            },
            lines: vec![Line { from: 0, to: 1, r: 0.05, x: 0.1 }, Line { from: 1, to: 2, r: 0.05, x: 0.1 }],
            loads: BTreeMap::new(),
            ibrs: vec![IbrSpec { bus: 2, i_max: 0.5, s_max: 0.5, p_min, q_min }],
            regulated: RegulatedSet::default(),
            bases: None,
        }
    }

    #[test]
    fn overcurrent_is_flagged_with_phase_and_margin() {
        let mut s = scenario(-1.0, -1.0);
        s.ibrs[0].s_max = 5.0;
        let model = SequenceNetworkModel::build(&s).unwrap();
        let inj: InjectionSet = [(2, Injection::new(0.4, 0.0, 0.3, 0.0))].into_iter().collect();
        let report = verify_solution(&s, &model, &inj, &VerifyTolerances::default());
        assert!(!report.feasible);
        let v: Vec<_> = report.violations().collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ConstraintKind::PhaseCurrent { phase: Phase::A });
        assert!((v[0].margin + 0.2).abs() < 1e-12);
    }

    #[test]
    fn idle_unit_feasible_iff_floors_non_positive() {
        let model = SequenceNetworkModel::build(&scenario(0.0, -0.2)).unwrap();
        let ok = verify_solution(&scenario(0.0, -0.2), &model, &InjectionSet::new(), &VerifyTolerances::default());
        assert!(ok.feasible);
        let bad = verify_solution(&scenario(0.1, -0.2), &model, &InjectionSet::new(), &VerifyTolerances::default());
        assert!(!bad.feasible);
        assert_eq!(bad.violations().next().unwrap().kind, ConstraintKind::ActivePowerFloor);
    }

    #[test]
    fn injection_at_plain_bus_is_rejected() {
        let mut s = scenario(-1.0, -1.0);
        s.ibrs[0].s_max = 5.0;
        let model = SequenceNetworkModel::build(&s).unwrap();
        let inj: InjectionSet = [(1, Injection::new(0.1, 0.0, 0.0, 0.0))].into_iter().collect();
        let report = verify_solution(&s, &model, &inj, &VerifyTolerances::default());
        assert!(report.violations().any(|c| c.kind == ConstraintKind::NoIbrAtBus));
    }

    #[test]
    fn gap_bound_for_octagon() {
        let flow = FlowResult::from_dq(&[crate::seqflow::DqVoltage { vd_pos: 1.0, ..Default::default() }]);
        let gaps = relaxation_gaps(&flow, &[(1, 1.0 / (PI / 8.0).cos())], 8, 1e-12);
        assert!(gaps[0].within_bound);
        let gaps = relaxation_gaps(&flow, &[(1, 1.09)], 8, 1e-12);
        assert!(!gaps[0].within_bound);
    }
}
