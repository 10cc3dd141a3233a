use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phasor::Phasor;
use super::topology::build_path_sets;
use crate::error::ScenarioError;

/// Default number of polygon sides for both the voltage envelope and the power cap.
pub const DEFAULT_POLYGON_SIDES: usize = 8;

/// A line between two buses, impedance in per-unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub r: f64,
    pub x: f64,
}

impl Line {
    pub fn impedance(&self) -> Complex64 {
        Complex64::new(self.r, self.x)
    }
}

/// Inverter-based resource ratings. All values per-unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbrSpec {
    pub bus: usize,
    /// Peak phase current limit.
    pub i_max: f64,
    /// Rated apparent power.
    pub s_max: f64,
    /// Active power floor (negative means absorption is allowed).
    pub p_min: f64,
    /// Reactive power floor.
    pub q_min: f64,
}

/// Sequence voltages imposed by the upstream grid at bus 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackVoltages {
    pub v0_plus: Phasor,
    pub v0_minus: Phasor,
}

/// Buses whose sequence voltages enter the objective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegulatedSet {
    Buses(Vec<usize>),
    Keyword(RegulatedKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulatedKeyword {
    AllBuses,
    IbrBuses,
}

impl Default for RegulatedSet {
    fn default() -> Self {
        RegulatedSet::Keyword(RegulatedKeyword::IbrBuses)
    }
}

/// Reporting bases. The solver itself works purely in per-unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bases {
    /// Line-to-line base voltage in kV.
    pub v_kv: f64,
    /// Three-phase base power in kVA.
    pub s_kva: f64,
}

/// Full network description. Bus 0 is the slack; buses 1..=m are modeled.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub m: usize,
    pub v_ph_pk: f64,
    pub polygon_sides: usize,
    pub big_m: f64,
    pub slack: SlackVoltages,
    pub lines: Vec<Line>,
    /// Constant load admittance per bus.
    pub loads: BTreeMap<usize, Complex64>,
    pub ibrs: Vec<IbrSpec>,
    pub regulated: RegulatedSet,
    pub bases: Option<Bases>,
}

impl Scenario {
    /// Checks every data invariant, including radial topology.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.m == 0 {
            return Err(ScenarioError::field("m", "must be a positive integer"));
        }
        finite_positive("v_ph_pk", self.v_ph_pk)?;
        finite_positive("big_m", self.big_m)?;
        if self.polygon_sides < 3 {
            return Err(ScenarioError::field(
                "polygon_sides",
                format!("must be at least 3, got {}", self.polygon_sides),
            ));
        }
        for (name, p) in [
            ("slack.v0_plus", self.slack.v0_plus),
            ("slack.v0_minus", self.slack.v0_minus),
        ] {
            if !p.magnitude().is_finite() || !p.angle().is_finite() {
                return Err(ScenarioError::field(name, "must be finite"));
            }
        }
        for (idx, line) in self.lines.iter().enumerate() {
            if !line.r.is_finite() || line.r < 0.0 {
                return Err(ScenarioError::field(
                    format!("lines[{idx}].r"),
                    format!("resistance must be finite and >= 0, got {}", line.r),
                ));
            }
            if !line.x.is_finite() {
                return Err(ScenarioError::field(
                    format!("lines[{idx}].x"),
                    "reactance must be finite",
                ));
            }
            if line.impedance().norm() == 0.0 {
                return Err(ScenarioError::field(
                    format!("lines[{idx}]"),
                    "zero impedance lines are not supported",
                ));
            }
        }
        build_path_sets(self)?;
        for (&bus, y) in &self.loads {
            if bus == 0 || bus > self.m {
                return Err(ScenarioError::field(
                    "loads",
                    format!("bus {bus} is outside 1..={}", self.m),
                ));
            }
            if !y.re.is_finite() || !y.im.is_finite() {
                return Err(ScenarioError::field(
                    format!("loads[bus {bus}]"),
                    "admittance must be finite",
                ));
            }
        }
        let mut seen = vec![false; self.m + 1];
        for (idx, ibr) in self.ibrs.iter().enumerate() {
            let field = |f: &str| format!("ibrs[{idx}].{f}");
            if ibr.bus == 0 || ibr.bus > self.m {
                return Err(ScenarioError::field(
                    field("bus"),
                    format!("bus {} is outside 1..={}", ibr.bus, self.m),
                ));
            }
            if seen[ibr.bus] {
                return Err(ScenarioError::field(
                    field("bus"),
                    format!("bus {} already hosts an IBR", ibr.bus),
                ));
            }
            seen[ibr.bus] = true;
            // Zero ratings are accepted so that a unit can be switched off in place.
            for (name, v) in [("i_max", ibr.i_max), ("s_max", ibr.s_max)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(ScenarioError::field(
                        field(name),
                        format!("must be finite and >= 0, got {v}"),
                    ));
                }
            }
            for (name, v) in [("p_min", ibr.p_min), ("q_min", ibr.q_min)] {
                if !v.is_finite() {
                    return Err(ScenarioError::field(field(name), "must be finite"));
                }
                if v > ibr.s_max {
                    return Err(ScenarioError::field(
                        field(name),
                        format!("floor {v} exceeds s_max {}", ibr.s_max),
                    ));
                }
            }
        }
        if let RegulatedSet::Buses(buses) = &self.regulated {
            let mut dedup = vec![false; self.m + 1];
            for &b in buses {
                if b == 0 || b > self.m {
                    return Err(ScenarioError::field(
                        "regulated_set",
                        format!("bus {b} is outside 1..={}", self.m),
                    ));
                }
                if dedup[b] {
                    return Err(ScenarioError::field(
                        "regulated_set",
                        format!("bus {b} listed twice"),
                    ));
                }
                dedup[b] = true;
            }
        }
        Ok(())
    }

    /// Sorted list of regulated bus indices.
    pub fn regulated_buses(&self) -> Vec<usize> {
        let mut buses = match &self.regulated {
            RegulatedSet::Buses(b) => b.clone(),
            RegulatedSet::Keyword(RegulatedKeyword::AllBuses) => (1..=self.m).collect(),
            RegulatedSet::Keyword(RegulatedKeyword::IbrBuses) => self.ibr_buses(),
        };
        buses.sort_unstable();
        buses
    }

    /// IBR buses in declaration order.
    pub fn ibr_buses(&self) -> Vec<usize> {
        self.ibrs.iter().map(|i| i.bus).collect()
    }

    pub fn load_admittance(&self, bus: usize) -> Complex64 {
        self.loads.get(&bus).copied().unwrap_or_default()
    }

    pub fn ibr_at(&self, bus: usize) -> Option<&IbrSpec> {
        self.ibrs.iter().find(|i| i.bus == bus)
    }
}

fn finite_positive(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::field(field, format!("must be finite and > 0, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario {
            m: 2,
            v_ph_pk: 1.0,
            polygon_sides: 8,
            big_m: 1.0,
            slack: SlackVoltages {
                v0_plus: Phasor::from_degrees(0.8, 0.0),
                v0_minus: Phasor::from_degrees(0.1, -90.0),
            },
            lines: vec![
                Line { from: 0, to: 1, r: 0.1, x: 0.2 },
                Line { from: 1, to: 2, r: 0.05, x: 0.1 },
            ],
            loads: BTreeMap::new(),
            ibrs: vec![IbrSpec { bus: 2, i_max: 1.0, s_max: 1.0, p_min: 0.0, q_min: -1.0 }],
            regulated: RegulatedSet::default(),
            bases: None,
        }
    }

    #[test]
    fn base_scenario_is_valid() {
        base().validate().unwrap();
        assert_eq!(base().regulated_buses(), vec![2]);
    }

    #[test]
    fn duplicate_ibr_bus_is_rejected() {
        let mut s = base();
        s.ibrs.push(s.ibrs[0]);
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("already hosts"), "{err}");
    }

    #[test]
    fn ibr_on_slack_is_rejected() {
        let mut s = base();
        s.ibrs[0].bus = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn floor_above_rating_is_rejected() {
        let mut s = base();
        s.ibrs[0].p_min = 2.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn negative_resistance_is_rejected() {
        let mut s = base();
        s.lines[1].r = -0.01;
        assert!(s.validate().is_err());
    }

    #[test]
    fn too_few_sides_rejected() {
        let mut s = base();
        s.polygon_sides = 2;
        assert!(s.validate().is_err());
    }

    #[test]
    fn regulated_set_keywords() {
        let mut s = base();
        s.regulated = RegulatedSet::Keyword(RegulatedKeyword::AllBuses);
        assert_eq!(s.regulated_buses(), vec![1, 2]);
        s.regulated = RegulatedSet::Buses(vec![2, 1]);
        assert_eq!(s.regulated_buses(), vec![1, 2]);
        s.regulated = RegulatedSet::Buses(vec![3]);
        assert!(s.validate().is_err());
    }
}
