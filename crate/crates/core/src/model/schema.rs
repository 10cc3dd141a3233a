//! On-disk scenario format.
//!
//! ```json
//! {"m": 2, "v_ph_pk": 1.0, "polygon_sides": 8, "big_m": 1.0,
//!  "slack": {"v0_plus": {"mag": 0.8, "deg": 0.0}, "v0_minus": {"mag": 0.1, "deg": -90.0}},
//!  "lines": [{"from": 0, "to": 1, "r": 0.1, "x": 0.2}],
//!  "loads": [{"bus": 1, "g": 0.3, "b": -0.1}],
//!  "ibrs": [{"bus": 1, "i_max": 0.5, "s_max": 0.4, "p_min": 0.0, "q_min": -0.4}],
//!  "regulated_set": "ibr_buses"}
//! ```
//!
//! Angles are in degrees. `polygon_sides`, `big_m`, `v_ph_pk` and
//! `regulated_set` may be omitted; `big_m` then defaults to `v_ph_pk`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phasor::Phasor;
use super::scenario::{Bases, IbrSpec, Line, RegulatedSet, Scenario, SlackVoltages, DEFAULT_POLYGON_SIDES};
use crate::error::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasorFile {
    pub mag: f64,
    pub deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlackFile {
    pub v0_plus: PhasorFile,
    pub v0_minus: PhasorFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadFile {
    pub bus: usize,
    pub g: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub m: usize,
    #[serde(default = "default_v_ph_pk")]
    pub v_ph_pk: f64,
    #[serde(default = "default_sides")]
    pub polygon_sides: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    pub slack: SlackFile,
    pub lines: Vec<Line>,
    #[serde(default)]
    pub loads: Vec<LoadFile>,
    #[serde(default)]
    pub ibrs: Vec<IbrSpec>,
    #[serde(default)]
    pub regulated_set: RegulatedSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Bases>,
}

fn default_v_ph_pk() -> f64 {
    1.0
}

fn default_sides() -> usize {
    DEFAULT_POLYGON_SIDES
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario file serializes")
    }

    /// Converts to the validated in-memory form.
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let mut loads = BTreeMap::new();
        for (idx, load) in self.loads.iter().enumerate() {
            if loads.insert(load.bus, Complex64::new(load.g, load.b)).is_some() {
                return Err(ScenarioError::field(
                    format!("loads[{idx}].bus"),
                    format!("bus {} has more than one load entry", load.bus),
                ));
            }
        }
        let scenario = Scenario {
            m: self.m,
            v_ph_pk: self.v_ph_pk,
            polygon_sides: self.polygon_sides,
            big_m: self.big_m.unwrap_or(self.v_ph_pk),
            slack: SlackVoltages {
                v0_plus: Phasor::from_degrees(self.slack.v0_plus.mag, self.slack.v0_plus.deg),
                v0_minus: Phasor::from_degrees(self.slack.v0_minus.mag, self.slack.v0_minus.deg),
            },
            lines: self.lines,
            loads,
            ibrs: self.ibrs,
            regulated: self.regulated_set,
            bases: self.bases,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let phasor = |p: Phasor| PhasorFile { mag: p.magnitude(), deg: p.degrees() };
        ScenarioFile {
            m: s.m,
            v_ph_pk: s.v_ph_pk,
            polygon_sides: s.polygon_sides,
            big_m: Some(s.big_m),
            slack: SlackFile { v0_plus: phasor(s.slack.v0_plus), v0_minus: phasor(s.slack.v0_minus) },
            lines: s.lines.clone(),
            loads: s
                .loads
                .iter()
                .map(|(&bus, y)| LoadFile { bus, g: y.re, b: y.im })
                .collect(),
            ibrs: s.ibrs.clone(),
            regulated_set: s.regulated.clone(),
            bases: s.bases,
        }
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        ScenarioFile::from_json(text)?.into_scenario()
    }

    pub fn to_json_pretty(&self) -> String {
        ScenarioFile::from(self).to_json_pretty()
    }
}
