use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::{ObjectiveConfig, PolygonConfig};
use super::layout::VariableLayout;
use super::standard::{LinExpr, MiConvexProblem, Sense, VarId, VarKind};
use crate::error::ConfigError;
use crate::model::{normalize_angle, Scenario, Sequence, SequenceNetworkModel};
use crate::seqflow::{phase_coefficients, power_coefficients, DqVoltage, Phase, VoltageCoupling};

const FREE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Fix to zero the side binaries that can never be the nearest side for
    /// any reachable positive-sequence voltage at that bus.
    pub prune_dominated_sides: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { prune_dominated_sides: true }
    }
}

/// Frozen bus voltages used to linearize `P` and `Q`, per bus 1..=m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageEstimate(pub Vec<DqVoltage>);

impl VoltageEstimate {
    pub fn at(&self, bus: usize) -> &DqVoltage {
        &self.0[bus - 1]
    }
}

/// Incrementally assembles the mixed-integer program for one scenario.
pub struct ProblemBuilder<'a> {
    scenario: &'a Scenario,
    model: &'a SequenceNetworkModel,
    coupling: VoltageCoupling,
    problem: MiConvexProblem,
}

impl<'a> ProblemBuilder<'a> {
    /// Declares currents, powers, bus voltage components and magnitudes.
    pub fn new(scenario: &'a Scenario, model: &'a SequenceNetworkModel) -> Self {
        let mut p = MiConvexProblem::empty();
        let mut layout = VariableLayout::default();
        for ibr in &scenario.ibrs {
            let s = ibr.bus;
            // a unit rated at zero current is pinned instead of given a degenerate cone
            let (lo, hi) = if ibr.i_max > 0.0 { FREE } else { (0.0, 0.0) };
            layout.ibr_buses.push(s);
            layout.currents.push(["id+", "iq+", "id-", "iq-"].map(|n| {
                p.add_var(format!("{n}[{s}]"), VarKind::Continuous, lo, hi)
            }));
            layout
                .powers
                .push(["p", "q"].map(|n| p.add_var(format!("{n}[{s}]"), VarKind::Continuous, FREE.0, FREE.1)));
        }
        for bus in 1..=scenario.m {
            layout.bus_dq.push(["vd+", "vq+", "vd-", "vq-"].map(|n| {
                p.add_var(format!("{n}[{bus}]"), VarKind::Continuous, FREE.0, FREE.1)
            }));
            layout.bus_mag.push(
                ["v+", "v-"].map(|n| p.add_var(format!("{n}[{bus}]"), VarKind::Continuous, 0.0, scenario.v_ph_pk)),
            );
        }
        p.layout = layout;
        Self { scenario, model, coupling: VoltageCoupling::new(model, &scenario.slack), problem: p }
    }

    pub fn problem(&self) -> &MiConvexProblem {
        &self.problem
    }

    /// Four equalities per bus tying voltage components to the injections.
    pub fn add_voltage_coupling(&mut self) -> &mut Self {
        const NAMES: [&str; 4] = ["d+", "q+", "d-", "q-"];
        let layout = self.problem.layout.clone();
        for bus in 1..=self.scenario.m {
            let offset = self.coupling.offset(bus);
            for row in 0..4 {
                let mut expr = LinExpr::var(layout.bus_dq[bus - 1][row]).plus(-offset[row]);
                for (src, ids) in layout.ibr_buses.iter().zip(&layout.currents) {
                    let coeff = self.coupling.coefficients(bus, *src);
                    for (col, id) in ids.iter().enumerate() {
                        expr.push(*id, -coeff[row][col]);
                    }
                }
                self.problem.add_affine(format!("vcoup[{},{bus}]", NAMES[row]), expr, Sense::Eq);
            }
        }
        self
    }

    /// `|(Vd, Vq)| <= V` for both sequences at every bus. The `0 <= V <= Vpk`
    /// bounds are carried on the magnitude variables themselves.
    pub fn add_voltage_soc(&mut self) -> &mut Self {
        for bus in 1..=self.scenario.m {
            let dq = self.problem.layout.bus_dq[bus - 1];
            let mag = self.problem.layout.bus_mag[bus - 1];
            self.problem.add_soc(
                format!("vmag+[{bus}]"),
                vec![LinExpr::var(dq[0]), LinExpr::var(dq[1])],
                LinExpr::var(mag[0]),
            );
            self.problem.add_soc(
                format!("vmag-[{bus}]"),
                vec![LinExpr::var(dq[2]), LinExpr::var(dq[3])],
                LinExpr::var(mag[1]),
            );
        }
        self
    }

    /// Three phase-peak cones per IBR with right-hand side `i_max`.
    pub fn add_current_soc(&mut self) -> &mut Self {
        for (spec, ids) in self.scenario.ibrs.iter().zip(self.problem.layout.currents.clone()) {
            if spec.i_max <= 0.0 {
                continue;
            }
            for phase in Phase::ALL {
                let inner = phase_coefficients(phase)
                    .iter()
                    .map(|row| {
                        let mut e = LinExpr::new();
                        for (id, c) in ids.iter().zip(row) {
                            e.push(*id, *c);
                        }
                        e
                    })
                    .collect();
                self.problem
                    .add_soc(format!("iphase[{phase},{}]", spec.bus), inner, LinExpr::constant(spec.i_max));
            }
        }
        self
    }

    /// Circumscribed-polygon envelope on `V+` at each regulated bus, one
    /// binary per side, exactly one side selected.
    pub fn add_polygon_tightening(
        &mut self,
        polygon: &PolygonConfig,
        regulated: &[usize],
        options: &BuildOptions,
    ) -> &mut Self {
        let big_m = polygon.effective_m();
        let shrink = polygon.shrink();
        for &bus in regulated {
            let allowed = if options.prune_dominated_sides {
                self.candidate_sides(bus, polygon)
            } else {
                vec![true; polygon.sides]
            };
            let dq = self.problem.layout.bus_dq[bus - 1];
            let v_pos = self.problem.layout.v_pos(bus);
            let members: Vec<VarId> = (0..polygon.sides)
                .map(|k| {
                    let upper = if allowed[k] { 1.0 } else { 0.0 };
                    self.problem.add_var(format!("x[{bus},{}]", k + 1), VarKind::Binary, 0.0, upper)
                })
                .collect();
            for (k, &x) in members.iter().enumerate() {
                let theta = polygon.theta(k);
                // V+ cos(pi/n) - Vd cos t - Vq sin t + M x <= M
                let expr = LinExpr::scaled(v_pos, shrink)
                    .with(dq[0], -theta.cos())
                    .with(dq[1], -theta.sin())
                    .with(x, big_m)
                    .plus(-big_m);
                self.problem.add_affine(format!("envelope[{bus},{}]", k + 1), expr, Sense::Le);
            }
            self.problem.add_one_hot(bus, members);
        }
        self.problem.polygon = Some(*polygon);
        self
    }

    /// Sides whose nearest-normal sector meets the disc of voltages the bus
    /// can reach. Centre: zero-injection voltage; radius: sum of
    /// `|Z_eq| * i_max` (the positive-sequence current magnitude never
    /// exceeds the phase limit).
    pub fn candidate_sides(&self, bus: usize, polygon: &PolygonConfig) -> Vec<bool> {
        let off = self.coupling.offset(bus);
        let centre = off[0].hypot(off[1]);
        let z_eq = self.model.z_eq(Sequence::Positive);
        let radius: f64 = self
            .scenario
            .ibrs
            .iter()
            .map(|ibr| z_eq[(bus - 1, ibr.bus - 1)].norm() * ibr.i_max)
            .sum();
        if radius >= centre {
            return vec![true; polygon.sides];
        }
        let phi = off[1].atan2(off[0]);
        let spread = (radius / centre).asin();
        let half_sector = PI / polygon.sides as f64;
        (0..polygon.sides)
            .map(|k| normalize_angle(polygon.theta(k) - phi).abs() <= half_sector + spread + 1e-9)
            .collect()
    }

    /// Defines `P`, `Q` at the frozen voltages, caps `(P, Q)` by the
    /// inscribed polygon and applies the power floors.
    pub fn add_power_polygon(&mut self, estimate: &VoltageEstimate, sides: usize) -> Result<&mut Self, ConfigError> {
        if estimate.0.len() != self.scenario.m {
            return Err(ConfigError::EstimateShape { got: estimate.0.len(), expected: self.scenario.m });
        }
        if sides < 3 {
            return Err(ConfigError::TooFewSides(sides));
        }
        let shrink = (PI / sides as f64).cos();
        let layout = self.problem.layout.clone();
        for ((spec, ids), pq) in self.scenario.ibrs.iter().zip(&layout.currents).zip(&layout.powers) {
            let s = spec.bus;
            let coeff = power_coefficients(estimate.at(s));
            for (row, (&var, name)) in pq.iter().zip(["p", "q"]).enumerate() {
                let mut expr = LinExpr::var(var);
                for (id, c) in ids.iter().zip(coeff[row]) {
                    expr.push(*id, -c);
                }
                self.problem.add_affine(format!("{name}def[{s}]"), expr, Sense::Eq);
            }
            for k in 0..sides {
                let theta = 2.0 * k as f64 * PI / sides as f64;
                let expr = LinExpr::scaled(pq[0], theta.cos())
                    .with(pq[1], theta.sin())
                    .plus(-spec.s_max * shrink);
                self.problem.add_affine(format!("scap[{s},{}]", k + 1), expr, Sense::Le);
            }
            self.problem
                .add_affine(format!("pmin[{s}]"), LinExpr::scaled(pq[0], -1.0).plus(spec.p_min), Sense::Le);
            self.problem
                .add_affine(format!("qmin[{s}]"), LinExpr::scaled(pq[1], -1.0).plus(spec.q_min), Sense::Le);
        }
        Ok(self)
    }

    pub fn build_objective(&mut self, cfg: &ObjectiveConfig) -> Result<&mut Self, ConfigError> {
        cfg.validate()?;
        let vpk = self.scenario.v_ph_pk;
        let mut objective = super::standard::Objective::default();
        for &bus in &cfg.regulated {
            if cfg.alpha > 0.0 {
                objective.squares.push(super::standard::SquaredTerm {
                    weight: cfg.alpha,
                    expr: LinExpr::scaled(self.problem.layout.v_neg(bus), 1.0 / vpk),
                });
            }
            if cfg.lambda > 0.0 {
                objective.squares.push(super::standard::SquaredTerm {
                    weight: cfg.lambda,
                    expr: LinExpr::scaled(self.problem.layout.v_pos(bus), 1.0 / vpk).plus(-1.0),
                });
            }
        }
        if cfg.current_regularization > 0.0 {
            for ids in &self.problem.layout.currents {
                for id in ids {
                    objective.squares.push(super::standard::SquaredTerm {
                        weight: cfg.current_regularization,
                        expr: LinExpr::var(*id),
                    });
                }
            }
        }
        self.problem.objective = objective;
        Ok(self)
    }

    pub fn finish(self) -> MiConvexProblem {
        self.problem
    }
}

/// Assembles the complete program for one linearization point.
pub fn build_problem(
    scenario: &Scenario,
    model: &SequenceNetworkModel,
    estimate: &VoltageEstimate,
    objective: &ObjectiveConfig,
    options: &BuildOptions,
) -> Result<MiConvexProblem, ConfigError> {
    let polygon = PolygonConfig::new(scenario.polygon_sides, scenario.big_m)?;
    let mut b = ProblemBuilder::new(scenario, model);
    b.add_voltage_coupling()
        .add_voltage_soc()
        .add_current_soc()
        .add_polygon_tightening(&polygon, &objective.regulated, options);
    b.add_power_polygon(estimate, scenario.polygon_sides)?;
    b.build_objective(objective)?;
    Ok(b.finish())
}
