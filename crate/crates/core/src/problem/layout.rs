use serde::{Deserialize, Serialize};

use super::standard::VarId;
use crate::seqflow::{DqVoltage, Injection, InjectionSet};

/// Where each physical quantity lives in the variable vector.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariableLayout {
    pub ibr_buses: Vec<usize>,
    /// `(Id+, Iq+, Id-, Iq-)` per IBR, in `ibr_buses` order.
    pub currents: Vec<[VarId; 4]>,
    /// `(P, Q)` per IBR.
    pub powers: Vec<[VarId; 2]>,
    /// `(Vd+, Vq+, Vd-, Vq-)` per bus 1..=m.
    pub bus_dq: Vec<[VarId; 4]>,
    /// `(V+, V-)` per bus 1..=m.
    pub bus_mag: Vec<[VarId; 2]>,
}

impl VariableLayout {
    pub fn ibr_index(&self, bus: usize) -> Option<usize> {
        self.ibr_buses.iter().position(|&b| b == bus)
    }

    pub fn v_pos(&self, bus: usize) -> VarId {
        self.bus_mag[bus - 1][0]
    }

    pub fn v_neg(&self, bus: usize) -> VarId {
        self.bus_mag[bus - 1][1]
    }
}

/// Primal point decoded into physical quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    pub currents: InjectionSet,
    /// Per bus 1..=m.
    pub bus_dq: Vec<DqVoltage>,
    pub v_pos: Vec<f64>,
    pub v_neg: Vec<f64>,
    /// `(bus, P, Q)` per IBR.
    pub powers: Vec<(usize, f64, f64)>,
    /// `(bus, selected side k)` (0-based) per one-hot group; `None` when fractional.
    pub sides: Vec<(usize, Option<usize>)>,
}

impl DecisionVector {
    pub fn v_pos_at(&self, bus: usize) -> f64 {
        self.v_pos[bus - 1]
    }

    pub fn v_neg_at(&self, bus: usize) -> f64 {
        self.v_neg[bus - 1]
    }
}

impl super::standard::MiConvexProblem {
    /// Reads physical quantities out of a primal point.
    pub fn decode(&self, x: &[f64]) -> DecisionVector {
        let l = &self.layout;
        let currents = l
            .ibr_buses
            .iter()
            .zip(&l.currents)
            .map(|(&b, ids)| (b, Injection::from_array(ids.map(|v| x[v.0]))))
            .collect();
        let bus_dq = l.bus_dq.iter().map(|ids| DqVoltage::from_array(ids.map(|v| x[v.0]))).collect();
        let v_pos = l.bus_mag.iter().map(|ids| x[ids[0].0]).collect();
        let v_neg = l.bus_mag.iter().map(|ids| x[ids[1].0]).collect();
        let powers = l
            .ibr_buses
            .iter()
            .zip(&l.powers)
            .map(|(&b, ids)| (b, x[ids[0].0], x[ids[1].0]))
            .collect();
        let sides = self
            .one_hot
            .iter()
            .map(|g| {
                let k = g.members.iter().position(|v| x[v.0] > 1.0 - 1e-6);
                (g.bus, k)
            })
            .collect();
        DecisionVector { currents, bus_dq, v_pos, v_neg, powers, sides }
    }
}
