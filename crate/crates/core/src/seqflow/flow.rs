use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{Sequence, SequenceNetworkModel, SlackVoltages};

/// Sequence current references of one IBR in the shared DQ+ / DQ- frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    pub id_pos: f64,
    pub iq_pos: f64,
    pub id_neg: f64,
    pub iq_neg: f64,
}

impl Injection {
    pub fn new(id_pos: f64, iq_pos: f64, id_neg: f64, iq_neg: f64) -> Self {
        Self { id_pos, iq_pos, id_neg, iq_neg }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.id_pos, self.iq_pos, self.id_neg, self.iq_neg]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn positive(&self) -> Complex64 {
        Complex64::new(self.id_pos, self.iq_pos)
    }

    pub fn negative(&self) -> Complex64 {
        Complex64::new(self.id_neg, self.iq_neg)
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Injections keyed by bus index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionSet(pub BTreeMap<usize, Injection>);

impl InjectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, bus: usize, inj: Injection) {
        self.0.insert(bus, inj);
    }

    pub fn get(&self, bus: usize) -> Injection {
        self.0.get(&bus).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Injection)> {
        self.0.iter().map(|(&b, i)| (b, i))
    }

    /// `a * self + b * other`, bus by bus.
    pub fn combine(&self, a: f64, other: &InjectionSet, b: f64) -> InjectionSet {
        let mut out = BTreeMap::new();
        for bus in self.0.keys().chain(other.0.keys()) {
            let x = self.get(*bus).as_array();
            let y = other.get(*bus).as_array();
            out.insert(*bus, Injection::from_array(std::array::from_fn(|k| a * x[k] + b * y[k])));
        }
        InjectionSet(out)
    }
}

impl FromIterator<(usize, Injection)> for InjectionSet {
    fn from_iter<T: IntoIterator<Item = (usize, Injection)>>(iter: T) -> Self {
        InjectionSet(iter.into_iter().collect())
    }
}

/// Bus voltage components in the DQ+ / DQ- frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DqVoltage {
    pub vd_pos: f64,
    pub vq_pos: f64,
    pub vd_neg: f64,
    pub vq_neg: f64,
}

impl DqVoltage {
    pub fn from_array(a: [f64; 4]) -> Self {
        Self { vd_pos: a[0], vq_pos: a[1], vd_neg: a[2], vq_neg: a[3] }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.vd_pos, self.vq_pos, self.vd_neg, self.vq_neg]
    }

    pub fn from_complex(pos: Complex64, neg: Complex64) -> Self {
        Self { vd_pos: pos.re, vq_pos: pos.im, vd_neg: neg.re, vq_neg: neg.im }
    }

    pub fn positive(&self) -> Complex64 {
        Complex64::new(self.vd_pos, self.vq_pos)
    }

    pub fn negative(&self) -> Complex64 {
        Complex64::new(self.vd_neg, self.vq_neg)
    }

    pub fn magnitude_pos(&self) -> f64 {
        self.vd_pos.hypot(self.vq_pos)
    }

    pub fn magnitude_neg(&self) -> f64 {
        self.vd_neg.hypot(self.vq_neg)
    }

    pub fn max_abs_diff(&self, other: &DqVoltage) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusVoltage {
    pub bus: usize,
    pub dq: DqVoltage,
    pub v_pos: f64,
    pub v_neg: f64,
    /// `v_neg / v_pos`; absent when the positive-sequence voltage is zero.
    pub vuf: Option<f64>,
}

impl BusVoltage {
    fn from_dq(bus: usize, dq: DqVoltage) -> Self {
        let v_pos = dq.magnitude_pos();
        let v_neg = dq.magnitude_neg();
        let vuf = (v_pos > 0.0).then(|| v_neg / v_pos);
        Self { bus, dq, v_pos, v_neg, vuf }
    }
}

/// Exact sequence voltages at buses 1..=m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub buses: Vec<BusVoltage>,
}

impl FlowResult {
    pub fn from_dq(dq: &[DqVoltage]) -> Self {
        Self {
            buses: dq.iter().enumerate().map(|(i, v)| BusVoltage::from_dq(i + 1, *v)).collect(),
        }
    }

    pub fn bus(&self, bus: usize) -> &BusVoltage {
        &self.buses[bus - 1]
    }

    pub fn dq(&self) -> Vec<DqVoltage> {
        self.buses.iter().map(|b| b.dq).collect()
    }
}

/// Solves the sequence network in complex arithmetic:
/// `V = H 1 V0 + Z_eq I` for the positive sequence and the conjugate
/// matrices for the negative sequence.
pub fn solve_sequence_flow(model: &SequenceNetworkModel, slack: &SlackVoltages, inj: &InjectionSet) -> FlowResult {
    let m = model.bus_count();
    let mut i_pos = DVector::<Complex64>::zeros(m);
    let mut i_neg = DVector::<Complex64>::zeros(m);
    for (bus, injection) in inj.iter() {
        assert!(bus >= 1 && bus <= m, "injection at bus {bus} outside 1..={m}");
        i_pos[bus - 1] = injection.positive();
        i_neg[bus - 1] = injection.negative();
    }
    let v0p = slack.v0_plus.to_complex();
    let v0n = slack.v0_minus.to_complex();
    let ones = DVector::<Complex64>::from_element(m, Complex64::new(1.0, 0.0));
    let v_pos = model.h(Sequence::Positive) * &ones * v0p + model.z_eq(Sequence::Positive) * &i_pos;
    let v_neg = model.h(Sequence::Negative) * &ones * v0n + model.z_eq(Sequence::Negative) * &i_neg;
    let dq: Vec<DqVoltage> = (0..m).map(|i| DqVoltage::from_complex(v_pos[i], v_neg[i])).collect();
    FlowResult::from_dq(&dq)
}

/// Affine map from DQ current references to DQ bus voltages, written out in
/// the real-valued G/B and R/X components of `H` and `Z_eq`.
#[derive(Debug, Clone)]
pub struct VoltageCoupling {
    g: DMatrix<f64>,
    b: DMatrix<f64>,
    r: DMatrix<f64>,
    x: DMatrix<f64>,
    offsets: Vec<[f64; 4]>,
}

impl VoltageCoupling {
    pub fn new(model: &SequenceNetworkModel, slack: &SlackVoltages) -> Self {
        let h = model.h(Sequence::Positive);
        let z = model.z_eq(Sequence::Positive);
        let g = h.map(|c| c.re);
        let b = h.map(|c| c.im);
        let r = z.map(|c| c.re);
        let x = z.map(|c| c.im);
        let m = model.bus_count();
        let (v0p, p0) = (slack.v0_plus.magnitude(), slack.v0_plus.angle());
        let (v0n, n0) = (slack.v0_minus.magnitude(), slack.v0_minus.angle());
        let offsets = (0..m)
            .map(|i| {
                let (mut dp, mut qp, mut dn, mut qn) = (0.0, 0.0, 0.0, 0.0);
                for j in 0..m {
                    let (gij, bij) = (g[(i, j)], b[(i, j)]);
                    dp += gij * p0.cos() - bij * p0.sin();
                    qp += gij * p0.sin() + bij * p0.cos();
                    dn += gij * n0.cos() + bij * n0.sin();
                    qn += gij * n0.sin() - bij * n0.cos();
                }
                [v0p * dp, v0p * qp, v0n * dn, v0n * qn]
            })
            .collect();
        Self { g, b, r, x, offsets }
    }

    pub fn bus_count(&self) -> usize {
        self.offsets.len()
    }

    /// Zero-injection components `(Vd+, Vq+, Vd-, Vq-)` of `bus`.
    pub fn offset(&self, bus: usize) -> [f64; 4] {
        self.offsets[bus - 1]
    }

    /// Sensitivity of the voltage components at `bus` to the current
    /// components `(Id+, Iq+, Id-, Iq-)` injected at `source`. Row order
    /// matches [`DqVoltage::as_array`].
    pub fn coefficients(&self, bus: usize, source: usize) -> [[f64; 4]; 4] {
        let (r, x) = (self.r[(bus - 1, source - 1)], self.x[(bus - 1, source - 1)]);
        [
            [r, -x, 0.0, 0.0],
            [x, r, 0.0, 0.0],
            [0.0, 0.0, r, x],
            [0.0, 0.0, -x, r],
        ]
    }

    /// Real and imaginary parts of `H_ij`.
    pub fn h_entry(&self, bus: usize, other: usize) -> (f64, f64) {
        (self.g[(bus - 1, other - 1)], self.b[(bus - 1, other - 1)])
    }

    pub fn evaluate(&self, inj: &InjectionSet) -> Vec<DqVoltage> {
        (1..=self.bus_count())
            .map(|bus| {
                let mut v = self.offset(bus);
                for (src, injection) in inj.iter() {
                    let coeff = self.coefficients(bus, src);
                    let cur = injection.as_array();
                    for (row, vr) in coeff.iter().zip(v.iter_mut()) {
                        *vr += row.iter().zip(cur).map(|(a, c)| a * c).sum::<f64>();
                    }
                }
                DqVoltage::from_array(v)
            })
            .collect()
    }
}

/// DQ components of every bus voltage from the real-valued projection.
pub fn project_dq(model: &SequenceNetworkModel, slack: &SlackVoltages, inj: &InjectionSet) -> Vec<DqVoltage> {
    VoltageCoupling::new(model, slack).evaluate(inj)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::model::{Line, Phasor, RegulatedSet, Scenario};

    fn one_bus(load: Option<Complex64>, v0m: Phasor) -> (Scenario, SequenceNetworkModel) {
        let mut loads = BTreeMap::new();
        if let Some(y) = load {
            loads.insert(1, y);
        }
        let s = Scenario {
            m: 1,
            v_ph_pk: 1.0,
            polygon_sides: 8,
            big_m: 1.0,
            slack: SlackVoltages { v0_plus: Phasor::from_degrees(0.9, 0.0), v0_minus: v0m },
            lines: vec![Line { from: 0, to: 1, r: 0.1, x: 0.2 }],
            loads,
            ibrs: vec![],
            regulated: RegulatedSet::default(),
            bases: None,
        };
        let model = SequenceNetworkModel::build(&s).unwrap();
        (s, model)
    }

    #[test]
    fn zero_injection_without_loads_reproduces_slack() {
        let (s, model) = one_bus(None, Phasor::from_degrees(0.1, -90.0));
        let flow = solve_sequence_flow(&model, &s.slack, &InjectionSet::new());
        assert_abs_diff_eq!(flow.bus(1).v_pos, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(flow.bus(1).v_neg, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn positive_d_current_adds_r_and_x() {
        let (s, model) = one_bus(None, Phasor::zero());
        let inj: InjectionSet = [(1, Injection::new(1.0, 0.0, 0.0, 0.0))].into_iter().collect();
        let dq = project_dq(&model, &s.slack, &inj)[0];
        assert_abs_diff_eq!(dq.vd_pos, 0.9 + 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(dq.vq_pos, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn negative_d_current_flips_reactance_sign() {
        let (s, model) = one_bus(None, Phasor::from_degrees(0.1, 0.0));
        let inj: InjectionSet = [(1, Injection::new(0.0, 0.0, 1.0, 0.0))].into_iter().collect();
        let dq = project_dq(&model, &s.slack, &inj)[0];
        assert_abs_diff_eq!(dq.vd_neg, 0.1 + 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(dq.vq_neg, -0.2, epsilon = 1e-15);
    }

    #[test]
    fn zero_injection_with_load_scales_by_h_row_sum() {
        let (s, model) = one_bus(Some(Complex64::new(0.5, 0.0)), Phasor::zero());
        let flow = solve_sequence_flow(&model, &s.slack, &InjectionSet::new());
        let expected = model.h_row_sums(Sequence::Positive)[0] * s.slack.v0_plus.to_complex();
        assert_abs_diff_eq!((flow.bus(1).dq.positive() - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_slack_has_zero_vuf() {
        let (s, model) = one_bus(Some(Complex64::new(0.3, -0.2)), Phasor::zero());
        let flow = solve_sequence_flow(&model, &s.slack, &InjectionSet::new());
        assert_eq!(flow.bus(1).vuf, Some(0.0));
    }
}
