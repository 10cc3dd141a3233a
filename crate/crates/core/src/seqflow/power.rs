use serde::{Deserialize, Serialize};

use super::flow::{DqVoltage, Injection};

/// Average three-phase output of one IBR (peak-value DQ quantities, hence the 1.5).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerOutput {
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

pub fn apparent_power(v: &DqVoltage, i: &Injection) -> PowerOutput {
    let p = 1.5 * (v.vd_pos * i.id_pos + v.vq_pos * i.iq_pos + v.vd_neg * i.id_neg + v.vq_neg * i.iq_neg);
    let q = 1.5 * (v.vq_pos * i.id_pos - v.vd_pos * i.iq_pos + v.vq_neg * i.id_neg - v.vd_neg * i.iq_neg);
    PowerOutput { p, q, s: p.hypot(q) }
}

/// Coefficients of `P` and `Q` over `(Id+, Iq+, Id-, Iq-)` at a fixed voltage.
pub fn power_coefficients(v: &DqVoltage) -> [[f64; 4]; 2] {
    [
        [1.5 * v.vd_pos, 1.5 * v.vq_pos, 1.5 * v.vd_neg, 1.5 * v.vq_neg],
        [1.5 * v.vq_pos, -1.5 * v.vd_pos, 1.5 * v.vq_neg, -1.5 * v.vd_neg],
    ]
}
