//! Reference computations shared by the integration tests. None of these
//! go through the crate's own matrices or closed forms.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use vum_core::model::Scenario;
use vum_core::seqflow::{Injection, InjectionSet};

pub const PHASE_SHIFTS: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

/// Bus voltages from nodal analysis: KCL at every bus with the slack held
/// fixed. `conj` solves the negative-sequence network, whose frame rotates
/// the other way.
pub fn nodal_solve(scenario: &Scenario, slack: Complex64, currents: &[Complex64], conj: bool) -> Vec<Complex64> {
    let m = scenario.m;
    let flip = |z: Complex64| if conj { z.conj() } else { z };
    let mut y = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for line in &scenario.lines {
        let ys = flip(Complex64::new(line.r, line.x)).inv();
        for (a, b) in [(line.from, line.to), (line.to, line.from)] {
            if a == 0 {
                continue;
            }
            y[(a - 1, a - 1)] += ys;
            if b == 0 {
                rhs[a - 1] += ys * slack;
            } else {
                y[(a - 1, b - 1)] -= ys;
            }
        }
    }
    for (&bus, &yl) in &scenario.loads {
        y[(bus - 1, bus - 1)] += flip(yl);
    }
    for (i, c) in currents.iter().enumerate() {
        rhs[i] += c;
    }
    let v = y.lu().solve(&rhs).expect("nodal matrix is invertible");
    v.iter().copied().collect()
}

/// `(V+, V-)` per bus 1..=m as complex frame quantities.
pub fn reference_flow(scenario: &Scenario, inj: &InjectionSet) -> Vec<(Complex64, Complex64)> {
    let m = scenario.m;
    let mut ip = vec![Complex64::new(0.0, 0.0); m];
    let mut ineg = vec![Complex64::new(0.0, 0.0); m];
    for (bus, i) in inj.iter() {
        ip[bus - 1] = Complex64::new(i.id_pos, i.iq_pos);
        ineg[bus - 1] = Complex64::new(i.id_neg, i.iq_neg);
    }
    let vp = nodal_solve(scenario, scenario.slack.v0_plus.to_complex(), &ip, false);
    let vn = nodal_solve(scenario, scenario.slack.v0_minus.to_complex(), &ineg, true);
    vp.into_iter().zip(vn).collect()
}

/// Instantaneous phase current: a forward-rotating positive set plus a
/// backward-rotating negative set, both shifted by the phase angle.
pub fn instantaneous(inj: &Injection, phase: usize, delta: f64) -> f64 {
    let s = PHASE_SHIFTS[phase];
    let ip = Complex64::new(inj.id_pos, inj.iq_pos);
    let ineg = Complex64::new(inj.id_neg, inj.iq_neg);
    (ip * Complex64::from_polar(1.0, delta - s)).re + (ineg * Complex64::from_polar(1.0, -(delta + s))).re
}

/// Sampled maximum over a full period, polished by ternary search around
/// the best sample.
pub fn sampled_peak(inj: &Injection, phase: usize) -> f64 {
    let n = 4096;
    let step = 2.0 * PI / n as f64;
    let k = (0..n)
        .max_by(|&a, &b| {
            instantaneous(inj, phase, a as f64 * step).total_cmp(&instantaneous(inj, phase, b as f64 * step))
        })
        .unwrap();
    let (mut lo, mut hi) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if instantaneous(inj, phase, a) < instantaneous(inj, phase, b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    instantaneous(inj, phase, 0.5 * (lo + hi)).max(instantaneous(inj, phase, k as f64 * step))
}

/// Phase peak by collecting the waveform into `A cos(delta) + B sin(delta)`.
pub fn trig_peak(inj: &Injection, phase: usize) -> f64 {
    let (c, s) = (PHASE_SHIFTS[phase].cos(), PHASE_SHIFTS[phase].sin());
    let a = inj.id_pos * c + inj.iq_pos * s + inj.id_neg * c + inj.iq_neg * s;
    let b = inj.id_pos * s - inj.iq_pos * c - inj.id_neg * s + inj.iq_neg * c;
    a.hypot(b)
}

/// Average three-phase power `1.5 V conj(I)` summed over both sequences.
pub fn complex_power(vp: Complex64, vn: Complex64, inj: &Injection) -> Complex64 {
    let ip = Complex64::new(inj.id_pos, inj.iq_pos);
    let ineg = Complex64::new(inj.id_neg, inj.iq_neg);
    1.5 * (vp * ip.conj() + vn * ineg.conj())
}

/// Objective with weights `(alpha, lambda)` over `buses` from exact voltages.
pub fn objective(v: &[(Complex64, Complex64)], buses: &[usize], alpha: f64, lambda: f64, vpk: f64) -> f64 {
    buses
        .iter()
        .map(|&b| {
            let (p, n) = v[b - 1];
            alpha * (n.norm() / vpk).powi(2) + lambda * (p.norm() / vpk - 1.0).powi(2)
        })
        .sum()
}

/// Whether `inj` meets every rating, floor and voltage cap exactly.
pub fn exactly_feasible(scenario: &Scenario, inj: &InjectionSet, v: &[(Complex64, Complex64)]) -> bool {
    for ibr in &scenario.ibrs {
        let i = inj.get(ibr.bus);
        if (0..3).any(|p| trig_peak(&i, p) > ibr.i_max) {
            return false;
        }
        let (vp, vn) = v[ibr.bus - 1];
        let s = complex_power(vp, vn, &i);
        if s.norm() > ibr.s_max || s.re < ibr.p_min || s.im < ibr.q_min {
            return false;
        }
    }
    v.iter().all(|(p, n)| p.norm() <= scenario.v_ph_pk && n.norm() <= scenario.v_ph_pk)
}

pub struct GridOptimum {
    pub objective: f64,
    pub injection: Injection,
    pub feasible_points: usize,
}

/// Exhaustive search over a `steps^4` grid on `[-i_max, i_max]^4` for a
/// scenario with a single IBR.
pub fn grid_search_single_ibr(scenario: &Scenario, alpha: f64, lambda: f64, steps: usize) -> GridOptimum {
    assert_eq!(scenario.ibrs.len(), 1);
    let ibr = scenario.ibrs[0];
    let buses = scenario.regulated_buses();
    let axis: Vec<f64> =
        (0..steps).map(|k| -ibr.i_max + 2.0 * ibr.i_max * k as f64 / (steps - 1) as f64).collect();
    // the network is linear: superpose unit responses instead of re-solving
    let base = reference_flow(scenario, &InjectionSet::new());
    let unit = |c: [f64; 4]| {
        let mut set = InjectionSet::new();
        set.insert(ibr.bus, Injection::from_array(c));
        let v = reference_flow(scenario, &set);
        v.iter().zip(&base).map(|(a, b)| (a.0 - b.0, a.1 - b.1)).collect::<Vec<_>>()
    };
    let resp = [unit([1.0, 0.0, 0.0, 0.0]), unit([0.0, 1.0, 0.0, 0.0]), unit([0.0, 0.0, 1.0, 0.0]), unit([0.0, 0.0, 0.0, 1.0])];
    let mut best = GridOptimum { objective: f64::INFINITY, injection: Injection::default(), feasible_points: 0 };
    let mut v = base.clone();
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                for &d in &axis {
                    let i = Injection::new(a, b, c, d);
                    for (k, slot) in v.iter_mut().enumerate() {
                        slot.0 = base[k].0 + resp[0][k].0 * a + resp[1][k].0 * b;
                        slot.1 = base[k].1 + resp[2][k].1 * c + resp[3][k].1 * d;
                    }
                    let mut set = InjectionSet::new();
                    set.insert(ibr.bus, i);
                    if !exactly_feasible(scenario, &set, &v) {
                        continue;
                    }
                    best.feasible_points += 1;
                    let j = objective(&v, &buses, alpha, lambda, scenario.v_ph_pk);
                    if j < best.objective {
                        best.objective = j;
                        best.injection = i;
                    }
                }
            }
        }
    }
    best
}
