use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Polygon used both for the circumscribed voltage envelope and the
/// inscribed apparent-power cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonConfig {
    pub sides: usize,
    /// Nominal big-M value (normally the rated voltage).
    pub big_m: f64,
}

impl PolygonConfig {
    pub fn new(sides: usize, big_m: f64) -> Result<Self, ConfigError> {
        if sides < 3 {
            return Err(ConfigError::TooFewSides(sides));
        }
        Ok(Self { sides, big_m })
    }

    /// Normal angle of side `k` (0-based): `2 k pi / n`.
    pub fn theta(&self, k: usize) -> f64 {
        2.0 * k as f64 * PI / self.sides as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.sides).map(|k| self.theta(k)).collect()
    }

    /// `cos(pi / n)`: inradius over circumradius.
    pub fn shrink(&self) -> f64 {
        (PI / self.sides as f64).cos()
    }

    /// Big-M actually written into the envelope rows.
    ///
    /// A deactivated row must hold for every in-bounds point, i.e.
    /// `V+ cos(pi/n) - (Vd cos t + Vq sin t) <= M` with `|(Vd, Vq)| <= V+ <= big_m`,
    /// whose worst case is `big_m (1 + cos(pi/n))`.
    pub fn effective_m(&self) -> f64 {
        self.big_m * (1.0 + self.shrink())
    }
}

/// Weights of the quadratic objective
/// `sum_i alpha (V-_i / Vpk)^2 + lambda (V+_i / Vpk - 1)^2` over regulated buses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub regulated: Vec<usize>,
    /// Weight of `sum I^2` over all current references. Zero leaves the
    /// objective untouched; a tiny value picks the minimum-current solution
    /// when one of the sequence terms is switched off.
    pub current_regularization: f64,
}

impl ObjectiveConfig {
    pub fn new(alpha: f64, lambda: f64, regulated: Vec<usize>) -> Result<Self, ConfigError> {
        let cfg = Self { alpha, lambda, regulated, current_regularization: 0.0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_regularization(mut self, weight: f64) -> Self {
        self.current_regularization = weight;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("lambda", self.lambda),
            ("current_regularization", self.current_regularization),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::NegativeWeight { name, value });
            }
        }
        if self.alpha == 0.0 && self.lambda == 0.0 {
            return Err(ConfigError::ZeroWeights);
        }
        Ok(())
    }

    /// Objective value from per-bus sequence magnitudes (bus-indexed from 1).
    pub fn evaluate(&self, v_pos: impl Fn(usize) -> f64, v_neg: impl Fn(usize) -> f64, v_ph_pk: f64) -> f64 {
        self.regulated
            .iter()
            .map(|&b| {
                self.alpha * (v_neg(b) / v_ph_pk).powi(2) + self.lambda * (v_pos(b) / v_ph_pk - 1.0).powi(2)
            })
            .sum()
    }
}
