use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::problem::{BuildOptions, ObjectiveConfig};
use crate::seqflow::VerifyTolerances;
use crate::solver::SolverSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyId {
    /// Positive-sequence support only.
    S1,
    /// Negative-sequence attenuation only.
    S2,
    /// Both terms, negative sequence weighted 1 and positive sequence by lambda.
    S3,
}

impl StrategyId {
    pub const ALL: [StrategyId; 3] = [StrategyId::S1, StrategyId::S2, StrategyId::S3];

    /// `(alpha, lambda)` for this strategy; `lambda` only affects S3.
    pub fn weights(self, lambda: f64) -> (f64, f64) {
        match self {
            StrategyId::S1 => (0.0, 1.0),
            StrategyId::S2 => (1.0, 0.0),
            StrategyId::S3 => (1.0, lambda),
        }
    }

    pub fn objective(self, lambda: f64, regulated: Vec<usize>) -> Result<ObjectiveConfig, ConfigError> {
        let (alpha, lambda) = self.weights(lambda);
        ObjectiveConfig::new(alpha, lambda, regulated)
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyId::S1 => "s1",
            StrategyId::S2 => "s2",
            StrategyId::S3 => "s3",
        })
    }
}

impl FromStr for StrategyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(StrategyId::S1),
            "s2" => Ok(StrategyId::S2),
            "s3" => Ok(StrategyId::S3),
            other => Err(format!("unknown strategy `{other}` (expected s1, s2 or s3)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub solver: SolverSettings,
    /// Positive-sequence weight of S3.
    pub lambda: f64,
    /// Overrides the scenario's polygon side count.
    pub polygon_sides: Option<usize>,
    /// Overrides the scenario's big-M constant.
    pub big_m: Option<f64>,
    pub max_sc_iters: usize,
    /// Stop once no voltage component at an IBR bus moves more than this, pu.
    pub sc_tolerance: f64,
    /// Tie-breaking weight on `sum I^2`; see [`ObjectiveConfig`].
    pub current_regularization: f64,
    pub build: BuildOptions,
    pub verify: VerifyTolerances,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            solver: SolverSettings::default(),
            lambda: 1.0,
            polygon_sides: None,
            big_m: None,
            max_sc_iters: 20,
            sc_tolerance: 1e-4,
            current_regularization: 1e-6,
            build: BuildOptions::default(),
            verify: VerifyTolerances::default(),
        }
    }
}
