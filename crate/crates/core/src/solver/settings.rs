use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Primal residual accepted from a continuous subproblem.
    pub kkt_tolerance: f64,
    /// Branch-and-bound stops once incumbent minus lower bound is at most this.
    pub absolute_gap: f64,
    pub max_nodes: usize,
    /// Solve only the warm-start side assignment (plus the root relaxation for a bound).
    pub heuristic_only: bool,
    /// Carried into reports. The search itself draws no random numbers.
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { kkt_tolerance: 1e-7, absolute_gap: 1e-6, max_nodes: 10_000, heuristic_only: false, seed: 0 }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.kkt_tolerance > 0.0) || !(self.absolute_gap > 0.0) {
            return Err("solver tolerances must be positive".into());
        }
        if self.max_nodes == 0 {
            return Err("max_nodes must be at least 1".into());
        }
        Ok(())
    }
}
