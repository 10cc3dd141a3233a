//! Coordinated positive/negative-sequence current dispatch for community
//! inverter-based resources (IBRs) in radial distribution feeders.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: scenario data, radial topology, and the sequence-domain
//!   network matrices.
//! - [`seqflow`]: exact sequence power flow, phase current peaks, apparent
//!   power, and feasibility verification.
//! - [`problem`]: assembly of the mixed-integer second-order cone program.
//! - [`solver`]: branch-and-bound over polygon side selections on top of a
//!   conic interior-point subproblem solver.
//! - [`orchestrator`]: successive convexification of the voltage-current
//!   products and the S1/S2/S3 strategy comparison.

pub mod error;
pub mod model;
pub mod orchestrator;
pub mod problem;
pub mod report;
pub mod seqflow;
pub mod solver;
pub mod synth;

pub use error::{ConfigError, ModelError, ScenarioError, TopologyError, VumError};
pub use model::{Phasor, Scenario, Sequence, SequenceNetworkModel};
pub use orchestrator::{compare_strategies, run_strategy, RunSettings, StrategyId};
pub use report::{ComparisonReport, SolveReport};
pub use seqflow::{Injection, InjectionSet};
pub use solver::{SolveStatus, SolverSettings};
