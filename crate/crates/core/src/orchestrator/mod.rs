//! End-to-end driver: linearization loop, strategies and their comparison.

mod compare;
mod run;
mod strategy;

pub use compare::{compare_strategies, DOMINANCE_TOLERANCE};
pub use run::{effective_scenario, run_strategy};
pub use strategy::{RunSettings, StrategyId};
