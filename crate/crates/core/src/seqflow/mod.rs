//! Exact sequence-domain power flow and constraint evaluation.

mod current;
mod flow;
mod power;
mod verify;

pub use current::{
    max_phase_current, phase_coefficients, phase_current_at, phase_current_magnitude, sampled_phase_peak, Phase,
};
pub use flow::{
    project_dq, solve_sequence_flow, BusVoltage, DqVoltage, FlowResult, Injection, InjectionSet, VoltageCoupling,
};
pub use power::{apparent_power, power_coefficients, PowerOutput};
pub use verify::{
    relaxation_gaps, verify_solution, ConstraintCheck, ConstraintKind, IbrOperatingPoint, PolygonGapNote,
    RelaxationGap, VerificationReport, VerifyTolerances,
};
