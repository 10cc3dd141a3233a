//! Network data model and sequence-domain matrices.

mod network;
mod phasor;
mod scenario;
mod schema;
mod topology;

pub use network::{build_equivalent_matrices, build_impedance_matrix, CMatrix, Sequence, SequenceNetworkModel};
pub use phasor::{normalize_angle, Phasor};
pub use scenario::{
    Bases, IbrSpec, Line, RegulatedKeyword, RegulatedSet, Scenario, SlackVoltages, DEFAULT_POLYGON_SIDES,
};
pub use schema::{LoadFile, PhasorFile, ScenarioFile, SlackFile};
pub use topology::{build_path_sets, PathSets};
