//! Assembly of the mixed-integer second-order cone program.

mod builder;
mod config;
mod dump;
mod layout;
mod standard;

pub use builder::{build_problem, BuildOptions, ProblemBuilder, VoltageEstimate};
pub use config::{ObjectiveConfig, PolygonConfig};
pub use dump::{DumpSoc, DumpVariable, QuadraticForm, SparseRows, StandardFormDump};
pub use layout::{DecisionVector, VariableLayout};
pub use standard::{
    AffineConstraint, LinExpr, MiConvexProblem, Objective, OneHotGroup, Residuals, Sense, SocConstraint, SquaredTerm,
    VarId, VarKind, Variable,
};
