use thiserror::Error;

/// Problems with the network layout itself.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("line {line} references bus {bus}, but buses are numbered 0..={max_bus}")]
    BusOutOfRange { line: usize, bus: usize, max_bus: usize },
    #[error("line {line} connects bus {bus} to itself")]
    SelfLoop { line: usize, bus: usize },
    #[error("lines {} form a cycle", fmt_ids(.lines))]
    Cycle { lines: Vec<usize> },
    #[error("buses {} are not connected to the slack bus", fmt_ids(.buses))]
    Disconnected { buses: Vec<usize> },
}

fn fmt_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("malformed scenario JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

impl ScenarioError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("I + Z_net * Y_L is singular (condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("objective weights alpha and lambda are both zero")]
    ZeroWeights,
    #[error("objective weight `{name}` must be finite and non-negative, got {value}")]
    NegativeWeight { name: &'static str, value: f64 },
    #[error("polygon needs at least 3 sides, got {0}")]
    TooFewSides(usize),
    #[error("voltage estimate covers {got} buses, expected {expected}")]
    EstimateShape { got: usize, expected: usize },
}

/// Errors raised by the end-to-end driver.
#[derive(Debug, Error)]
pub enum VumError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no injections satisfy the constraints (linearization step {iteration})")]
    Infeasible { iteration: usize },
    #[error("continuous subproblem failed: {reason}")]
    Solver { reason: String },
}
