use thiserror::Error;

/// Errors produced by circuit construction, simulation, and the experiment
/// harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },

    #[error("duplicate qubit index {index} in gate")]
    DuplicateQubit { index: usize },

    #[error("circuit width {circuit} does not match state width {state}")]
    WidthMismatch { circuit: usize, state: usize },

    #[error("register width must be at least 1")]
    EmptyRegister,

    #[error("approximation depth must be at least 1")]
    InvalidDepth,

    #[error("register width must be between 1 and 63 qubits, got {width}")]
    InvalidWidth { width: usize },

    #[error("register `{name}` overlaps an existing register or exceeds the circuit width")]
    RegisterOverlap { name: String },

    #[error("gate `{kind}` is not in the basis gate set")]
    NonBasisGate { kind: &'static str },

    #[error("target register is not in |0...0>")]
    RegisterNotZero,

    #[error("invalid qinteger: {reason}")]
    InvalidQInteger { reason: String },

    #[error("invalid target register width {m} for addend width {n}")]
    InvalidTargetWidth { n: usize, m: usize },

    #[error("control qubit {control} overlaps the operand registers (first free index {min})")]
    ControlOverlap { control: usize, min: usize },

    #[error("state has zero norm")]
    ZeroNormState,

    #[error("density-matrix oracle supports at most {max} qubits, got {width}")]
    WidthTooLarge { width: usize, max: usize },

    #[error("counts map is empty")]
    EmptyCounts,

    #[error("expected-output set is empty")]
    EmptyExpected,

    #[error("point aggregation needs at least 2 instances, got {got}")]
    TooFewInstances { got: usize },

    #[error("infeasible instance pattern: {reason}")]
    InfeasiblePattern { reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration:\n{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
