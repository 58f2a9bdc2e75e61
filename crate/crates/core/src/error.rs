use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported gate `{0}`")]
    UnsupportedGate(String),

    #[error("qubit index {index} out of range for {size} qubits")]
    QubitOutOfRange { index: usize, size: usize },

    #[error("classical bit {index} out of range for {size} bits")]
    ClbitOutOfRange { index: usize, size: usize },

    #[error("invalid instruction: {0}")]
    InvalidInstruction(String),

    #[error("unsupported input circuit: {0}")]
    UnsupportedCircuit(String),

    #[error("no gate with id {0}")]
    UnknownGate(usize),

    #[error("gate {0} is not a real two-qubit gate")]
    NotTwoQubitGate(usize),

    #[error("gate {0} is already virtual")]
    AlreadyVirtual(usize),

    #[error("no qubit-graph edge between {0} and {1}")]
    NoSuchEdge(usize, usize),

    #[error("instance too large for exact mode: {what} = {size} exceeds {limit}")]
    InstanceTooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("fragment {fragment} cannot be reduced below width {width} (max fragment size {max})")]
    WidthUnreachable {
        fragment: usize,
        width: usize,
        max: usize,
    },

    #[error("circuit has {qubits} qubits, simulator limit is {limit}")]
    QubitLimit { qubits: usize, limit: usize },

    #[error("fragment {fragment} would need {count} instances, above the limit of {limit}")]
    InstanceOverflow {
        fragment: usize,
        count: u128,
        limit: u64,
    },

    #[error("no QPU can fit fragment {fragment} of width {width}")]
    NoFittingQpu { fragment: usize, width: usize },

    #[error("circuit of width {width} does not fit on QPU `{qpu}` with {capacity} qubits")]
    DoesNotFit {
        width: usize,
        qpu: String,
        capacity: usize,
    },

    #[error("result shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown benchmark family `{0}`")]
    UnknownFamily(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
