use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate entry at index {0}")]
    DuplicateIndex(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid bit path {0:?}")]
    InvalidBitPath(String),
    #[error("path of depth {path} exceeds tree depth {tree}")]
    PathTooDeep { path: usize, tree: usize },
    #[error("level {level} out of range 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("route already complete: all {0} address bits are stored")]
    RouteComplete(usize),
    #[error("address width {got} does not match qRAM width {expected}")]
    AddressWidth { got: usize, expected: usize },
    #[error("routing requires an empty switch tree")]
    TreeNotEmpty,
    #[error("incomplete route: {stored} of {needed} bits stored")]
    IncompleteRoute { stored: usize, needed: usize },
    #[error("duplicate address {0} in superposed query")]
    DuplicateAddress(String),
    #[error("cell count {got} does not match 2^{width}")]
    CellCount { got: usize, width: usize },

    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("duplicate register name {0:?}")]
    DuplicateRegister(String),
    #[error("layout needs {qubits} qubits, cap is {cap}")]
    TooManyQubits { qubits: usize, cap: usize },
    #[error("value {value} does not fit in register {register:?} of width {width}")]
    WordOverflow { register: String, value: u64, width: usize },
    #[error("qubit {bit} out of range for register {register:?}")]
    QubitOutOfRange { register: String, bit: usize },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("rotation target is not |0> on a controlled branch")]
    RotationTargetNotZero,
    #[error("dimension mismatch: state has {state}, target has {target}")]
    DimensionMismatch { state: usize, target: usize },

    #[error("dead branch: parent weight is zero")]
    DeadBranch,
    #[error("ancilla register {0:?} is not clean")]
    DirtyAncilla(String),
    #[error("zero vector cannot be prepared")]
    ZeroVector,
    #[error("row {0} has zero norm")]
    ZeroRow(usize),
    #[error("zero matrix cannot be prepared")]
    ZeroMatrix,
}
