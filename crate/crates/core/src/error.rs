use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for {num_qubits}-qubit system")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} appears more than once in one gate")]
    DuplicateQubit(usize),
    #[error("qubit {0} is not covered by any declared register")]
    UnregisteredQubit(usize),
    #[error("non-unitary operator: {0}")]
    NonUnitary(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("register collision: {0}")]
    RegisterCollision(String),
    #[error("bitstring `{bits}` does not match register width {width}")]
    Bitstring { bits: String, width: usize },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("feature {index} = {value} lies outside [-pi, pi]")]
    FeatureOutOfRange { index: usize, value: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("{solver} did not converge within {iterations} iterations")]
    NonConvergence { solver: &'static str, iterations: usize },
    #[error("kernel is not positive semidefinite (min eigenvalue {0:e})")]
    NonPsd(f64),
    #[error("objective returned a non-finite value {value} at evaluation {eval_index}")]
    NonFinite { value: f64, eval_index: u64 },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("io: {0}")]
    Io(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
