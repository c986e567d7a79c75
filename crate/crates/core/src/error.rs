use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("table is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid Pauli string at column {column}: {message}")]
    PauliParse { column: usize, message: String },

    #[error("line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("tableau is not a valid Clifford tableau")]
    InvalidTableau,

    #[error("odd phase exponent {0} where an even one was required")]
    OddPhase(u8),

    #[error("gate {0} is not unitary")]
    NotUnitary(&'static str),

    #[error("reference sample has {got} bits but the circuit has {expected} measurements")]
    ReferenceLength { got: usize, expected: usize },

    #[error("detector lookback rec[-{lookback}] reaches before the first measurement")]
    BadLookback { lookback: usize },

    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),

    #[error("malformed {format} data: {message}")]
    Format { format: &'static str, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
