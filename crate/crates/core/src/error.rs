use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow in exact ring arithmetic")]
    Overflow,
    #[error("Paulis anticommute, product is not Hermitian")]
    NonHermitianProduct,
    #[error("identity Pauli is not allowed here")]
    IdentityPauli,
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("qubit index {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("entry is not real")]
    NotReal,
    #[error("channel is not a Clifford channel")]
    NotClifford,
    #[error("tableau is not symplectic")]
    NotSymplectic,
    #[error("block is not a commuting independent Pauli set")]
    InvalidBlock,
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("no decomposition found: {0}")]
    NotFound(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
