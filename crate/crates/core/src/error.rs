use thiserror::Error;

use crate::varqite::EvolutionTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("{what}: {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("basis is not closed under generator `{generator}` (captured weight {captured:.3e})")]
    NonClosedBasis { generator: String, captured: f64 },

    #[error("empty basis: {0}")]
    EmptyBasis(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("operator is not Hermitian (max imaginary residual {0:.3e})")]
    NotHermitian(f64),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("generator `{0}` is not a single Pauli string; not naive-compilable")]
    NotNaiveCompilable(String),

    #[error("state norm drifted to {0}")]
    NormDrift(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite parameters at step {step}")]
    NonFinite {
        step: usize,
        trace: Box<EvolutionTrace>,
    },
}

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }
}
