use thiserror::Error;

/// Errors reported by the workbench.
///
/// All payloads are plain values so that results can be cached and cloned
/// (the canonical-model cache stores build failures as well as successes).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("modality index {index} out of range for signature with n = {n}")]
    ModalityOutOfRange { index: usize, n: usize },

    #[error("variable p{index} out of range (model covers k = {k} variables)")]
    VariableOutOfRange { index: usize, k: usize },

    #[error("formula is not unimodal: modality index {index} occurs")]
    NotUnimodal { index: usize },

    #[error("expected {expected} formulas, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("valuation enumeration needs {bits} bits, limit is {limit}")]
    SizeLimit { bits: usize, limit: usize },

    #[error("closure has {size} elements, exceeding the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("coordinate count {coords} exceeds the bit budget of {budget}")]
    BitBudget { coords: usize, budget: usize },

    #[error("formula has {nodes} nodes, exceeding the cap of {cap}")]
    FormulaTooLarge { nodes: u64, cap: u64 },

    #[error("empty subset")]
    EmptySubset,

    #[error("tableau search budget exhausted")]
    SearchBudget,

    #[error("invalid frame: {0}")]
    BadFrame(String),

    #[error("unsupported logic: {0}")]
    UnsupportedLogic(String),

    #[error("no witness: the translated formula is valid")]
    TranslationValid,

    #[error("io error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
