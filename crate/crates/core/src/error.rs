use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("coset limit of {0} exceeded")]
    CosetLimit(usize),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("size bound exceeded: {0}")]
    SizeBound(String),
    #[error("presentation mismatch")]
    PresentationMismatch,
    #[error("not an identity among relations (boundary is {0})")]
    NotAnIdentity(String),
    #[error("not a cocycle")]
    NotACocycle,
    #[error("not a subgroup")]
    NotASubgroup,
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("abstract kernel is not extendible")]
    NotExtendible,
    #[error("inconsistent witness: {0}")]
    InconsistentWitness(String),
    #[error("invalid crossed module: {0}")]
    InvalidCrossedModule(String),
    #[error("invalid abstract kernel: {0}")]
    InvalidKernel(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("{0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
