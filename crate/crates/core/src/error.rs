use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported field order q={0} (supported: 2,3,4,5,7,8,9,11,13,16)")]
    UnsupportedField(u32),

    #[error("field table for q={q} violates {axiom}")]
    FieldAxiom { q: u32, axiom: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex count {count} exceeds cap {cap}")]
    CapExceeded { count: u128, cap: usize },

    #[error("graph6 parse error at byte {offset}: {reason}")]
    Graph6 { offset: usize, reason: String },

    #[error("invalid switching spec: {0}")]
    InvalidSpec(String),

    #[error("switching conditions violated: {0}")]
    ConditionsViolated(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("recipe stage `{stage}` failed: {source}")]
    Stage { stage: String, source: Box<Error> },
}

impl Error {
    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
