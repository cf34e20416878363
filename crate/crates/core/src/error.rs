use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("mac tag {0} outside 1..=5")]
    BadTag(u8),
    #[error("expected {expected} bytes, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("decryption failed")]
    DecryptFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("empty input")]
    Empty,
    #[error("unknown message tag {0:#04x}")]
    UnknownTag(u8),
    #[error("truncated input")]
    Truncated,
    #[error("trailing bytes after message")]
    TrailingBytes,
    #[error("wrong field count: expected {expected}, got {got}")]
    FieldCount { expected: usize, got: usize },
    #[error("malformed field `{0}`")]
    BadField(&'static str),
}

/// Failures of the simulation itself. These abort a run; they never
/// describe protocol behaviour.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("random value collision")]
    Collision,
    #[error("sequence number overflow")]
    SqnOverflow,
    #[error("session {0} already used")]
    SessionReused(usize),
    #[error("unknown session {0}")]
    UnknownSession(usize),
    #[error("unknown subscriber `{0}`")]
    UnknownSubscriber(String),
    #[error("invalid identity `{0}`")]
    InvalidIdentity(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle budget exhausted")]
    BudgetExceeded,
    #[error("virtual handler {0} is not live")]
    DeadHandler(usize),
    #[error("identity `{0}` is not free")]
    NotFree(String),
    #[error("subscriber is in the middle of a session")]
    MidSession,
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("parse error at token {index}: {msg}")]
    Parse { index: usize, msg: String },
    #[error("identity `{0}` renewed more often than the copy budget allows")]
    CopyBudget(String),
    #[error("transcript line {line}: {msg}")]
    Transcript { line: usize, msg: String },
}
