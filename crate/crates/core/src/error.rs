use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters supplied when building a table, hasher, sketch or query.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation was called in a state that does not support it.
    #[error("usage error: {0}")]
    Usage(String),

    /// A bound or estimator was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sketch needed more than `width` trailing-zero bits to fit its buffer.
    #[error(
        "sketch level exceeded the {width}-bit hash width; partial estimate {partial_estimate}"
    )]
    LevelExhausted { width: u32, partial_estimate: f64 },

    #[error("estimate undefined: {0}")]
    UndefinedEstimate(String),

    #[error("stream has {len} symbols, fewer than n = {n}")]
    EmptyInput { len: u64, n: usize },

    #[error("exact tabulation refused: more than {cap} distinct keys")]
    OracleGuard { cap: usize },

    #[error("malformed UTF-8 at byte offset {offset}")]
    Decode { offset: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) | Error::Domain(_) => 2,
            _ => 3,
        }
    }
}
