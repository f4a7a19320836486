use std::fmt;
use std::io;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the workbench.
#[derive(Debug)]
pub enum Error {
    /// An argument violated an operation's contract (bad length, range, shape).
    InvalidInput(String),
    /// Scheme parameters outside the supported range.
    InvalidParams(String),
    /// A bounded key has no one-time material left.
    KeyExhausted { consumed: u64, max: u64 },
    /// A signature blob carries the tag of a different scheme.
    SchemeMismatch { expected: &'static str, found_tag: u8 },
    /// A serialized key, signature, or key-store file failed to parse.
    Malformed(String),
    /// Key-store I/O failure.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::KeyExhausted { consumed, max } => {
                write!(f, "key exhausted: {consumed} of {max} one-time uses consumed")
            }
            Error::SchemeMismatch { expected, found_tag } => {
                write!(f, "scheme mismatch: expected {expected}, found tag 0x{found_tag:02x}")
            }
            Error::Malformed(msg) => write!(f, "malformed data: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}
