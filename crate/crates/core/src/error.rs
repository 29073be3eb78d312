use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parsing, phrase or metasymbol violates its structural contract.
    #[error("structural error at phrase {index}: {reason}")]
    Structural { index: usize, reason: String },

    /// Bad arguments or configuration supplied by the caller.
    #[error("usage error: {0}")]
    Usage(String),

    /// A compressed stream failed to decode.
    #[error("corrupt input at bit {bit_offset}: {reason}")]
    Corrupt { bit_offset: u64, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn structural(index: usize, reason: impl Into<String>) -> Self {
        Error::Structural {
            index,
            reason: reason.into(),
        }
    }

    pub(crate) fn usage(reason: impl Into<String>) -> Self {
        Error::Usage(reason.into())
    }

    pub(crate) fn corrupt(bit_offset: u64, reason: impl Into<String>) -> Self {
        Error::Corrupt {
            bit_offset,
            reason: reason.into(),
        }
    }
}
