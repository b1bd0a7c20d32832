use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] mua_core::Error),
    #[error("malformed instance: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bidder {bidder}: value {value} exceeds the cap {cap}")]
    ValueCap { bidder: usize, value: u64, cap: u64 },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mechanism `{0}` has no enumerable range at this size")]
    NoRange(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
