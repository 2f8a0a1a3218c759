use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change of f on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("lambda equation has no root in the bracket (d={d}, n={n}, gamma={gamma})")]
    NoRoot { d: u64, n: u64, gamma: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("tap pattern '{octal}' has {bits} significant bits, more than m+1={max}")]
    TapLength {
        octal: String,
        bits: usize,
        max: usize,
    },

    #[error("invalid octal string '{0}'")]
    InvalidOctal(String),

    #[error("code construction failed: {0}")]
    Construction(String),

    #[error("brute-force enumeration needs k <= 24, got k={0}")]
    Size(usize),

    #[error("decoder hit the extension cap of {cap} extensions")]
    ExtensionCap { cap: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
