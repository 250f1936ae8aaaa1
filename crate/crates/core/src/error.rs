use std::path::PathBuf;

/// Everything that can go wrong in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too small (need p >= 3)")]
    TooSmall(u64),
    #[error("modulus {p} exceeds the cap {cap}")]
    TooLarge { p: u64, cap: u64 },
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("operands live in different fields (p={0} vs p={1})")]
    FieldMismatch(u64, u64),
    #[error("divisor set contains 0")]
    ZeroDivisor,
    #[error("dilation factor must be nonzero")]
    ZeroDilation,
    #[error("function value 0 at x={0}; codomain must be F_p^*")]
    ZeroInCodomain(u64),
    #[error("set A contains 0")]
    ZeroInA,
    #[error("moment exponent must be >= 1, got {0}")]
    BadExponent(String),
    #[error("empty set where a nonempty one is required")]
    EmptySet,
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    BadEpsilon(f64),
    #[error("P is not contained in B-C")]
    BadP,
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{}:{line}: {msg}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_same(p: u64, q: u64) -> Result<()> {
    if p == q {
        Ok(())
    } else {
        Err(Error::FieldMismatch(p, q))
    }
}
