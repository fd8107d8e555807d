use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate stream: all symbols are zero")]
    DegenerateStream,
    #[error("empty symbol stream")]
    EmptyStream,
    #[error("bad magic in symbol file")]
    BadMagic,
    #[error("unsupported symbol file version {0}")]
    VersionMismatch(u16),
    #[error("truncated payload: header announces {expected} bytes, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("rate infeasible: target of {target} bits is below the {minimum}-bit minimum")]
    RateInfeasible { target: usize, minimum: usize },
    #[error("corrupt source stream: {0}")]
    CorruptStream(String),
    #[error("ratio {requested} is not achievable; nearest valid ratios: {below} and {above}")]
    RatioNotAchievable {
        requested: f64,
        below: f64,
        above: f64,
    },
    #[error("equalizer diverged (tap norm {0:.3e})")]
    EqualizerDiverged(f64),
    #[error("pilot layout incompatible with stream: {0}")]
    PilotLayout(String),
    #[error("anchor unreachable: {0}")]
    AnchorUnreachable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("image format error: {0}")]
    Image(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
