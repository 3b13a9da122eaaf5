use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element count {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("register layout too large: {qubits} qubits (limit {limit})")]
    LayoutTooLarge { qubits: u32, limit: u32 },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("amplitude vector has length {got}, layout expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not valid: {0}")]
    InvalidState(String),

    #[error("list range [{lo}, {hi}] is not within [1, {n}]")]
    RangeOutOfBounds { lo: usize, hi: usize, n: usize },

    #[error("threshold k = {k} outside [0, {n}]")]
    ThresholdOutOfRange { k: usize, n: usize },

    #[error("query step {step} outside [{min}, {max}]")]
    StepOutOfRange { step: usize, min: usize, max: usize },

    #[error("distribution lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid adversary parameters: {0}")]
    InvalidParams(String),

    #[error("parameters rejected: {inequality} fails ({detail})")]
    ParamsRejected {
        inequality: &'static str,
        detail: String,
    },

    #[error("interval block length {m} is not divisible by t = {t}")]
    NotDivisible { m: usize, t: usize },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("n = {n} is not a power of t = {t}")]
    NotPowerOfT { n: usize, t: usize },

    #[error("schedule cannot run: {0}")]
    Schedule(String),

    #[error(
        "algorithm exceeds the regime of the lower-bound contradiction: \
         it makes {queries} queries but the adversary schedule covers only {covered} query steps"
    )]
    Regime { queries: usize, covered: usize },

    #[error("invalid algorithm specification: {0}")]
    AlgorithmSpec(String),

    #[error("dimension {dimension} too large for {what} (limit {limit})")]
    TooLarge {
        what: &'static str,
        dimension: usize,
        limit: usize,
    },

    #[error("inputs are not adjacent: k_lo = {lo}, k_hi = {hi}")]
    NotAdjacent { lo: usize, hi: usize },

    #[error("{0}")]
    Config(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Regime { .. } => 3,
            _ => 2,
        }
    }
}
