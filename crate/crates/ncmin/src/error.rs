//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("generator gave up after {attempts} attempts: {reason}")]
    GeneratorFailed { attempts: usize, reason: String },

    #[error("genotype length {got} does not match layout length {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("unknown flow-graph node id {0}")]
    UnknownFlowNode(usize),

    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(u64),

    #[error("rate {rate} is not achievable: min over sinks of max-flow is {max_flow}")]
    RateUnachievable { rate: u32, max_flow: u32 },

    #[error("genotype is not a valid block transmission state")]
    InvalidBtsGenotype,

    #[error("block length must be at least 2, got {0}")]
    BlockTooShort(usize),

    #[error("infeasible genotype where a feasible one is required")]
    InfeasibleInput,

    #[error("search space of about 10^{log10:.2} states exceeds the cap of {cap}")]
    SearchSpaceTooLarge { log10: f64, cap: u64 },

    #[error("no feasible genotype exists for this network and rate")]
    NoFeasibleGenotype,

    #[error("sample length mismatch: {0} vs {1}")]
    SampleLengthMismatch(usize, usize),

    #[error("need at least two paired samples, got {0}")]
    TooFewSamples(usize),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("failed to parse experiment spec: {0}")]
    Toml(#[from] toml::de::Error),
}
