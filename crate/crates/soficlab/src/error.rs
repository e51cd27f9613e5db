use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty subshift")]
    EmptySubshift,
    #[error("{0}")]
    Invalid(String),
    #[error("ambiguous stationary vector")]
    AmbiguousStationary,
    #[error("ambiguous Perron data")]
    AmbiguousPerron,
    #[error("not a stationary probability series: {0}")]
    NotStationary(String),
    #[error("horizon too short")]
    HorizonTooShort,
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("code does not carry μ_P to ν_Q")]
    LiftPrecondition,
    #[error("support mismatch")]
    SupportMismatch,
    #[error("lift construction requires e-resolving")]
    NotEResolving,
    #[error("invalid split weights: {0}")]
    InvalidWeights(String),
    #[error("not a periodic point")]
    NotPeriodic,
    #[error("image not SFT; supply Y explicitly or use e-resolving-free operations")]
    ImageNotSft,
    #[error("code is not finite-to-one")]
    NotFiniteToOne,
    #[error("N({k},{m},{n}) needs about 10^{log10_bits:.1} binary digits, beyond the size budget")]
    BoundTooLarge {
        k: u32,
        m: u32,
        n: u32,
        log10_bits: f64,
    },
    #[error("internal invariant violated: {0}")]
    Defect(String),
    #[error("{0}")]
    Model(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
