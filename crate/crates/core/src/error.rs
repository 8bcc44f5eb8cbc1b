use thiserror::Error;

/// Errors raised while building or checking lattice objects.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero Laurent polynomial has no asymptotic term")]
    ZeroPolynomial,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator on {width} site(s) starting at site {site} does not fit a chain of {sites} site(s)")]
    SiteOutOfRange { site: usize, width: usize, sites: usize },

    #[error("q-commutator factor must be non-zero")]
    ZeroQFactor,

    #[error("degenerate anisotropy: sin(mu) = 0 for mu = {mu}")]
    DegenerateAnisotropy { mu: f64 },

    #[error("chain must have at least one site")]
    EmptyChain,

    #[error("chain of {sites} sites exceeds the configured cap of {cap}")]
    TooManySites { sites: usize, cap: usize },

    #[error("matrix dimension {dim} exceeds the eigensolver cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver did not converge within {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("singular normalization: {parameter} ({detail})")]
    SingularNormalization { parameter: String, detail: String },

    #[error("charge extraction failed: {0}")]
    Extraction(String),

    #[error("{object}: Laurent degree {degree} outside documented support [{min}, {max}]")]
    DegreeBound {
        object: String,
        degree: i32,
        min: i32,
        max: i32,
    },

    #[error("unknown {kind}: {value}")]
    Unknown { kind: &'static str, value: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
