use thiserror::Error;

/// Errors produced by the library.
///
/// Numerical payloads are stored as `f64` regardless of the scalar type used
/// for the computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PronyError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid sampling scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("degenerate sample set (singular value ratio {ratio:.3e})")]
    DegenerateSamples { ratio: f64 },
    #[error("numerically rank-deficient basis (condition estimate {condition:.3e})")]
    RankDeficient { condition: f64 },
    #[error("singular Jacobian (smallest singular value {smallest:.3e})")]
    SingularJacobian { smallest: f64 },
    #[error("not a regular point: {0}")]
    NotRegular(String),
    #[error("no unimodular root")]
    NoUnimodularRoot,
    #[error("ambiguous root selection: two candidates equally close to the hint")]
    AmbiguousHint,
    #[error("ambiguous branch")]
    AmbiguousBranch,
    #[error("no rank-{rank} structure (singular value gap {gap:.3})")]
    NoRankStructure { rank: usize, gap: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("reconstruction of jump {jump} failed: {source}")]
    Jump {
        jump: usize,
        #[source]
        source: Box<PronyError>,
    },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl PronyError {
    /// True for errors caused by malformed input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        match self {
            PronyError::InvalidModel(_)
            | PronyError::InvalidScheme(_)
            | PronyError::InvalidArgument(_)
            | PronyError::StructureMismatch(_)
            | PronyError::NotRegular(_)
            | PronyError::Io(_)
            | PronyError::Parse(_) => true,
            PronyError::Jump { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for PronyError {
    fn from(e: std::io::Error) -> Self {
        PronyError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for PronyError {
    fn from(e: serde_json::Error) -> Self {
        PronyError::Parse(e.to_string())
    }
}

pub type Result<T, E = PronyError> = std::result::Result<T, E>;
