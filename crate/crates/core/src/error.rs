use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the layer that raises them; the CLI maps them
/// onto exit codes through [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular (determinant {0:e})")]
    SingularMatrix(f64),
    #[error("map is not loxodromic ({0})")]
    NotLoxodromic(String),
    #[error("argument jump of {jump:.6} rad between samples {index} and {next}", next = index + 1)]
    BranchAmbiguity { index: usize, jump: f64 },
    #[error("derivative evaluated at the pole of the map")]
    DerivativeAtPole,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("zero diagonal entry")]
    ZeroDiagonal,

    #[error("circles {0} and {1} overlap or are closer than the margin")]
    OverlappingCircles(usize, usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unsupported curve `{0}`")]
    UnsupportedCurve(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("cell {0} is contained in no interval I_j")]
    BranchAssignmentFailure(usize),
    #[error("Markov property violated at cell {cell} (endpoint off by {offset:e})")]
    MarkovViolation { cell: usize, offset: f64 },
    #[error("empty cylinder for prefix {0:?}")]
    EmptyCylinder(Vec<usize>),
    #[error("cycle {0:?} has a non-loxodromic group element")]
    NonLoxodromicCycle(Vec<usize>),

    #[error("no spectral gap detected (contraction ratio {0})")]
    NoSpectralGap(f64),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no sign change on [{lo}, {hi}] (f = {flo:e}, {fhi:e})")]
    BracketFailure { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("ensemble too small: {0} orbits at top level")]
    EnsembleTooSmall(usize),
    #[error("evaluator failed at {at}: {source}")]
    EvaluatorFailure {
        at: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("basepoint is not critical: gradient component {index} is {value:e}")]
    NotCritical { index: usize, value: f64 },
    #[error("class {0} degenerates along the stencil")]
    NonLoxodromicOnPath(String),

    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical check, false for bad input or
    /// construction failures.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::EvaluatorFailure { source, .. } => source.is_numerical(),
            Error::NoSpectralGap(_)
            | Error::NoConvergence { .. }
            | Error::BracketFailure { .. }
            | Error::EnsembleTooSmall(_)
            | Error::NotCritical { .. }
            | Error::NonLoxodromicOnPath(_)
            | Error::MarkovViolation { .. } => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
