use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0} has (near) zero norm")]
    ZeroColumn(usize),

    #[error("bad target dimension {target} (must be in 1..={max})")]
    BadDim { target: usize, max: usize },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid subspace spec: {0}")]
    InvalidSpec(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("ragged rows: line {line} has {found} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("lambda must be > 1, got {0}")]
    InvalidLambda(f64),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("lasso did not converge after {iterations} sweeps (duality gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("solve for target {index} failed: {source}")]
    Target {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),

    #[error("code for point {0} is zero; exemplars cannot represent it at this lambda")]
    ZeroCode(usize),

    #[error("affinity graph has no edges")]
    EmptyGraph,

    #[error("class {0} has no exemplars")]
    NoExemplarsForClass(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty selection: all class counts are zero")]
    EmptySelection,

    #[error("grid search only supports dimension 2 or 3, got {0}")]
    UnsupportedDim(usize),

    #[error("hull does not span the ambient space")]
    DegenerateHull,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_target(self, index: usize) -> Self {
        Error::Target {
            index,
            source: Box::new(self),
        }
    }
}
