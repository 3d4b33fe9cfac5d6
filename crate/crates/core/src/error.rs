use thiserror::Error;

use crate::graph::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layered spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "insufficient truncation for radius {radius}: window [{window_lo}, {window_hi}] \
         must strictly contain layers [{needed_lo}, {needed_hi}]"
    )]
    InsufficientTruncation {
        radius: usize,
        window_lo: i64,
        window_hi: i64,
        needed_lo: i64,
        needed_hi: i64,
    },

    #[error("vertex {0} is not in the carrier graph")]
    NotInCarrier(Vertex),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("terminals coincide at {0}")]
    SameTerminals(Vertex),

    #[error("linear solve failed: zero or negative pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("Kirchhoff cycle law violated: residual {residual:e} on cycle {cycle:?}")]
    KclViolation { residual: f64, cycle: Vec<Vertex> },

    #[error("vertex {0} has truncated degree in the carrier")]
    TruncatedDegree(Vertex),

    #[error("function is not harmonic on the requested set: residual {residual:e} at {vertex}")]
    NotHarmonic { residual: f64, vertex: Vertex },

    #[error("flow is not sourceless away from the ends: residual {0:e}")]
    NotSourceless(f64),

    #[error("cut #{0} does not separate the two ends")]
    NonSeparatingCut(usize),

    #[error("schedule exhausted before convergence; sup-diff trace {trace:?}")]
    NotConverged { trace: Vec<(usize, f64)> },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("odd cycle of length {length} in the non-red subgraph through {start}")]
    OddColourCycle { length: usize, start: Vertex },

    #[error("colouring pattern mismatch: {0}")]
    ColourPattern(String),

    #[error("no sign fits the skew relation: best residual {0:e}")]
    SkewMismatch(f64),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Input and usage problems, as opposed to failed checks.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::InvalidArgument(_)
                | Error::Parse(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
