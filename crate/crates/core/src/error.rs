use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: loop edge at vertex {vertex}")]
    LoopEdge { line: usize, vertex: String },

    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: String, v: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("dimension {d} outside the supported range 1..={max}")]
    DimensionOutOfRange { d: usize, max: usize },

    #[error("pinned vertices are degenerate (a leading principal minor of the Gram matrix vanishes)")]
    DegeneratePins,

    #[error("graph is not {d}-rigid")]
    NotRigid { d: usize },

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error("no contractible edge found; the input is not a valid triangulated sphere")]
    NoContractibleEdge,

    #[error("total-degree homotopy needs 2^{needed} paths, above the cap of 2^{cap}")]
    PathBudgetExceeded { needed: usize, cap: usize },

    #[error("{failed} of {tracked} paths neither converged nor diverged")]
    ExcessiveFailures { failed: u64, tracked: u64 },

    #[error("independent samples disagree on the realisation number: {counts:?}")]
    Disagreement { counts: Vec<u64> },

    #[error("hypothesis not established: {0}")]
    HypothesisNotEstablished(String),

    #[error("budget exhausted after {0} engine evaluations")]
    BudgetExhausted(usize),

    #[error("certificate: {0}")]
    Certificate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI in error reports.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::LoopEdge { .. } => "loop_edge",
            Error::DuplicateEdge { .. } => "duplicate_edge",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidTriangulation(_) => "invalid_triangulation",
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::DimensionOutOfRange { .. } => "dimension_out_of_range",
            Error::DegeneratePins => "degenerate_pins",
            Error::NotRigid { .. } => "not_rigid",
            Error::InvalidOperation(_) => "invalid_operation",
            Error::NoContractibleEdge => "no_contractible_edge",
            Error::PathBudgetExceeded { .. } => "path_budget_exceeded",
            Error::ExcessiveFailures { .. } => "excessive_failures",
            Error::Disagreement { .. } => "disagreement",
            Error::HypothesisNotEstablished(_) => "hypothesis_not_established",
            Error::BudgetExhausted(_) => "budget_exhausted",
            Error::Certificate(_) => "certificate",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
