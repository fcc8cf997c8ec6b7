use crate::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("graph is disconnected: no path between {0} and {1}")]
    DisconnectedGraph(usize, usize),
    #[error("edge {u}-{v} has non-positive weight {w}")]
    InvalidWeight { u: usize, v: usize, w: Rational },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("point set is empty")]
    EmptySet,
    #[error("not a metric: {0}")]
    NotAMetric(String),
    #[error("arithmetic overflow while scaling distances")]
    Overflow,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("subspace is empty")]
    EmptySubspace,
    #[error("{0}")]
    PathOutsideSubspace(String),
    #[error("splice point {0} is not in both subspaces")]
    NoIntersection(usize),
    #[error("spliced path misses (1, {bound}): pair ({i}, {j}) exceeds it by {excess}")]
    BoundMissed {
        i: usize,
        j: usize,
        excess: Rational,
        bound: Rational,
    },
    #[error("graph is not a tree")]
    NotATree,
    #[error("subspaces do not intersect")]
    EmptyIntersection,
    #[error("invalid family spec: {0}")]
    InvalidSpec(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
