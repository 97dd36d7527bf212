use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge id {id} out of range (graph has {edge_count} edges)")]
    EdgeOutOfRange { id: usize, edge_count: usize },

    #[error("vertex id {id} out of range (graph has {vertex_count} vertices)")]
    VertexOutOfRange { id: usize, vertex_count: usize },

    #[error("invalid edge coloring: {0}")]
    InvalidColoring(String),

    #[error("color count mismatch: left k={left}, right k={right}")]
    KMismatch { left: usize, right: usize },

    #[error("quotient set is empty")]
    EmptySet,

    #[error("enumeration budget exceeded: need {required} colorings, budget {budget}{}",
        smallest_k.map(|k| format!(" (smallest failing k = {k})")).unwrap_or_default())]
    BudgetExceeded {
        required: u128,
        budget: u128,
        smallest_k: Option<usize>,
    },

    #[error("graph too large for canonical labeling: {vertices} vertices, limit {limit}")]
    CanonicalSizeLimit { vertices: usize, limit: usize },

    #[error("net registry has no entry for (canonical class, k={k}, n={n}); build it first")]
    MissingNetEntry { k: usize, n: usize },

    #[error("decoration does not cover the graph: {0}")]
    DecorationMismatch(String),

    #[error("truncation level mismatch: {0}")]
    LevelMismatch(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
