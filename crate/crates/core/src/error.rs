use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no simplices")]
    NoSimplices,

    #[error("face {face} has {arity} vertices, only triangles are supported")]
    NonTriangularFace { face: usize, arity: usize },

    #[error("simplex {simplex} references vertex {index} but the mesh has {count} vertices")]
    DanglingIndex {
        simplex: usize,
        index: usize,
        count: usize,
    },

    #[error("simplex {0} repeats a vertex")]
    DegenerateSimplex(usize),

    #[error("grid declares {expected} values but {found} were given")]
    GridSizeMismatch { expected: usize, found: usize },

    #[error("field `{name}` has {found} values, carrier has {expected} vertices")]
    FieldLength {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("field `{name}` has a non-finite value at vertex {vertex}")]
    NonFiniteValue { name: String, vertex: usize },

    #[error("mesh is disconnected: vertex {0} is unreachable")]
    Disconnected(usize),

    #[error("mesh needs at least two vertices")]
    DegenerateMesh,

    #[error("empty mesh")]
    EmptyMesh,

    #[error("multi-field needs at least one field")]
    NoFields,

    #[error("invalid quantization: {0}")]
    InvalidQuantization(String),

    #[error("quantization spec has {spec} fields, multi-field has {fields}")]
    FieldCountMismatch { spec: usize, fields: usize },

    #[error("invalid field order {0:?}")]
    InvalidOrder(Vec<usize>),

    #[error("epsilon {epsilon} too large: offsets reach {offset}, limit is {limit}")]
    EpsilonTooLarge {
        epsilon: f64,
        offset: f64,
        limit: f64,
    },

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("unresolved degeneracy at node {node}: {reason}")]
    UnresolvedDegeneracy { node: usize, reason: String },

    #[error("missing persistence diagram for {0}")]
    MissingDiagram(String),

    #[error("a multi-dimensional persistence diagram needs at least two fields, got {0}")]
    TooFewFields(usize),

    #[error("invalid cost matrix: {0}")]
    InvalidCost(String),

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("quantization specs differ")]
    SpecMismatch,

    #[error("q must be positive and finite, got {0}")]
    InvalidQ(f64),

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid MDPD: {0}")]
    InvalidMdpd(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
