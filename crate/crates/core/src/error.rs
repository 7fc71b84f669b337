use thiserror::Error;

/// A parse failure positioned at a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    MalformedLine(String),
    #[error("edge endpoint {vertex} has no vertex line in this example")]
    DanglingEdge { vertex: u32 },
    #[error("duplicate vertex id {id}")]
    DuplicateVertexId { id: u32 },
    #[error("vertex id {id} outside the contiguous range 1..={count}")]
    NonContiguousIds { id: u32, count: u32 },
    #[error("duplicate example number {index}")]
    DuplicateExample { index: u32 },
    #[error("undirected edges (`u`) are not supported")]
    UndirectedEdge,
    #[error("label {0:?} is reserved for compressed substructures")]
    ReservedLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompressError {
    #[error("instances overlap in example {example} at vertex {vertex}")]
    OverlappingInstances { example: u32, vertex: u32 },
    #[error("instance refers to unknown example {0}")]
    UnknownExample(u32),
    #[error("instance in example {example} is not an exact embedding")]
    InexactInstance { example: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscoveryError {
    #[error("the graph database is empty")]
    EmptyDatabase,
    #[error("invalid discovery parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error(transparent)]
    Discovery(#[from] DiscoveryError),
    #[error("no normative pattern: best substructure has {instances} exact instance(s), need at least 2")]
    NoNormativePattern { instances: usize },
    #[error("invalid detector parameters: {0}")]
    InvalidParams(&'static str),
}
