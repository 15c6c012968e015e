use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("subshift is empty after pruning")]
    EmptySubshift,
    #[error("bad word: {0}")]
    BadWord(String),
    #[error("cannot parse clopen set: {0}")]
    BadSyntax(String),
    #[error("set is not a complete section: {0}")]
    NotCompleteSection(String),
    #[error("section is not contained in the previous section (level {0})")]
    SectionNotNested(usize),
    #[error("bad telescoping indices: {0}")]
    BadIndices(String),
    #[error("bad telescoping cuts: {0}")]
    BadCuts(String),
    #[error("invalid refinement: {0}")]
    InvalidRefinement(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("point window too short: {0}")]
    WindowTooShort(String),
    #[error("bad path prefix: {0}")]
    BadPrefix(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
