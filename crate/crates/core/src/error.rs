use thiserror::Error;

use crate::graph::{ClassId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("class {class} out of range 1..={max}")]
    ClassOutOfRange { class: usize, max: usize },

    #[error("class vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("the TOP class vector has no worst class")]
    TopHasNoWorstClass,

    #[error("edge evaluation failed: {0}")]
    Evaluation(String),

    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),

    #[error("vertex {0} is not in the search tree")]
    NotInTree(VertexId),

    #[error("simple path enumeration exceeded the cap of {0} paths")]
    EnumerationCap(usize),

    #[error("invalid world: {0}")]
    World(String),

    #[error("invalid batch matrix: {0}")]
    Matrix(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn class_range(class: ClassId, max: usize) -> Self {
        Error::ClassOutOfRange {
            class: class.get() as usize,
            max,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
