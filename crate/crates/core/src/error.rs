use thiserror::Error;

/// Errors raised by the decision pipelines and the file-format parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JepError {
    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("invalid encoding at node {node}: {reason}")]
    InvalidEncoding { node: String, reason: String },

    #[error("size limit exceeded: {what} exceeds {limit}{}", detail_suffix(.detail))]
    SizeLimitExceeded {
        what: String,
        limit: usize,
        detail: String,
    },

    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("graph is not a cograph (contains an induced P4)")]
    NotCograph,

    #[error("invalid cotree: {0}")]
    InvalidCotree(String),

    #[error("the forbidden set does not contain P4")]
    MissingP4,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("gluing vertex {0} is not reachable in the auxiliary graph")]
    UnreachableGluingVertex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no verdict: {0}")]
    Undecided(String),

    #[error("certificate failed: {0}")]
    CertificateFailed(String),
}

fn detail_suffix(detail: &str) -> String {
    if detail.is_empty() {
        String::new()
    } else {
        format!(" ({detail})")
    }
}

impl JepError {
    pub fn size_limit(what: impl Into<String>, limit: usize) -> Self {
        JepError::SizeLimitExceeded {
            what: what.into(),
            limit,
            detail: String::new(),
        }
    }

    /// Attaches a note to a size-limit error that has none; other errors pass
    /// through unchanged.
    pub fn with_size_note(self, note: impl FnOnce() -> String) -> Self {
        match self {
            JepError::SizeLimitExceeded { what, limit, detail } if detail.is_empty() => JepError::SizeLimitExceeded {
                what,
                limit,
                detail: note(),
            },
            e => e,
        }
    }

    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        JepError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, JepError>;
