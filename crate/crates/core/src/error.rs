use std::io;

use crate::groups::CliqueFinding;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty code")]
    EmptyCode,

    #[error("empty segment in code {raw:?}")]
    EmptySegment { raw: String },

    #[error("coverage domain: {used} used of {available} available")]
    CoverageDomain { used: usize, available: usize },

    #[error("invalid classification table: {0}")]
    InvalidTable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parameters loosened: built with D={built_d}, eta={built_eta}; requested D={d}, eta={eta}")]
    ParamLoosened {
        built_d: usize,
        built_eta: u64,
        d: usize,
        eta: u64,
    },

    #[error("clique output cap of {cap} exceeded; {} cliques returned", partial.len())]
    OutputCapExceeded {
        cap: usize,
        partial: Vec<CliqueFinding>,
    },

    #[error("bad cutoffs: t1={t1} must be before t2={t2}")]
    BadCutoffs { t1: i32, t2: i32 },

    #[error("axis {0} cannot be projected (expected occupation or sector)")]
    UnknownAxis(String),

    #[error("malformed input at line {line}: {message}")]
    Format { line: u64, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("xml: {0}")]
    Xml(String),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyCode => "EmptyCode",
            Error::EmptySegment { .. } => "EmptySegment",
            Error::CoverageDomain { .. } => "CoverageDomain",
            Error::InvalidTable(_) => "InvalidTable",
            Error::InvalidParams(_) => "InvalidParams",
            Error::ParamLoosened { .. } => "ParamLoosened",
            Error::OutputCapExceeded { .. } => "OutputCapExceeded",
            Error::BadCutoffs { .. } => "BadCutoffs",
            Error::UnknownAxis(_) => "UnknownAxis",
            Error::Format { .. } => "Format",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::Io(_) => "IoFailure",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
            Error::Xml(_) => "Xml",
        }
    }
}
