use std::path::PathBuf;

use crate::tw::TestOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("group {0} has no entries")]
    EmptyGroup(usize),

    #[error("group {0} has zero variance and cannot be standardized")]
    DegenerateGroup(usize),

    #[error("population std of group {0} is not positive")]
    NonPositiveStd(usize),

    #[error("entry {entry:?} is claimed by rectangles {first} and {second}")]
    Overlap {
        entry: (usize, usize),
        first: usize,
        second: usize,
    },

    #[error("rectangles cover every entry; background would be empty")]
    EmptyBackground,

    #[error("rectangle {0} is empty")]
    EmptyRectangle(usize),

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("alpha {0} is outside the tabulated range [0.001, 0.5]")]
    AlphaOutOfRange(f64),

    #[error("no hypothesis K0 <= {} was accepted", .trace.len().saturating_sub(1))]
    NotAccepted { trace: Vec<TestOutcome> },

    #[error(
        "cannot place {k0} distinct seed cells in a {rows}x{cols} grid with a non-empty background"
    )]
    InfeasibleInit { k0: usize, rows: usize, cols: usize },

    #[error("cannot cut {count} items into {l} clusters")]
    LTooLarge { l: usize, count: usize },

    #[error("layout with K={k} does not fit a {n}x{p} matrix")]
    LayoutInfeasible { k: usize, n: usize, p: usize },

    #[error("ensemble has no successful trials")]
    EmptyEnsemble,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed Tracy-Widom table: {0}")]
    TableFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::InvalidAssignment(_) => "InvalidAssignment",
            Error::EmptyGroup(_) => "EmptyGroup",
            Error::DegenerateGroup(_) => "DegenerateGroup",
            Error::NonPositiveStd(_) => "NonPositiveStd",
            Error::Overlap { .. } => "OverlapError",
            Error::EmptyBackground => "EmptyBackground",
            Error::EmptyRectangle(_) => "EmptyRectangle",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::NotAccepted { .. } => "NotAccepted",
            Error::InfeasibleInit { .. } => "InfeasibleInit",
            Error::LTooLarge { .. } => "LTooLarge",
            Error::LayoutInfeasible { .. } => "LayoutInfeasible",
            Error::EmptyEnsemble => "EmptyEnsemble",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::TableFormat(_) => "TableFormat",
            Error::Io { .. } => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }

    /// Process exit code: 2 input/contract error, 3 statistical
    /// non-acceptance, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotAccepted { .. } => 3,
            Error::NoConvergence { .. } => 4,
            _ => 2,
        }
    }
}
