use thiserror::Error;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent system description.
    Spec,
    /// A structural hypothesis or argument precondition does not hold.
    Precondition,
    /// A configured computation budget would be exceeded.
    Resource,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("spec file: {0}")]
    SpecFile(String),

    #[error("the shift of finite type is not topologically mixing; two-sided bounds are unavailable")]
    NonMixing,

    #[error("transitions are not full; the closed form only applies to full-shift carpets")]
    NotFullShift,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("node budget of {budget} exceeded ({detail})")]
    NodeBudget { budget: u64, detail: String },

    #[error("word length {len} exceeds the brute-force oracle bound {bound}")]
    OracleBound { len: usize, bound: usize },

    #[error("render budget exceeded: {cells} cells > {limit}")]
    RenderBudget { cells: u128, limit: u128 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidSystem(_) | Error::SpecFile(_) => ErrorKind::Spec,
            Error::NonMixing | Error::NotFullShift | Error::Precondition(_) => {
                ErrorKind::Precondition
            }
            Error::NodeBudget { .. } | Error::OracleBound { .. } | Error::RenderBudget { .. } => {
                ErrorKind::Resource
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
