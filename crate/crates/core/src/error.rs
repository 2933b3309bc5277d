use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid phase profile: {0}")]
    InvalidProfile(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid draw: {0}")]
    InvalidDraw(String),

    /// The discrete sampler only handles coincidences over as many outputs as
    /// there are input photons.
    #[error("QCP estimates only maximum-order correlations (|inputs| = |outputs|), got {inputs} inputs and {outputs} outputs")]
    MaxOrderOnly { inputs: usize, outputs: usize },

    /// An exact routine refused to run because the problem exceeds its cost guard.
    #[error("size limit exceeded for {what}: {got} > limit {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDimension(_)
            | Error::InvalidProfile(_)
            | Error::InvalidSpec(_)
            | Error::InvalidDraw(_)
            | Error::MaxOrderOnly { .. } => 1,
            Error::NumericFailure(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
            Error::SizeLimit { .. } => 3,
        }
    }
}
