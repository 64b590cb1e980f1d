use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A non-finite value showed up during evaluation or integration.
    #[error("numeric error: {message}{}", fmt_location(.location))]
    Numeric {
        message: String,
        location: Option<Vec<f64>>,
    },

    #[error("degenerate element: {0}")]
    DegenerateElement(String),

    /// The DOF matrix is singular or too badly conditioned to solve.
    #[error("unisolvence failure: sigma_min/sigma_max = {condition_ratio:e}")]
    Unisolvence { condition_ratio: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn fmt_location(location: &Option<Vec<f64>>) -> String {
    match location {
        Some(x) => format!(" at {x:?}"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::DegenerateElement(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 2,
            Error::Numeric { .. } | Error::Unisolvence { .. } => 3,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, location: Option<&[f64]>) -> Self {
        Error::Numeric {
            message: msg.into(),
            location: location.map(<[f64]>::to_vec),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
