use thiserror::Error;

use crate::equilibrium::XhatPath;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("arbitrage opportunity O = {0} is outside the supported range (1, 3]")]
    UnsupportedOpportunity(f64),

    #[error(
        "no-trade: highest profitable gas fee {max_gas_fee} does not exceed the base gas fee \
         {base_gas_fee}; the arbitrageur will not trade even if executed first"
    )]
    NoTrade { max_gas_fee: f64, base_gas_fee: f64 },

    #[error("integral equation solver did not converge: {reason}")]
    NonConvergence {
        reason: String,
        partial: Box<XhatPath>,
    },

    #[error("cumulative inverse first-mover advantage only reaches {reached} on the stored path")]
    BracketMissing { reached: f64 },

    #[error("gas fee {value} is outside the equilibrium support [{low}, {high}]")]
    OutOfSupport { value: f64, low: f64, high: f64 },

    #[error("mismatched abscissae: {0}")]
    MismatchedAbscissae(String),

    #[error("singular design matrix; linearly dependent columns: {columns:?}")]
    SingularDesign { columns: Vec<String> },

    #[error("block numbers are not consecutive; missing ranges {missing:?}")]
    BlockGaps { missing: Vec<(u64, u64)> },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }
}

/// Reject NaN / infinite inputs with a field name attached.
pub(crate) fn finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(field, format!("must be finite, got {value}")))
    }
}
