use thiserror::Error;

/// Errors produced by the moment engine, the oracle, the distribution models,
/// the bound search and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An index (Stirling order, moment order, ...) outside the supported table.
    #[error("{what} out of range: {detail}")]
    Range { what: &'static str, detail: String },

    /// A parameter outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters valid in general but outside the regime a formula is meant for.
    #[error("regime error: {0}")]
    Regime(String),

    /// A requested moment order the closed forms do not cover.
    #[error("unsupported order {order}: {detail}")]
    UnsupportedOrder { order: u32, detail: String },

    /// A configured work cap would be exceeded.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A model fit that cannot be carried out on the data.
    #[error("fit error: {0}")]
    Fit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            what,
            detail: detail.into(),
        }
    }
}
