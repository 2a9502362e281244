use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("conjugacy class of {element} exceeds the enumeration budget of {budget}")]
    UnboundedClass { element: String, budget: usize },

    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: u32, right: u32 },

    #[error("depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("empty core: mu(Z00) = {core} does not exceed delta*mu(Z) = {bound}")]
    EmptyCore { core: String, bound: String },

    #[error("postcondition {clause} failed: {detail}")]
    PostconditionFailure { clause: String, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnboundedClass { .. } => "UnboundedClass",
            Error::DepthMismatch { .. } => "DepthMismatch",
            Error::DepthExhausted(_) => "DepthExhausted",
            Error::BudgetExhausted(_) => "BudgetExhausted",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::SizeGuard(_) => "SizeGuard",
            Error::EmptyCore { .. } => "EmptyCore",
            Error::PostconditionFailure { .. } => "PostconditionFailure",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }
}
