use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular chord system (|det| = {det:e})")]
    Singular { det: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("geodesic left the chart at t = {t}")]
    ChartExit { t: f64 },
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("distance oracles disagree: {0}")]
    OracleResolution(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("geodesic construction failed: {0}")]
    Geodesic(String),
    #[error("ODE integration failed: {0}")]
    Integration(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
