use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// An iterative solver stopped without meeting its tolerance.
    #[error("{solver} did not converge after {iterations} iterations (last iterate {last_iterate})")]
    Convergence {
        solver: &'static str,
        iterations: usize,
        last_iterate: f64,
    },

    #[error("responsibilities undefined at sample {index} (x = {value}): every component density is zero")]
    ResponsibilityUndefined { index: usize, value: f64 },

    #[error("component {component} collapsed: effective weight {effective_weight:e} below floor {floor:e}")]
    ComponentCollapse {
        component: usize,
        effective_weight: f64,
        floor: f64,
    },

    #[error("component {component} collapsed: variance {variance:e} below floor {floor:e}")]
    VarianceCollapse {
        component: usize,
        variance: f64,
        floor: f64,
    },

    /// Every EM restart failed; one diagnostic line per restart.
    #[error("fit failed, all restarts collapsed: {}", diagnostics.join("; "))]
    FitFailed { diagnostics: Vec<String> },

    #[error("no records in band [{lo}, {hi}] Hz")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("load error: {0}")]
    Load(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
