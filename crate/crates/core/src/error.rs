use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A ring is too narrow to hold a sub-region circle.
    #[error("degenerate ring {ring}: sub-region radius {radius} exceeds ring radius {ring_radius}")]
    DegenerateRing {
        ring: usize,
        radius: f64,
        ring_radius: f64,
    },

    /// The tiling at an altitude needs more sub-regions than the UAV may visit.
    #[error("altitude {altitude} m needs {subregions} sub-regions, more than w_max = {w_max}")]
    Infeasible {
        altitude: f64,
        subregions: usize,
        w_max: usize,
    },

    #[error("no altitude in the set satisfies 1 <= W <= {w_max}")]
    AllInfeasible { w_max: usize },

    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DegenerateRing { .. } => "degenerate_ring",
            Error::Infeasible { .. } => "infeasible",
            Error::AllInfeasible { .. } => "all_infeasible",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
