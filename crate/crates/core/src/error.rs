use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bandwidth infeasible: {vehicles} vehicles exceed {units} bandwidth units")]
    InfeasibleBandwidth { vehicles: usize, units: u32 },

    #[error("infeasible matching: {0}")]
    InfeasibleMatching(String),

    #[error("bid references unknown cluster {0}")]
    UnknownCluster(usize),

    #[error("auction did not settle: {rounds} rounds exceeded twice the bound of {bound}")]
    Divergence { rounds: u64, bound: u64 },

    #[error("instance too large for an exact reference solve: {maps:.3e} candidates exceed the guard of {guard:.1e}")]
    SizeGuard { maps: f64, guard: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
