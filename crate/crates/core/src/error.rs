use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("negative or non-finite probability {value} at {site}")]
    InvalidMass { site: String, value: f64 },

    #[error("total mass {total} differs from 1 by more than {tolerance:e}")]
    NotNormalized { total: f64, tolerance: f64 },

    #[error("CDF is not non-decreasing at site {site}: {prev} > {next}")]
    NonMonotoneCdf { site: i64, prev: f64, next: f64 },

    #[error("CDF value {value} at site {site} lies outside [0, 1]")]
    CdfOutOfRange { site: i64, value: f64 },

    #[error("invalid step law: {0}")]
    InvalidStepLaw(String),

    #[error("empty evaluation grid")]
    EmptyGrid,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hopf-Lax minimiser stayed on the window edge after {doublings} doublings (window [{lo}, {hi}])")]
    HopfLaxWindow { lo: f64, hi: f64, doublings: u32 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("initial data is not p*-bounded: atom {atom} >= p* = {p_star}")]
    NotPStarBounded { atom: f64, p_star: f64 },

    #[error("N = {n} is below the monotonicity threshold N0 = {n0}")]
    BelowMonotoneThreshold { n: u64, n0: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
