//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be 1, 2 or 3")]
    InvalidDimension(usize),
    #[error("non-positive size: {0}")]
    NonPositiveSize(String),
    #[error("field evaluates to a non-finite value at {at:?}")]
    NonFiniteSample { at: Vec<f64> },
    #[error("domain mask removes every grid point")]
    MaskDisconnectsEverything,
    #[error("invalid delta: {0}")]
    InvalidDelta(String),
    #[error("single-site profile violates its envelope: {0}")]
    ProfileEnvelope(String),
    #[error("concentration function undefined for negative t = {0}")]
    NegativeT(f64),
    #[error("delta out of range: {0} (must lie in (0, 1/2))")]
    OutOfRangeDelta(f64),
    #[error("eigensolver did not converge: achieved residual {residual:.3e}")]
    SolverNoConvergence { residual: f64 },
    #[error("window endpoint collides with an eigenvalue after {retries} perturbation retries")]
    EndpointCollision { retries: usize },
    #[error("symmetric-indefinite factorization broke down at pivot {index}")]
    FactorizationBreakdown { index: usize },
    #[error("projector basis is not orthonormal (Gram deviation {deviation:.3e})")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("zero vector passed where a normalized eigenvector is required")]
    ZeroVector,
    #[error("window is empty: {0}")]
    EmptyWindow(String),
    #[error("complement domain is empty (covering regime)")]
    EmptyDomain,
    #[error("E1 = {e1} is not below the finite-volume threshold estimate {threshold}")]
    E1AboveThreshold { e1: f64, threshold: f64 },
    #[error("no curve point satisfies E0(s) >= E1")]
    EmptyFeasibleSet,
    #[error("ground-energy curve decreased at t = {t}: solver failure suspected")]
    NonMonotoneResult { t: f64 },
    #[error("scaling fit needs at least {needed} usable points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("all estimates are zero; nothing to fit on a log scale")]
    AllZeroEstimates,
    #[error("missing parameter for theoretical bound: {0}")]
    MissingParameter(&'static str),
    #[error("config invalid at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("probe energy {probe} lies within the unresolved band around the threshold {threshold}")]
    ProbeTooCloseToThreshold { probe: f64, threshold: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
