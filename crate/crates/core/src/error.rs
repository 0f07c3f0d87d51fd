use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate metric at (u, v) = ({u}, {v}): EG - F^2 = {det:e}, EG = {eg:e}")]
    DegenerateMetric { u: f64, v: f64, det: f64, eg: f64 },

    #[error("root bracket failure: target {target} not reached before t = {limit:e}")]
    BracketFailure { target: f64, limit: f64 },

    #[error("genus detection failed: total curvature / 2pi = {raw_chi} is not within {tolerance} of an even integer <= 2")]
    GenusDetectionFailure { raw_chi: f64, tolerance: f64 },

    #[error("immersion failure at (u, v) = ({u}, {v}): {reason}")]
    ImmersionFailure { u: f64, v: f64, reason: String },

    #[error("inequality chain violated at link `{link}`: {lhs} > {rhs}")]
    ChainViolation { link: String, lhs: f64, rhs: f64 },

    #[error("surface is not minimal: max |H| = {max_h:e}")]
    NotMinimal { max_h: f64 },

    #[error("no closed-form spectral data for surface `{0}`")]
    NoSpectralData(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("row {row} lies off the unit sphere: |x| = {norm}")]
    OffSphere { row: usize, norm: f64 },

    #[error("resolution {n} too coarse along a periodic direction (minimum {min})")]
    ResolutionTooCoarse { n: usize, min: usize },

    #[error("parameter ({u}, {v}) is not a node of the sampled grid")]
    OffGrid { u: f64, v: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
