use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chemical potential {mu} lies outside the band (-2η, 2η) with η = {hopping}")]
    OutOfBand { mu: f64, hopping: f64 },

    #[error("momentum k = 0 belongs to neither reservoir")]
    UndefinedSide,

    #[error("site {site} lies inside the impurity region |m| <= {halfwidth}")]
    InsideImpurity { site: i64, halfwidth: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scattering matrix invariant violated at k = {k}: {detail}")]
    ScatteringInvariant { k: f64, detail: String },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigen-decomposition failed: {0}")]
    Eigensolver(String),

    #[error("matrix is singular or numerically singular: {0}")]
    Singular(String),

    #[error("correlation spectrum leaves [0, 1] by {excursion:e}")]
    SpectrumOutOfRange { excursion: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("eigenvalue {re} + {im}i on the negative real axis; logarithm branch undefined")]
    NegativeEigenvalue { re: f64, im: f64 },

    #[error("symbol determinant vanishes near k = {k}; logarithm winding undefined")]
    Winding { k: f64 },

    #[error("condition number {cond:e} exceeds {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
