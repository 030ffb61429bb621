use thiserror::Error;

use crate::extremal::LpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radicand {0} is not a square-free integer >= 2")]
    InvalidRadicand(u32),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("point has a zero coordinate at index {0}")]
    ZeroCoordinate(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rational points are not dense in the body")]
    NotRationallyDense,
    #[error("vertex {0} of the body has no preimage under the lattice map")]
    NoPreimage(usize),
    #[error("preimage of vertex {0} has a negative coordinate")]
    NegativePreimage(usize),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("generators have irrational coordinates")]
    IrrationalGenerators,
    #[error("lattice map is not injective or its kernel rows are inconsistent: {0}")]
    InvalidLatticeMap(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("exponent {0:?} leaves the nonnegative orthant")]
    NegativeExponent(Vec<i64>),
    #[error("exponent {0:?} is not in the dilate of the body")]
    OutsideGrading(Vec<u64>),
    #[error("polynomials are graded by different bodies")]
    BodyMismatch,
    #[error("invalid sample set: {0}")]
    InvalidSamples(String),
    #[error("oracle not applicable: {0}")]
    OracleDomain(String),
    #[error("linear program ended with status {0:?}")]
    Lp(LpStatus),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of a numerical computation, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Lp(_) | Error::Certificate(_))
    }

    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidRadicand(_) => "invalid_radicand",
            Error::Shape(_) => "shape",
            Error::InvalidBody(_) => "invalid_body",
            Error::ZeroCoordinate(_) => "zero_coordinate",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotRationallyDense => "not_rationally_dense",
            Error::NoPreimage(_) => "no_preimage",
            Error::NegativePreimage(_) => "negative_preimage",
            Error::DependentGenerators => "dependent_generators",
            Error::IrrationalGenerators => "irrational_generators",
            Error::InvalidLatticeMap(_) => "invalid_lattice_map",
            Error::Certificate(_) => "certificate",
            Error::NegativeExponent(_) => "negative_exponent",
            Error::OutsideGrading(_) => "outside_grading",
            Error::BodyMismatch => "body_mismatch",
            Error::InvalidSamples(_) => "invalid_samples",
            Error::OracleDomain(_) => "oracle_domain",
            Error::Lp(_) => "lp_status",
            Error::Parse(_) => "parse",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
