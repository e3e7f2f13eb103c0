use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },

    #[error("non-numeric cell at row {row}, column `{column}`: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("no rows left after removing invalid values")]
    EmptyResult,

    #[error("well `{0}` has fewer than two rows and cannot be resampled")]
    SingleRowWell(String),

    #[error("missing value in column `{column}` at row {row}")]
    MissingValue { row: usize, column: String },

    #[error("unknown well `{0}`")]
    UnknownWell(String),

    #[error("no minority (LOW) rows outside test well `{0}`")]
    NoMinorityTrainingData(String),

    #[error("row set is empty")]
    EmptyRowSet,

    #[error("input is empty")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cost C={cost} is infeasible for {n} training points (needs C >= 1/n)")]
    InfeasibleCost { cost: f64, n: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("solver did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    NonConvergence { iterations: usize, violation: f64 },

    #[error("oracle supports at most {max} points, got {n}")]
    OracleScaleExceeded { n: usize, max: usize },

    #[error("input contains a single class")]
    SingleClassInput,

    #[error("every feature is constant")]
    ConstantAllFeatures,

    #[error("k={k} is out of range 1..={d}")]
    InvalidK { k: usize, d: usize },

    #[error("pooled covariance is singular")]
    SingularCovariance,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("class accuracy undefined: no true {0} rows")]
    UndefinedClassAccuracy(&'static str),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
