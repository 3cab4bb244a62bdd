use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("duplicate vertex {vertex} in simplex {simplex}")]
    DuplicateVertex { vertex: String, simplex: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("unknown simplex {0}")]
    UnknownSimplex(String),

    #[error("empty complex")]
    EmptyComplex,

    #[error("invalid stratification: {0}")]
    Stratification(String),

    #[error("open strata are not dense (union of X^m misses {0})")]
    Density(String),

    #[error("closure mismatch: {0}")]
    Closure(String),

    #[error("domain mismatch: {0}")]
    Domain(String),

    #[error("local system: {0}")]
    LocalSystem(String),

    #[error("complex is not clc with respect to the stratification: {0}")]
    NotClc(String),

    #[error("locus of odd real dimension {dim} in degree {degree}: input is not clc")]
    OddLocus { degree: i32, dim: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
