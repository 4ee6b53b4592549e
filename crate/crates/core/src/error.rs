use thiserror::Error;

use crate::HalfInt;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid half-integer `{0}`")]
    ParseHalfInt(String),

    #[error("invalid spin label: j = {j}, m = {m}")]
    InvalidLabel { j: HalfInt, m: HalfInt },

    #[error("negative total spin {0}")]
    NegativeSpin(HalfInt),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("state is empty")]
    EmptyState,

    #[error("group parameters are not on the unit sphere (|u|²+|v|² = {0})")]
    NotUnitary(f64),

    #[error("single irrep required, found irreps {}", list(.0))]
    MultipleIrreps(Vec<HalfInt>),

    #[error("vector is not a unit vector (norm = {0})")]
    NotUnitVector(f64),

    #[error("matrix is not a proper rotation")]
    NotRotation,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("channel normalization violated for input irrep j = {j}: sum = {sum}, expected {expected}")]
    ChannelNormalization { j: HalfInt, sum: f64, expected: f64 },

    #[error("probability sequence is invalid: {0}")]
    ProbSeq(String),

    #[error("hypergeometric closed form is singular at u = 0")]
    SingularClosedForm,

    #[error("truncation K = {0} too small: ratio tail is not monotone")]
    TruncationTooSmall(i64),

    #[error("Fock cutoff {cutoff} too small: norm deficit {deficit:.3e}")]
    CutoffTooSmall { cutoff: usize, deficit: f64 },

    #[error("phase uncertainty diverges: derivative of the mean vanishes")]
    DivergentUncertainty,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn list(js: &[HalfInt]) -> String {
    js.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", ")
}
