use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("orthonormal coframe is not rational: {0}")]
    IrrationalCoframe(String),

    #[error("singular matrix")]
    Singular,

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("Jacobi identity fails on (e{}, e{}, e{})", .0 + 1, .1 + 1, .2 + 1)]
    Jacobi(usize, usize, usize),

    #[error("form degree {degree} too large for dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("2-form is degenerate (omega wedge omega = 0)")]
    DegenerateForm,

    #[error("2-form is not self-dual for the stored orientation")]
    OrientationMismatch,

    #[error("zero vector has no holomorphic sectional curvature")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("constraint system is not finitely solvable: {0}")]
    Underdetermined(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::OutOfRange { .. } => "out_of_range",
            Error::NotPositiveDefinite(_) => "not_positive_definite",
            Error::IrrationalCoframe(_) => "irrational_coframe",
            Error::Singular => "singular",
            Error::InvalidAlgebra(_) => "invalid_algebra",
            Error::Jacobi(..) => "jacobi",
            Error::DegreeOverflow { .. } => "degree_overflow",
            Error::DegenerateForm => "degenerate_form",
            Error::OrientationMismatch => "orientation_mismatch",
            Error::ZeroVector => "zero_vector",
            Error::Parameter(_) => "parameter",
            Error::Parse(_) => "parse",
            Error::Underdetermined(_) => "underdetermined",
        }
    }
}
