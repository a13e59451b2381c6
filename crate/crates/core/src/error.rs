use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("evaluation point coincides with an eigenvalue at phase {phase}")]
    Singularity { phase: f64 },

    #[error("covariance factorization failed after ridge levels {ridges:?}")]
    Factorization { ridges: Vec<f64> },

    #[error("invalid bias: {0}")]
    InvalidBias(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerator roots {i} and {j} coincide; the residue formula is singular")]
    RootCoincidence { i: usize, j: usize },

    #[error("exponential moment overflow: {0}")]
    Overflow(String),

    #[error("quadrature not resolved: doubling difference {diff:e} exceeds {tol:e}")]
    Quadrature { diff: f64, tol: f64 },

    #[error("truncation K={k} too small for tolerance {tol:e} at radius {radius}")]
    Truncation { k: usize, tol: f64, radius: f64 },

    #[error("anchor point missing for sector {sector}")]
    MissingAnchor { sector: usize },

    #[error("unknown {kind} '{name}'")]
    UnknownStrategy { kind: &'static str, name: String },
}
