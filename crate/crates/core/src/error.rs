use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is off the unit-modulus manifold: max ||v_l| - 1| = {deviation:e}")]
    OffManifold { deviation: f64 },

    #[error("degenerate retraction: |v_l + step_l| = {modulus:e} at element {index}")]
    DegenerateRetraction { index: usize, modulus: f64 },

    #[error("rank guard: smallest/largest singular value {ratio:e} below {threshold:e}")]
    RankDeficient { ratio: f64, threshold: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("phase subproblem undefined without RIS elements (L = 0)")]
    NoRis,

    #[error("interference-plus-noise covariance of pair {pair} is numerically singular (min eigen proxy {diag:e})")]
    SingularCovariance { pair: usize, diag: f64 },

    #[error("solution is not feasible; rate is undefined")]
    Infeasible,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
