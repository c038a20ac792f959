use thiserror::Error;

use crate::tensor::Tensor2;

/// Errors raised by the solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular tensor: |det| = {det:e} <= tolerance {tol:e}")]
    SingularTensor { det: f64, tol: f64 },

    #[error("memory function is singular at s = 0; use the age-grid quadrature")]
    SingularPoint,

    #[error("kernel tail mass {tail:e} still above {tail_tol:e} at the age cap s = {s_cap}")]
    NoDecay { tail: f64, tail_tol: f64, s_cap: f64 },

    #[error("age-grid mass {mass} deviates from 1 by more than {quad_tol:e}")]
    QuadratureMass { mass: f64, quad_tol: f64 },

    #[error("sample count {samples} does not match age-node count {nodes}")]
    GridMismatch { samples: usize, nodes: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid strain measure: {0}")]
    InvalidMeasure(String),

    #[error("negative radicand {value:e} in the Wagner damping function")]
    NegativeRadicand { value: f64 },

    #[error("{what} bound violated (ratio {ratio}) at witness {witness:?}")]
    BoundViolated {
        what: String,
        ratio: f64,
        witness: Option<Tensor2>,
    },

    #[error("strain measure has no declared growth bounds")]
    MissingGrowth,

    #[error("CFL violation: dt = {dt:e} exceeds the limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("{source} (cell {cell}, age node {age})")]
    AtLocation {
        cell: usize,
        age: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid flow: {0}")]
    InvalidFlow(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("geometry unsupported by the stationary solver: {0}")]
    GeometryUnsupported(String),

    #[error("stationary problem inadmissible: {0}")]
    Inadmissible(String),

    #[error("stress integral diverges: growth exponent {growth:.6} >= decay rate {decay:.6}")]
    Divergent { growth: f64, decay: f64 },

    #[error("fixed point not converged after {iterations} iterations (last contraction factor {contraction:.4})")]
    NotConverged { iterations: usize, contraction: f64 },

    #[error("run aborted at t = {t}: {reason}")]
    Aborted { reason: String, t: f64, step: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at(self, cell: usize, age: usize) -> Error {
        Error::AtLocation {
            cell,
            age,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
