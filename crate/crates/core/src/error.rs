use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid mesh spacing {h}: 1/h must be a positive integer")]
    InvalidSpacing { h: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate triangle {triangle} (signed area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("constraint block is rank deficient; dependent constraints {indices:?}")]
    RankDeficient { indices: Vec<usize> },

    #[error("symmetric indefinite factorization broke down at pivot {pivot}")]
    SingularPivot { pivot: usize },

    #[error("coarse mesh fails the compatibility condition (deficit {deficit})")]
    Incompatible { deficit: i64 },

    #[error("problem has no exact solution attached")]
    MissingExactSolution,

    #[error("flux is not normal-conforming: jump {jump:e} on edge {edge} at ({x}, {y})")]
    NonConformingFlux { edge: usize, jump: f64, x: f64, y: f64 },

    #[error("efficiency index undefined for a zero error")]
    ZeroError,

    #[error("decomposition violates the overlap condition at interface ({k}, {j})")]
    OverlapCondition { k: usize, j: usize },
}
