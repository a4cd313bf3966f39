//! Solver kernels: sparse SPD systems through preconditioned conjugate
//! gradients or an envelope Cholesky factorization, symmetric indefinite (KKT)
//! systems through a Bunch–Kaufman factorization or a Schur complement on the
//! constraint block.

mod cg;
mod cholesky;
mod dense;
mod saddle;
mod sparse;

pub use cg::{spd_solve, spd_solve_with_guess, CgOutcome};
pub use cholesky::{rcm_ordering, EnvelopeCholesky};
pub use dense::{DenseMatrix, LdltFactor};
pub use saddle::{saddle_solve, SaddleSolution, SaddleSystem, SparseRow, DENSE_KKT_LIMIT};
pub use sparse::{CsrMatrix, TripletBuilder};

/// Default relative residual for SPD solves.
pub const DEFAULT_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    crate::geometry::sqrt(dot(a, a))
}
