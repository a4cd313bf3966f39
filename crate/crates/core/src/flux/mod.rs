//! Broken flux fields, gradient averaging, the Raviart–Thomas corrector space
//! and the constrained minimization producing an admissible flux.

mod corrector;
mod field;
mod space;

pub use corrector::{
    assemble_corrector_system, corrected_flux, improve_corrector_locally, solve_corrector, ConstraintSet,
    CorrectorSolution, CorrectorWeights,
};
pub use field::{
    average_gradient, average_gradient_on, constraint_residuals, BrokenFluxField, ConstraintResiduals,
};
pub use space::{CoefficientEntry, CorrectorSpace, DofInfo, DofKind};
