//! Numerical oracle for the signaling integrals.
//!
//! [`integrate`] is a general adaptive Gauss–Kronrod routine; the `s2`
//! functions evaluate the defining double integrals of `S₂` directly from the
//! commutator kernels, independently of the closed forms.

mod gauss_kronrod;
mod s2;

pub use gauss_kronrod::{integrate, EvalBudget, QuadratureResult, Tolerance, PANEL_EVALUATIONS};
pub use s2::{integrate_s2_local, integrate_s2_nonlocal, MIN_TOLERANCE, S2_EVALUATION_BUDGET};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("evaluation budget exhausted after {evaluations} calls (best {best:e} ± {error:e})")]
    BudgetExceeded {
        best: f64,
        error: f64,
        evaluations: usize,
    },
    #[error("no convergence: best {best:e} ± {error:e}")]
    NonConvergence { best: f64, error: f64 },
    #[error("tolerance {0:e} outside the supported range")]
    InvalidTolerance(f64),
}
