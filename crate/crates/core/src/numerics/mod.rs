//! Integrator, root finders and small numeric linear algebra.

pub mod eig;
pub mod newton;
pub mod resultant;
pub mod rk45;
pub mod roots;

pub use eig::{eig2x2_exact, eig2x2_numeric, Eig2Exact, Eig2Numeric};
pub use newton::newton_polish;
pub use resultant::sylvester_resultant;
pub use rk45::{rk45, rk45_field, IntegratorConfig, Termination, Trajectory};
pub use roots::roots_univariate_numeric;

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("invalid integrator configuration: {0}")]
    BadConfig(String),
    #[error("initial state is not finite")]
    NonFinite,
    #[error("vector field has non-real coefficients")]
    NonReal,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("Jacobian singular at iterate")]
    SingularJacobian,
    #[error("Newton did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error(transparent)]
    Algebra(AlgebraError),
}
