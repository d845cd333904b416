//! Koopman eigenfunctions of polynomial vector fields built from invariant
//! manifolds, with exact verification and closed-form planar solutions.

pub mod algebra;
pub mod cli;
pub mod eigen;
pub mod koopman1d;
pub mod koopman2d;
pub mod sysparse;
pub mod manifold;
pub mod numerics;
