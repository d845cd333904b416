//! Invariant manifolds: exact verification, fixed points and discovery.

pub mod ansatz;
pub mod fixed;
pub mod planted;
pub mod rational;
pub mod seed;

pub use ansatz::{discover_ansatz, AnsatzOptions};
pub use fixed::{fixed_points, fixed_points_in, FixedPoint};
pub use planted::generate_planted;
pub use rational::{rationalize, rationalize_complex, DEFAULT_DEN_BOUND};
pub use seed::seed_linear_candidates;

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, Polynomial, VectorField};
use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifoldError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("manifold function is constant")]
    ConstantManifold,
    #[error("non-isolated fixed points (resultant vanishes identically)")]
    NonIsolated,
    #[error("no vector field satisfies the planted conditions")]
    Infeasible,
    #[error("only 1D and 2D systems are supported, got dimension {0}")]
    Dimension(usize),
    #[error("{0}")]
    Invalid(String),
}

/// How a manifold entered the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    UserSupplied,
    EigenvectorSeeded,
    AnsatzDiscovered,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::UserSupplied => "user-supplied",
            Provenance::EigenvectorSeeded => "eigenvector-seeded",
            Provenance::AnsatzDiscovered => "ansatz-discovered",
        })
    }
}

/// A verified invariant manifold `M` with cofactor `N`: `Lie(M) = M*N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldPair {
    m: Polynomial,
    n: Polynomial,
    provenance: Provenance,
}

impl ManifoldPair {
    /// Verify `m` against `field` and store its canonical associate.
    /// Returns `Ok(None)` when `m` is not invariant.
    pub fn verify(m: &Polynomial, field: &VectorField, provenance: Provenance) -> Result<Option<Self>, ManifoldError> {
        let m = m.canonical();
        Ok(cofactor(&m, field)?.map(|n| ManifoldPair { m, n, provenance }))
    }

    pub fn m(&self) -> &Polynomial {
        &self.m
    }

    pub fn n(&self) -> &Polynomial {
        &self.n
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Re-check `Lie(M) - M*N == 0` exactly.
    pub fn check(&self, field: &VectorField) -> Result<bool, ManifoldError> {
        let lie = lie_derivative(&self.m, field)?;
        Ok(lie.try_sub(&self.m.try_mul(&self.n)?)?.is_zero())
    }
}

/// `sum_i dM/dx_i * F_i`.
pub fn lie_derivative(m: &Polynomial, field: &VectorField) -> Result<Polynomial, ManifoldError> {
    if m.nvars() != field.dim() {
        return Err(AlgebraError::Dimension { expected: field.dim(), got: m.nvars() }.into());
    }
    let mut out = Polynomial::zero(field.vars());
    for (i, f) in field.components().iter().enumerate() {
        let d = m.partial(i);
        if !d.is_zero() {
            out = out.try_add(&d.try_mul(f)?)?;
        }
    }
    Ok(out)
}

/// The cofactor `N = Lie(M)/M`, or `None` when the division is not exact.
pub fn cofactor(m: &Polynomial, field: &VectorField) -> Result<Option<Polynomial>, ManifoldError> {
    if m.is_constant() {
        return Err(ManifoldError::ConstantManifold);
    }
    let lie = lie_derivative(m, field)?;
    Ok(lie.divide_exact(m)?)
}

/// Drop associates and any manifold divisible by a lower-degree one already
/// kept. The input order decides which provenance survives.
pub fn dedup_pairs(pairs: Vec<ManifoldPair>) -> Vec<ManifoldPair> {
    let mut sorted = pairs;
    sorted.sort_by_key(|p| p.m.degree());
    let mut kept: Vec<ManifoldPair> = Vec::new();
    'outer: for p in sorted {
        for k in &kept {
            if k.m == p.m {
                continue 'outer;
            }
            if k.m.degree() < p.m.degree() && matches!(p.m.divide_exact(&k.m), Ok(Some(_))) {
                continue 'outer;
            }
        }
        kept.push(p);
    }
    kept
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::Vars;
    use crate::sysparse::parse_polynomial;

    pub fn field(vars: &Vars, comps: &[&str]) -> VectorField {
        VectorField::new(comps.iter().map(|c| parse_polynomial(c, vars, None).unwrap()).collect()).unwrap()
    }

    pub fn poly(vars: &Vars, s: &str) -> Polynomial {
        parse_polynomial(s, vars, None).unwrap()
    }

    fn xy() -> Vars {
        crate::algebra::vars_from(&["x", "y"])
    }

    #[test]
    fn lie_examples() {
        let v = xy();
        let f = field(&v, &["x - y", "-2*x"]);
        assert_eq!(lie_derivative(&poly(&v, "y + x"), &f).unwrap(), poly(&v, "-x - y"));
        assert!(lie_derivative(&poly(&v, "1"), &f).unwrap().is_zero());
        let f = field(&v, &["x - x*y", "-y + x^2 - 2*y^2"]);
        let m = poly(&v, "x^2 - 3*y");
        assert_eq!(lie_derivative(&m, &f).unwrap(), &m * &poly(&v, "-1 - 2*y"));
    }

    #[test]
    fn cofactor_examples() {
        let v = xy();
        let f = field(&v, &["x*y", "y^2 - x - 1"]);
        assert_eq!(cofactor(&poly(&v, "x"), &f).unwrap(), Some(poly(&v, "y")));
        assert_eq!(cofactor(&poly(&v, "y - x - 1"), &f).unwrap(), Some(poly(&v, "y + 1")));
        assert_eq!(cofactor(&poly(&v, "y + x + 1"), &f).unwrap(), Some(poly(&v, "y - 1")));
        assert_eq!(cofactor(&poly(&v, "x + y"), &f).unwrap(), None);
        assert_eq!(cofactor(&poly(&v, "3"), &f), Err(ManifoldError::ConstantManifold));
        assert_eq!(cofactor(&poly(&v, "0"), &f), Err(ManifoldError::ConstantManifold));
    }

    #[test]
    fn observation_products() {
        let v = xy();
        let f = field(&v, &["x*y", "y^2 - x - 1"]);
        let m1 = poly(&v, "x");
        let m2 = poly(&v, "y - x - 1");
        let n = cofactor(&(&m1 * &m2), &f).unwrap().unwrap();
        assert_eq!(n, poly(&v, "2*y + 1"));
    }

    #[test]
    fn dedup_drops_products() {
        let v = xy();
        let f = field(&v, &["x*y", "y^2 - x - 1"]);
        let pairs: Vec<ManifoldPair> = ["x^2 - x*y + x", "x", "-2*x"]
            .iter()
            .filter_map(|s| ManifoldPair::verify(&poly(&v, s), &f, Provenance::UserSupplied).unwrap())
            .collect();
        assert_eq!(pairs.len(), 3);
        let d = dedup_pairs(pairs);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].m(), &poly(&v, "x"));
    }
}
