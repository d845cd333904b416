//! Exact scalars, polynomials, rational functions and linear algebra.

pub mod coeff;
pub mod gcd;
pub mod linalg;
pub mod monomial;
pub mod poly;
pub mod ratfunc;

pub use coeff::{Coefficient, Field, QuadNumber};
pub use linalg::Matrix;
pub use monomial::Monomial;
pub use poly::{vars_from, Polynomial, Vars};
pub use ratfunc::RationalFunction;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    ZeroDivisor,
    #[error("cannot mix coefficient fields {a} and {b}")]
    MixedFields { a: String, b: String },
    #[error("operation needs exact coefficients")]
    NotExact,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("evaluation at a pole")]
    Pole,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

impl AlgebraError {
    pub fn mixed(a: Field, b: Field) -> Self {
        AlgebraError::MixedFields { a: a.to_string(), b: b.to_string() }
    }
}

/// Polynomial vector field `dx/dt = F(x)` over a shared variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, AlgebraError> {
        let Some(first) = components.first() else {
            return Err(AlgebraError::Dimension { expected: 1, got: 0 });
        };
        if first.nvars() != components.len() {
            return Err(AlgebraError::Dimension { expected: first.nvars(), got: components.len() });
        }
        for c in &components[1..] {
            first.check_vars(c)?;
        }
        Ok(VectorField { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn vars(&self) -> &Vars {
        self.components[0].vars()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    /// The single exact field of all components, `None` if any is float.
    pub fn field(&self) -> Result<Option<Field>, AlgebraError> {
        let mut f = Field::Rational;
        for c in &self.components {
            match c.field()? {
                None => return Ok(None),
                Some(g) => f = f.join(g).ok_or_else(|| AlgebraError::mixed(f, g))?,
            }
        }
        Ok(Some(f))
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_f64(x)).collect()
    }

    /// Jacobian entries `dF_i/dx_j`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| (0..self.dim()).map(|j| c.partial(j)).collect())
            .collect()
    }
}
