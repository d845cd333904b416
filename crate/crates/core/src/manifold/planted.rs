//! Vector fields built to carry prescribed invariant manifolds.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::linalg::{nullspace, solve};
use crate::algebra::monomial::monomials_up_to;
use crate::algebra::{AlgebraError, Coefficient, Matrix, Monomial, Polynomial, VectorField};

use super::{lie_derivative, ManifoldError};

/// Random field of degree at most `deg_f` with `Lie(M_i) = M_i*N_i` for all i.
///
/// The unknown coefficients of `F` solve a linear system; the result is a
/// particular solution plus a seeded integer combination (entries in
/// `[-3, 3]`) of the homogeneous solutions.
pub fn generate_planted(
    ms: &[Polynomial],
    ns: &[Polynomial],
    deg_f: u32,
    seed: u64,
) -> Result<VectorField, ManifoldError> {
    if ms.len() != ns.len() {
        return Err(ManifoldError::Invalid(format!("{} manifolds but {} cofactors", ms.len(), ns.len())));
    }
    let Some(first) = ms.first() else {
        return Err(ManifoldError::Invalid("no manifolds to plant".into()));
    };
    let vars = first.vars().clone();
    let dim = vars.len();
    if dim != 2 {
        return Err(ManifoldError::Dimension(dim));
    }
    for p in ms.iter().chain(ns) {
        first.check_vars(p)?;
    }
    let basis = monomials_up_to(dim, deg_f);
    let unknowns = dim * basis.len();
    let mut rows: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, Coefficient)> = Vec::new();
    let mut rhs_terms: Vec<(usize, Coefficient)> = Vec::new();
    let row_of = |key: (usize, Monomial), rows: &mut BTreeMap<(usize, Monomial), usize>| {
        let n = rows.len();
        *rows.entry(key).or_insert(n)
    };
    for (i, (m, n)) in ms.iter().zip(ns).enumerate() {
        for j in 0..dim {
            let d = m.partial(j);
            for (k, mono) in basis.iter().enumerate() {
                for (dm, c) in d.terms() {
                    let r = row_of((i, dm.mul(mono)), &mut rows);
                    entries.push((r, j * basis.len() + k, c.clone()));
                }
            }
        }
        for (mono, c) in (m * n).terms() {
            let r = row_of((i, mono.clone()), &mut rows);
            rhs_terms.push((r, c.clone()));
        }
    }
    let nrows = rows.len();
    let mut mat = Matrix::zeros(nrows, unknowns);
    for (r, c, v) in entries {
        let cur = &mat[(r, c)] + &v;
        mat[(r, c)] = cur;
    }
    let mut rhs = vec![Coefficient::zero(); nrows];
    for (r, v) in rhs_terms {
        rhs[r] = &rhs[r] + &v;
    }
    let mut sol = match solve(&mat, &rhs) {
        Ok(s) => s,
        Err(AlgebraError::Inconsistent) => return Err(ManifoldError::Infeasible),
        Err(e) => return Err(e.into()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in nullspace(&mat) {
        let w = Coefficient::from_int(rng.gen_range(-3..=3));
        for (s, b) in sol.iter_mut().zip(&v) {
            *s = &*s + &(&w * b);
        }
    }
    let comps: Vec<Polynomial> = (0..dim)
        .map(|j| {
            Polynomial::from_terms(
                &vars,
                basis.iter().enumerate().map(|(k, mono)| (mono.clone(), sol[j * basis.len() + k].clone())),
            )
        })
        .collect();
    let field = VectorField::new(comps)?;
    for (m, n) in ms.iter().zip(ns) {
        if !lie_derivative(m, &field)?.try_sub(&m.try_mul(n)?)?.is_zero() {
            return Err(ManifoldError::Invalid("planted field failed exact verification".into()));
        }
    }
    Ok(field)
}
