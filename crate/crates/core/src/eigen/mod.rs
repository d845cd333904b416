//! Eigenvalue/eigenfunction pairs as power products of invariant manifolds.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::linalg::{canonical_vector, nullspace, rank};
use crate::algebra::{AlgebraError, Coefficient, Matrix, Monomial, Polynomial, RationalFunction, VectorField};
use crate::manifold::{lie_derivative, ManifoldError, ManifoldPair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error("no manifold pairs given")]
    Empty,
    #[error("weight vector has {got} entries for {expected} manifolds")]
    Length { expected: usize, got: usize },
    #[error("weighted cofactor sum is not constant: {0}")]
    NotConstant(String),
    #[error("eigenpairs are built on different manifold lists")]
    DifferentBasis,
}

/// Exponents `p_i`, one per manifold pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(pub Vec<Coefficient>);

impl WeightVector {
    pub fn entries(&self) -> &[Coefficient] {
        &self.0
    }

    /// Smallest integer representative with positive first nonzero entry.
    pub fn canonical(&self) -> WeightVector {
        WeightVector(canonical_vector(&self.0))
    }

    pub fn neg(&self) -> WeightVector {
        WeightVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn all_integer(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().map(|c| c.abs_f64()).sum()
    }
}

fn coeff_cmp(a: &Coefficient, b: &Coefficient) -> Ordering {
    let (za, zb) = (a.to_complex(), b.to_complex());
    za.re
        .total_cmp(&zb.re)
        .then(za.im.total_cmp(&zb.im))
        .then_with(|| a.to_string().cmp(&b.to_string()))
}

/// Entrywise numeric order.
impl Ord for WeightVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match coeff_cmp(a, b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for WeightVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// `phi = prod M_i^{p_i}` with `Lie(phi) = lambda * phi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub lambda: Coefficient,
    pub weight: WeightVector,
    /// The full manifold list the weight refers to.
    pub pairs: Vec<ManifoldPair>,
}

impl EigenPair {
    /// Factors with nonzero exponent.
    pub fn factors(&self) -> impl Iterator<Item = (&ManifoldPair, &Coefficient)> {
        self.pairs.iter().zip(&self.weight.0).filter(|(_, p)| !p.is_zero())
    }

    /// `phi` as a rational function when every exponent is an integer.
    pub fn phi(&self) -> Option<RationalFunction> {
        if !self.weight.all_integer() {
            return None;
        }
        let vars = self.pairs[0].m().vars();
        let mut num = Polynomial::one(vars);
        let mut den = Polynomial::one(vars);
        for (pair, p) in self.factors() {
            let e = p.as_i64()?;
            let pw = pair.m().pow(e.unsigned_abs() as u32);
            if e > 0 {
                num = &num * &pw;
            } else {
                den = &den * &pw;
            }
        }
        RationalFunction::new(num, den).ok()
    }

    /// `phi(x)` in floating point; `NaN` where a fractional power of a
    /// negative base is needed.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.factors().fold(1.0, |acc, (pair, p)| {
            let base = pair.m().eval_f64(x);
            acc * match p.as_i64() {
                Some(e) => base.powi(e as i32),
                None => base.powf(p.to_f64().unwrap_or(f64::NAN)),
            }
        })
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap_or(f64::NAN)
    }

    /// Power-product text, e.g. `(x)^2 * (y - 1)^(-1)`; rational form when
    /// every exponent is an integer.
    pub fn phi_string(&self) -> String {
        if let Some(r) = self.phi() {
            return r.to_string_cleared();
        }
        let parts: Vec<String> = self
            .factors()
            .map(|(pair, p)| if p.is_one() { format!("({})", pair.m()) } else { format!("({})^({p})", pair.m()) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" * ")
        }
    }

    fn same_basis(&self, other: &EigenPair) -> bool {
        self.pairs.len() == other.pairs.len() && self.pairs.iter().zip(&other.pairs).all(|(a, b)| a.m() == b.m())
    }
}

impl fmt::Display for EigenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda = {}, phi = {}, p = {}", self.lambda, self.phi_string(), self.weight)
    }
}

fn nonconstant_rows(pairs: &[ManifoldPair]) -> Matrix {
    let mons: BTreeSet<Monomial> =
        pairs.iter().flat_map(|p| p.n().terms().map(|(m, _)| m.clone())).filter(|m| !m.is_one()).collect();
    let rows: Vec<Vec<Coefficient>> = mons.iter().map(|m| pairs.iter().map(|p| p.n().coeff(m)).collect()).collect();
    if rows.is_empty() {
        Matrix::zeros(0, pairs.len())
    } else {
        Matrix::from_rows(rows)
    }
}

/// Canonical basis of all weights making `sum p_i N_i` constant.
pub fn constant_combinations(pairs: &[ManifoldPair]) -> Result<Vec<WeightVector>, EigenError> {
    if pairs.is_empty() {
        return Err(EigenError::Empty);
    }
    Ok(nullspace(&nonconstant_rows(pairs)).into_iter().map(WeightVector).collect())
}

/// `sum p_i N_i`.
fn weighted_cofactor(pairs: &[ManifoldPair], w: &WeightVector) -> Result<Polynomial, EigenError> {
    if w.0.len() != pairs.len() {
        return Err(EigenError::Length { expected: pairs.len(), got: w.0.len() });
    }
    let mut acc = Polynomial::zero(pairs[0].m().vars());
    for (pair, p) in pairs.iter().zip(&w.0) {
        if !p.is_zero() {
            acc = acc.try_add(&pair.n().scale(p))?;
        }
    }
    Ok(acc)
}

pub fn build_eigenpair(pairs: &[ManifoldPair], w: &WeightVector) -> Result<EigenPair, EigenError> {
    if pairs.is_empty() {
        return Err(EigenError::Empty);
    }
    let sum = weighted_cofactor(pairs, w)?;
    if !sum.is_constant() {
        return Err(EigenError::NotConstant(sum.to_string()));
    }
    Ok(EigenPair { lambda: sum.constant_term(), weight: w.clone(), pairs: pairs.to_vec() })
}

/// One eigenpair per equivalence class among small integer combinations of
/// the constant-combination basis (coefficients in `[-2, 2]`, or `[-1, 1]`
/// for more than four basis vectors; the basis alone beyond eight).
pub fn eigen_candidates(pairs: &[ManifoldPair]) -> Result<Vec<EigenPair>, EigenError> {
    let basis = constant_combinations(pairs)?;
    let b = basis.len();
    let range: i64 = if b <= 4 { 2 } else { 1 };
    let mut classes: BTreeSet<WeightVector> = BTreeSet::new();
    if b > 8 {
        classes.extend(basis.iter().map(|w| w.canonical()));
    } else if b > 0 {
        let width = (2 * range + 1) as usize;
        let total = width.pow(b as u32);
        for code in 0..total {
            let mut c = code;
            let mut w = vec![Coefficient::zero(); pairs.len()];
            for v in &basis {
                let k = (c % width) as i64 - range;
                c /= width;
                if k != 0 {
                    let kc = Coefficient::from_int(k);
                    for (slot, e) in w.iter_mut().zip(&v.0) {
                        *slot = &*slot + &(&kc * e);
                    }
                }
            }
            let w = WeightVector(w);
            if !w.is_zero() {
                classes.insert(w.canonical());
            }
        }
    }
    classes.iter().map(|w| build_eigenpair(pairs, w)).collect()
}

fn weights_rank(a: &WeightVector, b: &WeightVector) -> usize {
    rank(&Matrix::from_rows(vec![a.0.clone(), b.0.clone()]))
}

fn shared_positive(a: &WeightVector, b: &WeightVector) -> usize {
    a.0.iter().zip(&b.0).filter(|(x, y)| x.signum() > 0 && y.signum() > 0).count()
}

fn negate(e: &EigenPair) -> EigenPair {
    EigenPair { lambda: -&e.lambda, weight: e.weight.neg(), pairs: e.pairs.clone() }
}

/// Sign choice for a selected pair: the orientation with the most indices
/// where both weights are positive; ties keep the fewest flips.
fn orient(a: &EigenPair, b: &EigenPair) -> (EigenPair, EigenPair) {
    let options = [
        (a.clone(), b.clone()),
        (a.clone(), negate(b)),
        (negate(a), b.clone()),
        (negate(a), negate(b)),
    ];
    let best = options
        .iter()
        .enumerate()
        .max_by_key(|(i, (x, y))| (shared_positive(&x.weight, &y.weight), usize::MAX - i))
        .map(|(_, o)| o.clone())
        .expect("four options");
    // larger eigenvalue first
    if best.1.lambda_f64() > best.0.lambda_f64() {
        (best.1, best.0)
    } else {
        best
    }
}

/// `(k*lambda, phi^k)` with `k*p` the canonical weight, so that scaled
/// members of one class rank identically.
fn canonical_representative(e: &EigenPair) -> EigenPair {
    let weight = e.weight.canonical();
    let k = e
        .weight
        .0
        .iter()
        .zip(&weight.0)
        .find(|(w, _)| !w.is_zero())
        .map(|(w, c)| c / w)
        .unwrap_or_else(Coefficient::one);
    EigenPair { lambda: &e.lambda * &k, weight, pairs: e.pairs.clone() }
}

fn pair_key(a: &EigenPair, b: &EigenPair) -> (u8, u64, u64, String) {
    let (sa, sb) = (a.lambda.signum(), b.lambda.signum());
    let class = if sa * sb < 0 {
        0
    } else if sa != 0 && sb != 0 {
        1
    } else {
        2
    };
    let l1 = a.weight.l1() + b.weight.l1();
    let lam = a.lambda.abs_f64() + b.lambda.abs_f64();
    // f64 keys as ordered bits (all non-negative)
    (class, l1.to_bits(), lam.to_bits(), format!("{}{}", a.weight.canonical(), b.weight.canonical()))
}

/// All unordered pairs with linearly independent weights, best first:
/// opposite-sign eigenvalues, then nonzero eigenvalues, then smallest total
/// `|p|_1`, smallest `|lambda_1| + |lambda_2|`, and weight text.
pub fn independent_pairs(eps: &[EigenPair]) -> Vec<(EigenPair, EigenPair)> {
    let canon: Vec<EigenPair> = eps.iter().map(canonical_representative).collect();
    let mut sorted: Vec<&EigenPair> = canon.iter().collect();
    sorted.sort_by(|a, b| a.weight.cmp(&b.weight));
    let mut out = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if !a.same_basis(b) || weights_rank(&a.weight, &b.weight) < 2 {
                continue;
            }
            out.push(orient(a, b));
        }
    }
    out.sort_by_cached_key(|(a, b)| pair_key(a, b));
    out
}

/// The preferred independent pair for solving, if any.
pub fn select_pair(pairs: &[ManifoldPair]) -> Result<Option<(EigenPair, EigenPair)>, EigenError> {
    let cands = eigen_candidates(pairs)?;
    Ok(independent_pairs(&cands).into_iter().next())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Product,
    Quotient,
    /// Applies to the first operand only.
    Power(Coefficient),
}

pub fn combine(e1: &EigenPair, e2: &EigenPair, op: &CombineOp) -> Result<EigenPair, EigenError> {
    if !e1.same_basis(e2) {
        return Err(EigenError::DifferentBasis);
    }
    let zip = |f: &dyn Fn(&Coefficient, &Coefficient) -> Coefficient| -> WeightVector {
        WeightVector(e1.weight.0.iter().zip(&e2.weight.0).map(|(a, b)| f(a, b)).collect())
    };
    let (weight, lambda) = match op {
        CombineOp::Product => (zip(&|a, b| a + b), &e1.lambda + &e2.lambda),
        CombineOp::Quotient => (zip(&|a, b| a - b), &e1.lambda - &e2.lambda),
        CombineOp::Power(c) => (WeightVector(e1.weight.0.iter().map(|a| a * c).collect()), &e1.lambda * c),
    };
    Ok(EigenPair { lambda, weight, pairs: e1.pairs.clone() })
}

/// Exact identities behind an eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeReport {
    /// `Lie(M_i) - M_i N_i` for each factor.
    pub manifold_residuals: Vec<Polynomial>,
    /// `sum p_i N_i - lambda`.
    pub weight_residual: Polynomial,
    /// `grad(phi).F - lambda*phi` for integer exponents.
    pub pde_residual: Option<RationalFunction>,
}

impl PdeReport {
    pub fn passed(&self) -> bool {
        self.manifold_residuals.iter().all(|r| r.is_zero())
            && self.weight_residual.is_zero()
            && self.pde_residual.as_ref().is_none_or(|r| r.is_zero())
    }
}

impl fmt::Display for PdeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = |zero: bool| if zero { "0" } else { "nonzero" };
        let m_ok = self.manifold_residuals.iter().all(|r| r.is_zero());
        write!(f, "Lie(M)-M*N: {}; sum(p*N)-lambda: {}", status(m_ok), self.weight_residual)?;
        match &self.pde_residual {
            Some(r) => write!(f, "; grad(phi).F-lambda*phi: {r}"),
            None => write!(f, "; grad(phi).F-lambda*phi: skipped (non-integer exponents)"),
        }
    }
}

/// `phi = A / B` as unreduced products of the factors, or `None` for
/// non-integer exponents.
fn phi_parts(e: &EigenPair) -> Option<(Polynomial, Polynomial)> {
    let vars = e.pairs[0].m().vars();
    let (mut a, mut b) = (Polynomial::one(vars), Polynomial::one(vars));
    for (pair, p) in e.factors() {
        let k = p.as_i64()?;
        let pw = pair.m().pow(k.unsigned_abs() as u32);
        if k > 0 {
            a = &a * &pw;
        } else {
            b = &b * &pw;
        }
    }
    Some((a, b))
}

/// `grad(A/B).F - lambda*A/B`, computed over the common denominator `B^2`
/// so that the zero test needs no gcd.
fn pde_residual(a: &Polynomial, b: &Polynomial, lambda: &Coefficient, field: &VectorField) -> Result<RationalFunction, EigenError> {
    let num = &(&(b * &lie_derivative(a, field)?) - &(a * &lie_derivative(b, field)?)) - &(a * b).scale(lambda);
    if num.is_zero() {
        return Ok(RationalFunction::from_poly(num));
    }
    Ok(RationalFunction::new(num, b * b)?)
}

pub fn verify_pde(e: &EigenPair, field: &VectorField) -> Result<PdeReport, EigenError> {
    let mut manifold_residuals = Vec::new();
    for (pair, _) in e.factors() {
        let lie = lie_derivative(pair.m(), field)?;
        manifold_residuals.push(lie.try_sub(&pair.m().try_mul(pair.n())?)?);
    }
    let sum = weighted_cofactor(&e.pairs, &e.weight)?;
    let weight_residual = sum.try_sub(&Polynomial::constant(field.vars(), e.lambda.clone()))?;
    let pde_residual = match phi_parts(e) {
        Some((a, b)) => Some(pde_residual(&a, &b, &e.lambda, field)?),
        None => None,
    };
    Ok(PdeReport { manifold_residuals, weight_residual, pde_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars_from;
    use crate::manifold::tests::{field, poly};
    use crate::manifold::Provenance;

    fn w(v: &[i64]) -> WeightVector {
        WeightVector(v.iter().map(|&c| Coefficient::from_int(c)).collect())
    }

    fn setup(comps: &[&str], ms: &[&str]) -> (VectorField, Vec<ManifoldPair>) {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, comps);
        let pairs = ms
            .iter()
            .map(|m| ManifoldPair::verify(&poly(&v, m), &f, Provenance::UserSupplied).unwrap().unwrap())
            .collect();
        (f, pairs)
    }

    fn ex1() -> (VectorField, Vec<ManifoldPair>) {
        setup(&["x*y", "y^2 - x - 1"], &["x", "y - x - 1", "y + x + 1"])
    }

    #[test]
    fn combinations_example_one() {
        let (_, pairs) = ex1();
        let basis = constant_combinations(&pairs).unwrap();
        assert_eq!(basis.len(), 2);
        let m = Matrix::from_rows(basis.iter().map(|b| b.0.clone()).collect());
        for want in [w(&[1, 0, -1]), w(&[1, -1, 0]), w(&[0, 1, -1])] {
            let mut rows: Vec<Vec<Coefficient>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
            rows.push(want.0.clone());
            assert_eq!(rank(&Matrix::from_rows(rows)), 2);
        }
        let lam = |v: &[i64]| build_eigenpair(&pairs, &w(v)).unwrap().lambda;
        assert_eq!(lam(&[1, 0, -1]), Coefficient::from_int(1));
        assert_eq!(lam(&[1, -1, 0]), Coefficient::from_int(-1));
        assert_eq!(lam(&[0, 1, -1]), Coefficient::from_int(2));
    }

    #[test]
    fn constant_cofactors() {
        let (_, pairs) = setup(&["x - y", "-2*x"], &["y + x", "y - 2*x"]);
        let basis = constant_combinations(&pairs).unwrap();
        assert_eq!(basis, vec![w(&[1, 0]), w(&[0, 1])]);
        let e = build_eigenpair(&pairs, &basis[0]).unwrap();
        assert_eq!(e.lambda, Coefficient::from_int(-1));
        assert_eq!(e.phi_string(), "y + x");
    }

    #[test]
    fn quadratic_example_weights() {
        let (f, pairs) = setup(&["x - x*y", "-y + x^2 - 2*y^2"], &["x", "x^2 - 3*y", "1 - x^2 + 2*y"]);
        let e = build_eigenpair(&pairs, &w(&[-2, 0, 1])).unwrap();
        assert_eq!(e.lambda, Coefficient::from_int(-2));
        // canonical M3 is x^2 - 2*y - 1, the negative of the hand-derived form
        assert_eq!(e.phi_string(), "(-1 - 2*y + x^2) / x^2");
        assert!(verify_pde(&e, &f).unwrap().passed());
        let e = build_eigenpair(&pairs, &w(&[0, -1, 1])).unwrap();
        assert_eq!(e.lambda, Coefficient::from_int(1));
        let (a, b) = select_pair(&pairs).unwrap().unwrap();
        assert_eq!((a.weight, b.weight), (w(&[0, -1, 1]), w(&[-2, 0, 1])));
    }

    #[test]
    fn example_one_eigenfunction() {
        let (f, pairs) = ex1();
        let e = build_eigenpair(&pairs, &w(&[1, 0, -1])).unwrap();
        assert_eq!(e.phi_string(), "x / (1 + x + y)");
        assert!(verify_pde(&e, &f).unwrap().passed());
        let (a, b) = select_pair(&pairs).unwrap().unwrap();
        assert_eq!((a.weight, b.weight), (w(&[1, 0, -1]), w(&[1, -1, 0])));
    }

    #[test]
    fn dependence_gate() {
        let (_, pairs) = setup(&["x - x*y", "-x - y - y^2"], &["x", "x + 2*y", "1 + x + y"]);
        let p1 = build_eigenpair(&pairs, &w(&[-1, 0, 1])).unwrap();
        let p2 = build_eigenpair(&pairs, &w(&[0, -1, 1])).unwrap();
        let p3 = build_eigenpair(&pairs, &w(&[1, 0, -1])).unwrap();
        let ind = independent_pairs(&[p1.clone(), p3.clone()]);
        assert!(ind.is_empty());
        assert!(independent_pairs(&[p1.clone(), p1.clone()]).is_empty());
        let ind = independent_pairs(&[p1.clone(), p2.clone(), p3.clone()]);
        assert_eq!(ind.len(), 2);
        let (a, b) = select_pair(&pairs).unwrap().unwrap();
        let got: BTreeSet<WeightVector> = [a.weight, b.weight].into();
        assert_eq!(got, [p1.weight, p2.weight].into());
    }

    #[test]
    fn combine_algebra() {
        let (_, pairs) = setup(&["x - y", "-2*x"], &["y + x", "y - 2*x"]);
        let e1 = build_eigenpair(&pairs, &w(&[1, 0])).unwrap();
        let e2 = build_eigenpair(&pairs, &w(&[0, 1])).unwrap();
        let p = combine(&e1, &e2, &CombineOp::Product).unwrap();
        assert_eq!(p.lambda, Coefficient::from_int(1));
        assert_eq!(p.weight, w(&[1, 1]));
        let id = combine(&e1, &e2, &CombineOp::Power(Coefficient::one())).unwrap();
        assert_eq!(id, e1);
        let q = combine(&e1, &e1, &CombineOp::Quotient).unwrap();
        assert!(q.lambda.is_zero() && q.weight.is_zero());
    }

    #[test]
    fn corrupted_lambda_fails() {
        let (f, pairs) = setup(&["x - y", "-2*x"], &["y + x", "y - 2*x"]);
        let mut e = build_eigenpair(&pairs, &w(&[0, 1])).unwrap();
        assert!(verify_pde(&e, &f).unwrap().passed());
        e.lambda = Coefficient::from_int(3);
        let rep = verify_pde(&e, &f).unwrap();
        assert!(!rep.passed());
        let v = f.vars().clone();
        let want = RationalFunction::from_poly(poly(&v, "-(y - 2*x)"));
        assert_eq!(rep.pde_residual.unwrap(), want);
    }
}
