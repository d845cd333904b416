//! Eigen-decomposition of 2x2 matrices, exact when the field allows.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::coeff::squarefree_part;
use crate::algebra::linalg::canonical_vector;
use crate::algebra::{Coefficient, Field};

#[derive(Clone, Debug, PartialEq)]
pub struct Eig2Exact {
    pub values: Vec<Coefficient>,
    pub vectors: Vec<Vec<Coefficient>>,
    /// Repeated eigenvalue with a one-dimensional eigenspace.
    pub defective: bool,
    /// Field the eigen-data lives in.
    pub field: Field,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eig2Numeric {
    pub values: Vec<Complex64>,
    pub vectors: Vec<[Complex64; 2]>,
    pub defective: bool,
}

fn sqrt_rational(r: &BigRational) -> Option<(BigRational, i64)> {
    // sqrt(n/d) = sqrt(n*d)/d = (s/d) * sqrt(free)
    if r.is_zero() {
        return Some((BigRational::zero(), 1));
    }
    let nd: BigInt = r.numer() * r.denom();
    let nd = nd.to_i64()?;
    let (free, sq) = squarefree_part(nd);
    Some((BigRational::new(BigInt::from(sq), r.denom().clone()), free))
}

/// Square root of `c` inside `field`; with `adopt` a rational `c` may
/// introduce the extension `Q(sqrt(free))` when the field is `Q`.
pub fn sqrt_in_field(c: &Coefficient, field: Field, adopt: bool) -> Option<(Coefficient, Field)> {
    if let Some(r) = c.as_rational() {
        let (s, free) = sqrt_rational(r)?;
        if free == 1 {
            return Some((Coefficient::from_rational(s), field));
        }
        let target = match field {
            Field::Quadratic(d) if d == free => field,
            Field::Rational if adopt => Field::Quadratic(free),
            _ => return None,
        };
        return Some((&Coefficient::from_rational(s) * &Coefficient::sqrt_of(free), target));
    }
    let (a, b) = c.parts()?;
    let d = field.discriminant()?;
    // (p + q sqrt d)^2 = a + b sqrt d  =>  p^2 + d q^2 = a, 2pq = b
    let norm = &a * &a - BigRational::from_integer(d.into()) * &b * &b;
    let (s, free) = sqrt_rational(&norm)?;
    if free != 1 {
        return None;
    }
    let two = BigRational::from_integer(2.into());
    for cand in [(&a + &s) / &two, (&a - &s) / &two] {
        if cand.is_negative() {
            continue;
        }
        let Some((p, f)) = sqrt_rational(&cand) else { continue };
        if f != 1 || p.is_zero() {
            continue;
        }
        let q = &b / (&two * &p);
        let root = Coefficient::quadratic(p, q, d);
        if &root * &root == *c {
            return Some((root, field));
        }
    }
    None
}

fn eigvec(m: &[[Coefficient; 2]; 2], lam: &Coefficient) -> Vec<Coefficient> {
    let (a, b, c, d) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
    let v = if !b.is_zero() {
        vec![b.clone(), lam - a]
    } else if !c.is_zero() {
        vec![lam - d, c.clone()]
    } else if lam == a {
        vec![Coefficient::one(), Coefficient::zero()]
    } else {
        vec![Coefficient::zero(), Coefficient::one()]
    };
    canonical_vector(&v)
}

/// Exact eigenvalues and eigenvectors, or `None` when the discriminant has no
/// square root in the allowed field.
pub fn eig2x2_exact(m: &[[Coefficient; 2]; 2], field: Field, adopt: bool) -> Option<Eig2Exact> {
    let tr = &m[0][0] + &m[1][1];
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    let disc = &(&tr * &tr) - &(&Coefficient::from_int(4) * &det);
    let (s, field) = sqrt_in_field(&disc, field, adopt)?;
    let half = Coefficient::from_ratio(1, 2);
    if s.is_zero() {
        let lam = &tr * &half;
        let scalar = m[0][1].is_zero() && m[1][0].is_zero();
        if scalar {
            return Some(Eig2Exact {
                values: vec![lam.clone(), lam],
                vectors: vec![
                    vec![Coefficient::one(), Coefficient::zero()],
                    vec![Coefficient::zero(), Coefficient::one()],
                ],
                defective: false,
                field,
            });
        }
        let v = eigvec(m, &lam);
        return Some(Eig2Exact { values: vec![lam], vectors: vec![v], defective: true, field });
    }
    let l1 = &(&tr + &s) * &half;
    let l2 = &(&tr - &s) * &half;
    let v1 = eigvec(m, &l1);
    let v2 = eigvec(m, &l2);
    Some(Eig2Exact { values: vec![l1, l2], vectors: vec![v1, v2], defective: false, field })
}

pub fn eig2x2_numeric(m: [[f64; 2]; 2]) -> Eig2Numeric {
    let [[a, b], [c, d]] = m;
    let tr = a + d;
    let det = a * d - b * c;
    let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1.0);
    let vec_for = |lam: Complex64| -> [Complex64; 2] {
        let v = if b.abs() > 1e-14 * scale {
            [Complex64::new(b, 0.0), lam - a]
        } else if c.abs() > 1e-14 * scale {
            [lam - d, Complex64::new(c, 0.0)]
        } else if (lam - a).norm() < (lam - d).norm() {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    if disc.norm() <= 1e-12 * scale {
        let scalar = b.abs() <= 1e-14 * scale && c.abs() <= 1e-14 * scale;
        if !scalar {
            return Eig2Numeric { values: vec![l1], vectors: vec![vec_for(l1)], defective: true };
        }
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let e2 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        return Eig2Numeric { values: vec![l1, l2], vectors: vec![e1, e2], defective: false };
    }
    Eig2Numeric { values: vec![l1, l2], vectors: vec![vec_for(l1), vec_for(l2)], defective: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(v: i64) -> Coefficient {
        Coefficient::from_int(v)
    }

    #[test]
    fn linear_example_eigendata() {
        let m = [[ci(1), ci(-1)], [ci(-2), ci(0)]];
        let e = eig2x2_exact(&m, Field::Rational, false).unwrap();
        assert_eq!(e.values, vec![ci(2), ci(-1)]);
        // [-1, 1] and [1, 2] up to scale
        assert_eq!(e.vectors[0], vec![ci(1), ci(-1)]);
        assert_eq!(e.vectors[1], vec![ci(1), ci(2)]);
    }

    #[test]
    fn irrational_eigenvalues_need_field() {
        let m = [[ci(1), ci(1)], [ci(1), ci(-1)]];
        assert!(eig2x2_exact(&m, Field::Rational, false).is_none());
        let e = eig2x2_exact(&m, Field::Quadratic(2), false).unwrap();
        assert_eq!(e.values[0], Coefficient::sqrt_of(2));
        let e = eig2x2_exact(&m, Field::Rational, true).unwrap();
        assert_eq!(e.field, Field::Quadratic(2));
    }

    #[test]
    fn defective_jordan_block() {
        let m = [[ci(1), ci(1)], [ci(0), ci(1)]];
        let e = eig2x2_exact(&m, Field::Rational, false).unwrap();
        assert!(e.defective);
        assert_eq!(e.vectors.len(), 1);
        let n = eig2x2_numeric([[1.0, 1.0], [0.0, 1.0]]);
        assert!(n.defective);
    }

    #[test]
    fn sqrt_of_quadratic_element() {
        // (1 + sqrt 2)^2 = 3 + 2 sqrt 2
        let c = Coefficient::quadratic(BigRational::from_integer(3.into()), BigRational::from_integer(2.into()), 2);
        let (r, _) = sqrt_in_field(&c, Field::Quadratic(2), false).unwrap();
        assert_eq!(&r * &r, c);
    }

    #[test]
    fn numeric_matches_exact() {
        let n = eig2x2_numeric([[1.0, -1.0], [-2.0, 0.0]]);
        assert!((n.values[0].re - 2.0).abs() < 1e-14);
        assert!((n.values[1].re + 1.0).abs() < 1e-14);
    }
}
