//! Reconstruct exact field elements from floating-point estimates.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::algebra::{Coefficient, Field};

pub const RATIONALIZE_TOL: f64 = 1e-8;
pub const DEFAULT_DEN_BOUND: i64 = 64;
/// Largest |b| tried for the irrational part `b*sqrt(d)`.
const MAX_IRRATIONAL_PART: i64 = 8;

fn tol_for(v: f64) -> f64 {
    RATIONALIZE_TOL * v.abs().max(1.0)
}

/// First continued-fraction convergent `p/q` of `v` with `q <= den_bound`
/// that lies within tolerance.
pub fn rationalize_q(v: f64, den_bound: i64) -> Option<(i64, i64)> {
    if !v.is_finite() || v.abs() > 1e12 {
        return None;
    }
    let tol = tol_for(v);
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > den_bound as i128 {
            return None;
        }
        if ((p2 as f64) / (q2 as f64) - v).abs() <= tol {
            return Some((p2 as i64, q2 as i64));
        }
        let frac = x - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        x = 1.0 / frac;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact element of `field` within `1e-8` of the real number `v`.
///
/// Over `Q(sqrt(d))`, `d > 0`, tries `a + b*sqrt(d)` with `b = k/q`,
/// `q <= den_bound`, `|b| <= 8`, and `a` from continued fractions; among the
/// candidates in tolerance the simplest (smallest common denominator, then
/// smallest error) wins. A pure rational is preferred when it fits.
pub fn rationalize(v: f64, field: Field, den_bound: i64) -> Option<Coefficient> {
    if let Some((p, q)) = rationalize_q(v, den_bound) {
        return Some(Coefficient::from_rational(ratio(p, q)));
    }
    let d = match field {
        Field::Quadratic(d) if d > 0 => d,
        _ => return None,
    };
    let s = (d as f64).sqrt();
    let tol = tol_for(v);
    let mut best: Option<(i64, f64, Coefficient)> = None;
    for q in 1..=den_bound {
        for k in -MAX_IRRATIONAL_PART * q..=MAX_IRRATIONAL_PART * q {
            if k == 0 || num_integer::gcd(k, q) != 1 {
                continue;
            }
            let b = k as f64 / q as f64;
            let rest = v - b * s;
            let Some((p, qa)) = rationalize_q(rest, den_bound) else { continue };
            let err = ((p as f64) / (qa as f64) + b * s - v).abs();
            if err > tol {
                continue;
            }
            let complexity = num_integer::lcm(q, qa);
            let better = match &best {
                None => true,
                Some((c, e, _)) => complexity < *c || (complexity == *c && err < *e),
            };
            if better {
                best = Some((complexity, err, Coefficient::quadratic(ratio(p, qa), ratio(k, q), d)));
            }
        }
        if let Some((c, _, _)) = &best {
            if *c <= q {
                break;
            }
        }
    }
    best.map(|(_, _, c)| c)
}

/// Complex version: over `Q(sqrt(d))` with `d < 0` the imaginary part maps to
/// the coefficient of `sqrt(d)`.
pub fn rationalize_complex(z: Complex64, field: Field, den_bound: i64) -> Option<Coefficient> {
    if z.im.abs() <= tol_for(z.re) {
        return rationalize(z.re, field, den_bound);
    }
    match field {
        Field::Quadratic(d) if d < 0 => {
            let (pa, qa) = rationalize_q(z.re, den_bound)?;
            let (pb, qb) = rationalize_q(z.im / (-(d as f64)).sqrt(), den_bound)?;
            Some(Coefficient::quadratic(ratio(pa, qa), ratio(pb, qb), d))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_rationals() {
        assert_eq!(rationalize(0.5, Field::Rational, 64), Some(Coefficient::from_ratio(1, 2)));
        assert_eq!(rationalize(0.333333341, Field::Rational, 64), Some(Coefficient::from_ratio(1, 3)));
        assert_eq!(rationalize(-3.0, Field::Rational, 64), Some(Coefficient::from_int(-3)));
        assert_eq!(rationalize(std::f64::consts::PI, Field::Rational, 64), None);
    }

    #[test]
    fn silver_ratio() {
        let c = rationalize(2.41421356, Field::Quadratic(2), 64).unwrap();
        assert_eq!(c, Coefficient::quadratic(ratio(1, 1), ratio(1, 1), 2));
        let c = rationalize(-(2f64.sqrt()) / 2.0 + 0.25, Field::Quadratic(2), 64).unwrap();
        assert_eq!(c, Coefficient::quadratic(ratio(1, 4), ratio(-1, 2), 2));
    }

    #[test]
    fn gaussian() {
        let c = rationalize_complex(Complex64::new(-1.0, 1.0), Field::Quadratic(-1), 64).unwrap();
        assert_eq!(c, Coefficient::quadratic(ratio(-1, 1), ratio(1, 1), -1));
    }
}
