//! Multivariate GCD by recursive content / primitive-part pseudo-remainder
//! sequences. Exact coefficients only.

use super::monomial::Monomial;
use super::poly::Polynomial;
use super::AlgebraError;

/// Greatest common divisor in canonical form (see [`Polynomial::canonical`]).
///
/// `gcd(0, 0) = 0`. Float coefficients are rejected.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, AlgebraError> {
    a.check_vars(b)?;
    if !a.is_exact() || !b.is_exact() {
        return Err(AlgebraError::NotExact);
    }
    if let (Some(fa), Some(fb)) = (a.field()?, b.field()?) {
        fa.join(fb).ok_or_else(|| AlgebraError::mixed(fa, fb))?;
    }
    Ok(gcd_rec(a, b))
}

fn gcd_rec(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.canonical();
    }
    if b.is_zero() {
        return a.canonical();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.vars());
    }
    let n = a.nvars();
    let var = (0..n).rev().find(|&i| a.uses_var(i) || b.uses_var(i)).expect("nonconstant");
    if !a.uses_var(var) {
        return gcd_rec(a, &content(b, var));
    }
    if !b.uses_var(var) {
        return gcd_rec(&content(a, var), b);
    }
    let ca = content(a, var);
    let cb = content(b, var);
    let g_content = gcd_rec(&ca, &cb);
    let mut r0 = primitive_with(a, &ca);
    let mut r1 = primitive_with(b, &cb);
    if r0.degree_in(var) < r1.degree_in(var) {
        std::mem::swap(&mut r0, &mut r1);
    }
    loop {
        let r = pseudo_rem(&r0, &r1, var);
        if r.is_zero() {
            break;
        }
        if !r.uses_var(var) {
            r1 = Polynomial::one(a.vars());
            break;
        }
        r0 = r1;
        r1 = primitive(&r, var);
    }
    (&g_content * &r1).canonical()
}

/// Content with respect to `var`: the gcd of the coefficients of `p` viewed as
/// a polynomial in `var`.
pub fn content(p: &Polynomial, var: usize) -> Polynomial {
    let mut g = Polynomial::zero(p.vars());
    for c in p.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c);
        if g.is_constant() {
            return Polynomial::one(p.vars());
        }
    }
    g
}

pub fn primitive(p: &Polynomial, var: usize) -> Polynomial {
    let c = content(p, var);
    primitive_with(p, &c)
}

fn primitive_with(p: &Polynomial, c: &Polynomial) -> Polynomial {
    let q = p
        .divide_exact(c)
        .expect("same variables")
        .expect("content divides the polynomial");
    q.canonical()
}

/// Pseudo-remainder of `a` by `b` in `var`.
pub fn pseudo_rem(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let db = b.degree_in(var).unwrap_or(0);
    let bc = b.coeffs_in(var);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while let Some(dr) = r.degree_in(var) {
        if r.is_zero() || dr < db {
            break;
        }
        let lr = r.coeffs_in(var)[dr as usize].clone();
        let shift = Monomial::var(a.nvars(), var).pow(dr - db);
        let shifted = (b * &lr).mul_monomial(&shift, &super::coeff::Coefficient::one());
        r = &(&r * &lb) - &shifted;
        if r.is_zero() {
            break;
        }
        // keep coefficient growth in check; remainders only matter up to units
        r = r.canonical();
    }
    r
}

/// Least common multiple in canonical form.
pub fn lcm(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, AlgebraError> {
    if a.is_zero() || b.is_zero() {
        return Ok(Polynomial::zero(a.vars()));
    }
    let g = gcd(a, b)?;
    let prod = a * b;
    Ok(prod.divide_exact(&g)?.expect("gcd divides product").canonical())
}

/// Square-free part `p / gcd(p, p')` for a polynomial in one used variable.
pub fn squarefree_univariate(p: &Polynomial, var: usize) -> Result<Polynomial, AlgebraError> {
    let d = p.partial(var);
    if d.is_zero() {
        return Ok(p.canonical());
    }
    let g = gcd(p, &d)?;
    Ok(p.divide_exact(&g)?.expect("gcd divides").canonical())
}
