//! Sparse multivariate polynomials over [`Coefficient`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::coeff::{Coefficient, Field};
use super::monomial::Monomial;
use super::AlgebraError;

/// Ordered list of variable names shared by polynomials that interact.
pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Coefficient) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Polynomial::constant(vars, Coefficient::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial::var(vars.len(), i), Coefficient::one());
        p
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self, AlgebraError> {
        let i = index_of(vars, name)?;
        Ok(Polynomial::var(vars, i))
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Coefficient) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coefficient)>>(vars: &Vars, terms: I) -> Self {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Accumulate `c * m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Coefficient) {
        debug_assert_eq!(m.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coeff(&Monomial::one(self.nvars()))
    }

    pub fn coeff(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_else(Coefficient::zero)
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(i)).max()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Coefficient)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&Coefficient> {
        self.leading().map(|(_, c)| c)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(i) > 0)
    }

    pub fn check_vars(&self, other: &Polynomial) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(AlgebraError::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_vars(other)?;
        let mut out = Polynomial::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coefficient) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e > 0 {
                out.add_term(m.with_exponent(i, e - 1), c * &Coefficient::from_int(e as i64));
            }
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<Polynomial, AlgebraError> {
        Ok(self.partial(index_of(&self.vars, name)?))
    }

    /// Quotient `q` with `self = divisor * q`, or `Ok(None)` when the division
    /// leaves a remainder.
    pub fn divide_exact(&self, divisor: &Polynomial) -> Result<Option<Polynomial>, AlgebraError> {
        self.check_vars(divisor)?;
        let (lm, lc) = divisor.leading().ok_or(AlgebraError::ZeroDivisor)?;
        let lc_inv = lc.inv().ok_or(AlgebraError::ZeroDivisor)?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading() {
            let Some(qm) = rm.div(lm) else {
                return Ok(None);
            };
            let qc = rc * &lc_inv;
            let step = divisor.mul_monomial(&qm, &qc);
            rem = &rem - &step;
            quot.add_term(qm, qc);
            if !rem.is_exact() {
                // float cancellation is never exact; drop negligible residue
                rem.drop_small(1e-12);
            }
        }
        debug_assert!(!self.is_exact() || divisor.is_exact() == false || &(divisor * &quot) == self);
        Ok(Some(quot))
    }

    fn drop_small(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs_f64() > tol);
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(|c| c.is_exact())
    }

    /// The single exact field all coefficients belong to.
    pub fn field(&self) -> Result<Option<Field>, AlgebraError> {
        let mut f = Field::Rational;
        for c in self.terms.values() {
            match c.field() {
                None => return Ok(None),
                Some(g) => {
                    f = f.join(g).ok_or_else(|| AlgebraError::mixed(f, g))?;
                }
            }
        }
        Ok(Some(f))
    }

    pub fn eval(&self, point: &[Coefficient]) -> Coefficient {
        let mut acc = Coefficient::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = &t * &point[i].pow(e);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= point[i].powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Real evaluation; imaginary parts of coefficients are ignored.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_complex().re;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Coefficients with respect to variable `i`: entry `k` multiplies `x_i^k`.
    pub fn coeffs_in(&self, i: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(i).unwrap_or(0) as usize;
        let mut out = vec![Polynomial::zero(&self.vars); deg + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (m, c) in &self.terms {
            let e = m.exponent(i) as usize;
            out[e].add_term(m.with_exponent(i, 0), c.clone());
        }
        out
    }

    /// Substitute polynomial `value` for variable `i`.
    pub fn substitute(&self, i: usize, value: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_vars(value)?;
        let coeffs = self.coeffs_in(i);
        // Horner in the substituted variable
        let mut acc = Polynomial::zero(&self.vars);
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        Ok(acc)
    }

    /// Substitute constants for some variables (`None` keeps the variable).
    pub fn partial_eval(&self, values: &[Option<Coefficient>]) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut exps: Vec<u32> = m.exponents().to_vec();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    if exps[i] > 0 {
                        coef = &coef * &v.pow(exps[i]);
                        exps[i] = 0;
                    }
                }
            }
            out.add_term(Monomial::from_exponents(&exps), coef);
        }
        out
    }

    /// Re-express over another variable list; `map[i]` is the new index of old variable `i`.
    pub fn embed(&self, vars: &Vars, map: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; vars.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial::from_exponents(&exps), c.clone());
        }
        out
    }

    pub fn map_coeffs<F: Fn(&Coefficient) -> Coefficient>(&self, f: F) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Polynomial {
        self.map_coeffs(|c| c.to_float())
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coeff() {
            Some(lc) if !lc.is_one() => self.scale(&lc.inv().expect("nonzero leading coefficient")),
            _ => self.clone(),
        }
    }

    /// Canonical associate: for exact coefficients, the unique scalar multiple
    /// that is primitive over the integers (integer content 1) and whose
    /// leading coefficient is positive, after first making it monic so that
    /// associates over `Q(sqrt(d))` coincide. Float polynomials are made monic.
    pub fn canonical(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let monic = self.monic();
        if !monic.is_exact() {
            return monic;
        }
        let scaled = clear_denominators(monic.terms.values().cloned().collect::<Vec<_>>().as_slice());
        let mut out = monic.scale(&Coefficient::from_bigint(scaled));
        let content = out.terms.values().fold(BigInt::zero(), |g, c| g.gcd(&c.numerator_gcd()));
        if !content.is_zero() && !content.is_one() {
            out = out.scale(&Coefficient::from_rational(num_rational::BigRational::new(
                BigInt::one(),
                content,
            )));
        }
        if out.leading_coeff().map(|c| c.signum() < 0).unwrap_or(false) {
            out = -&out;
        }
        out
    }

    /// Whether every coefficient is an exact integer (or `Z[sqrt(d)]` element).
    pub fn has_integral_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_exact() && c.denominator_lcm().is_one())
    }
}

/// Smallest positive integer that clears all denominators of `values`.
pub fn clear_denominators(values: &[Coefficient]) -> BigInt {
    values.iter().fold(BigInt::one(), |l, c| l.lcm(&c.denominator_lcm()))
}

pub fn index_of(vars: &Vars, name: &str) -> Result<usize, AlgebraError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial variable lists differ")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial variable lists differ")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial variable lists differ")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}

forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

/// Term order used when printing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermOrder {
    Descending,
    Ascending,
}

fn fmt_monomial(vars: &Vars, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars[i].clone()),
            _ => parts.push(format!("{}^{}", vars[i], e)),
        }
    }
    parts.join("*")
}

/// Render in the system-file expression syntax.
pub fn format_poly(p: &Polynomial, order: TermOrder) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<_> = match order {
        TermOrder::Descending => p.terms.iter().rev().collect(),
        TermOrder::Ascending => p.terms.iter().collect(),
    };
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let (negative, mag) = if c.prints_negative() {
            (true, -c)
        } else {
            (false, c.clone())
        };
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mag_str = if mag.is_compound() { format!("({mag})") } else { mag.to_string() };
        if m.is_one() {
            out.push_str(&mag_str);
        } else if mag.is_one() {
            out.push_str(&fmt_monomial(&p.vars, m));
        } else {
            out.push_str(&mag_str);
            out.push('*');
            out.push_str(&fmt_monomial(&p.vars, m));
        }
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self, TermOrder::Descending))
    }
}

/// Real-coefficient polynomial compiled for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct RealPoly {
    coeffs: Vec<f64>,
    exps: Vec<Vec<u32>>,
}

impl RealPoly {
    /// `None` when some coefficient is not real.
    pub fn new(p: &Polynomial) -> Option<Self> {
        let mut coeffs = Vec::with_capacity(p.num_terms());
        let mut exps = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            coeffs.push(c.to_f64()?);
            exps.push(m.exponents().to_vec());
        }
        Some(RealPoly { coeffs, exps })
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, e) in self.coeffs.iter().zip(&self.exps) {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }
}
