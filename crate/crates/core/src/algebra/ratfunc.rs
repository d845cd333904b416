use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;

use super::coeff::Coefficient;
use super::gcd::gcd;
use super::poly::{format_poly, Polynomial, TermOrder, Vars};
use super::AlgebraError;

/// Quotient of polynomials, reduced by their gcd with a monic denominator.
///
/// When the gcd cannot be computed (float coefficients) the pair is kept
/// unreduced and `reduced` is false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    reduced: bool,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        num.check_vars(&den)?;
        if den.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        if num.is_zero() {
            return Ok(RationalFunction { den: Polynomial::one(num.vars()), num, reduced: true });
        }
        let (num, den, reduced) = match gcd(&num, &den) {
            Ok(g) if g.is_constant() => (num, den, true),
            Ok(g) => (
                num.divide_exact(&g)?.expect("gcd divides numerator"),
                den.divide_exact(&g)?.expect("gcd divides denominator"),
                true,
            ),
            Err(AlgebraError::MixedFields { .. }) => {
                return Err(gcd(&num, &den).unwrap_err());
            }
            Err(_) => (num, den, false),
        };
        let lc = den.leading_coeff().expect("nonzero").clone();
        let inv = lc.inv().expect("nonzero");
        Ok(RationalFunction { num: num.scale(&inv), den: den.scale(&inv), reduced })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.vars());
        RationalFunction { num: p, den, reduced: true }
    }

    pub fn constant(vars: &Vars, c: Coefficient) -> Self {
        RationalFunction::from_poly(Polynomial::constant(vars, c))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &RationalFunction) -> Result<Self, AlgebraError> {
        let n = (&self.num * &o.den).try_add(&(&o.num * &self.den))?;
        RationalFunction::new(n, &self.den * &o.den)
    }

    pub fn sub(&self, o: &RationalFunction) -> Result<Self, AlgebraError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFunction) -> Result<Self, AlgebraError> {
        self.num.check_vars(&o.num)?;
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &RationalFunction) -> Result<Self, AlgebraError> {
        if o.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        self.num.check_vars(&o.num)?;
        RationalFunction::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone(), reduced: self.reduced }
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Self, AlgebraError> {
        RationalFunction::new(self.num.scale(c), self.den.clone())
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self, AlgebraError> {
        let k = e.unsigned_abs() as u32;
        let (n, d) = (self.num.pow(k), self.den.pow(k));
        if e >= 0 {
            RationalFunction::new(n, d)
        } else {
            if self.is_zero() {
                return Err(AlgebraError::ZeroDivisor);
            }
            RationalFunction::new(d, n)
        }
    }

    pub fn partial(&self, i: usize) -> Result<Self, AlgebraError> {
        let n = &(&self.num.partial(i) * &self.den) - &(&self.num * &self.den.partial(i));
        RationalFunction::new(n, self.den.pow(2))
    }

    pub fn eval(&self, point: &[Coefficient]) -> Result<Coefficient, AlgebraError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(AlgebraError::Pole);
        }
        Ok(&self.num.eval(point) / &d)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.num.eval_complex(point) / self.den.eval_complex(point)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }
}

fn render(num: &Polynomial, den: &Polynomial) -> String {
    if den.is_constant() && den.constant_term().is_one() {
        return num.to_string();
    }
    let wrap = |p: &Polynomial| {
        let s = format_poly(p, TermOrder::Ascending);
        if p.num_terms() > 1 || p.terms().any(|(_, c)| c.is_compound()) {
            format!("({s})")
        } else {
            s
        }
    };
    let n = wrap(num);
    let d = if den.num_terms() == 1 && !den.is_constant() {
        // a bare product like x^2*y still needs grouping after "/"
        let s = format_poly(den, TermOrder::Ascending);
        if s.contains('*') { format!("({s})") } else { s }
    } else {
        wrap(den)
    };
    format!("{n} / {d}")
}

impl RationalFunction {
    /// Same value printed with numerator and denominator scaled by the lcm
    /// of all coefficient denominators, e.g. `x / (x + 2*y)` rather than
    /// `1/2*x / (1/2*x + y)`.
    pub fn to_string_cleared(&self) -> String {
        let mut l = BigInt::one();
        for (_, c) in self.num.terms().chain(self.den.terms()) {
            l = l.lcm(&c.denominator_lcm());
        }
        if l.is_one() {
            return self.to_string();
        }
        let k = Coefficient::from_bigint(l);
        render(&self.num.scale(&k), &self.den.scale(&k))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.num, &self.den))
    }
}
