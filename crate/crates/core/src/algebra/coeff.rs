//! Exact scalars: rationals, elements of a quadratic field `Q(sqrt(d))`, and a
//! complex floating fallback.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Element `a + b*sqrt(d)` of a quadratic extension. `b` is never zero; values
/// with a zero irrational part are stored as [`Coefficient::Rational`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadNumber {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

/// The scalar type every polynomial is built on.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Rational(BigRational),
    Quadratic(QuadNumber),
    Float(Complex64),
}

/// Which exact field a computation lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Quadratic(i64),
}

impl Field {
    pub fn discriminant(self) -> Option<i64> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => Some(d),
        }
    }

    /// Join two field contexts; `None` if they name different extensions.
    pub fn join(self, other: Field) -> Option<Field> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Some(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Some(self),
            _ => None,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

/// Square-free part of a nonzero integer, keeping the sign: `12 -> 3`, `-8 -> -2`.
pub fn squarefree_part(n: i64) -> (i64, i64) {
    assert!(n != 0, "squarefree part of zero");
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut free: u64 = 1;
    let mut square: u64 = 1;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            free *= p;
        }
        for _ in 0..e / 2 {
            square *= p;
        }
        p += 1;
    }
    free *= m;
    (sign * free as i64, square as i64)
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: scale down before converting
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Coefficient::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::Rational(rat(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Coefficient::Rational(BigRational::from_integer(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Coefficient::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coefficient::Rational(r)
    }

    pub fn from_f64(v: f64) -> Self {
        Coefficient::Float(Complex64::new(v, 0.0))
    }

    pub fn from_complex(v: Complex64) -> Self {
        Coefficient::Float(v)
    }

    /// `a + b*sqrt(d)`, collapsing to a rational when `b == 0`.
    pub fn quadratic(a: BigRational, b: BigRational, d: i64) -> Self {
        if b.is_zero() {
            Coefficient::Rational(a)
        } else {
            debug_assert!(d != 0 && d != 1, "quadratic extension needs d != 0, 1");
            Coefficient::Quadratic(QuadNumber { a, b, d })
        }
    }

    /// `sqrt(d)` for a square-free `d`.
    pub fn sqrt_of(d: i64) -> Self {
        Coefficient::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_zero(),
            Coefficient::Quadratic(_) => false,
            Coefficient::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_one(),
            Coefficient::Quadratic(_) => false,
            Coefficient::Float(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Coefficient::Float(_))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coefficient::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coefficient::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Integer value if this is an exact rational integer that fits in `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Coefficient::Rational(r) if r.is_integer() => r.to_integer().to_i64(),
            _ => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Coefficient::Rational(r) if r.is_integer())
    }

    /// The exact field this value lives in (`None` for floats).
    pub fn field(&self) -> Option<Field> {
        match self {
            Coefficient::Rational(_) => Some(Field::Rational),
            Coefficient::Quadratic(q) => Some(Field::Quadratic(q.d)),
            Coefficient::Float(_) => None,
        }
    }

    /// Rational and irrational parts `(a, b)` of an exact value.
    pub fn parts(&self) -> Option<(BigRational, BigRational)> {
        match self {
            Coefficient::Rational(r) => Some((r.clone(), BigRational::zero())),
            Coefficient::Quadratic(q) => Some((q.a.clone(), q.b.clone())),
            Coefficient::Float(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Coefficient::Rational(r) => Complex64::new(rat_to_f64(r), 0.0),
            Coefficient::Quadratic(q) => {
                let a = rat_to_f64(&q.a);
                let b = rat_to_f64(&q.b);
                if q.d > 0 {
                    Complex64::new(a + b * (q.d as f64).sqrt(), 0.0)
                } else {
                    Complex64::new(a, b * ((-q.d) as f64).sqrt())
                }
            }
            Coefficient::Float(c) => *c,
        }
    }

    /// Real value, or `None` when the value is genuinely complex.
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Coefficient::Quadratic(q) if q.d < 0 => None,
            Coefficient::Float(c) if c.im != 0.0 => None,
            _ => Some(self.to_complex().re),
        }
    }

    /// Whether the value is real (always true for `Q` and real extensions).
    pub fn is_real(&self) -> bool {
        self.to_f64().is_some()
    }

    /// Exact sign for real values. For complex extension elements the sign of
    /// the first nonzero part `(a, b)` is used as a normalization convention.
    pub fn signum(&self) -> i32 {
        fn sg(r: &BigRational) -> i32 {
            if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            }
        }
        match self {
            Coefficient::Rational(r) => sg(r),
            Coefficient::Quadratic(q) => {
                if q.d < 0 {
                    let s = sg(&q.a);
                    return if s != 0 { s } else { sg(&q.b) };
                }
                let (sa, sb) = (sg(&q.a), sg(&q.b));
                if sa == 0 {
                    return sb;
                }
                if sa == sb {
                    return sa;
                }
                // a and b have opposite signs: compare a^2 with d*b^2
                let a2 = &q.a * &q.a;
                let db2 = &q.b * &q.b * rat(q.d);
                match a2.cmp(&db2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => 0,
                }
            }
            Coefficient::Float(c) => {
                let v = if c.re != 0.0 { c.re } else { c.im };
                if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Coefficient> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coefficient::Rational(r) => Coefficient::Rational(r.recip()),
            Coefficient::Quadratic(q) => {
                // (a + b s)^-1 = (a - b s) / (a^2 - d b^2)
                let norm = &q.a * &q.a - &q.b * &q.b * rat(q.d);
                Coefficient::quadratic(&q.a / &norm, -(&q.b / &norm), q.d)
            }
            Coefficient::Float(c) => Coefficient::Float(c.inv()),
        })
    }

    /// Field conjugate `a - b*sqrt(d)`; identity on rationals and floats.
    pub fn conjugate(&self) -> Coefficient {
        match self {
            Coefficient::Quadratic(q) => Coefficient::quadratic(q.a.clone(), -q.b.clone(), q.d),
            other => other.clone(),
        }
    }

    /// Field norm `a^2 - d b^2` (the value times its conjugate).
    pub fn norm(&self) -> Option<BigRational> {
        match self {
            Coefficient::Rational(r) => Some(r * r),
            Coefficient::Quadratic(q) => Some(&q.a * &q.a - &q.b * &q.b * rat(q.d)),
            Coefficient::Float(_) => None,
        }
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        let mut acc = Coefficient::one();
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

    /// Integer power allowing negative exponents (panics on `0^-k`).
    pub fn powi(&self, e: i64) -> Coefficient {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inv().expect("negative power of zero").pow((-e) as u32)
        }
    }

    /// Convert to the float fallback.
    pub fn to_float(&self) -> Coefficient {
        Coefficient::Float(self.to_complex())
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denominator_lcm(&self) -> BigInt {
        match self {
            Coefficient::Rational(r) => r.denom().clone(),
            Coefficient::Quadratic(q) => q.a.denom().lcm(q.b.denom()),
            Coefficient::Float(_) => BigInt::one(),
        }
    }

    /// gcd of the numerators of both parts (assumes the value is integral).
    pub fn numerator_gcd(&self) -> BigInt {
        match self {
            Coefficient::Rational(r) => r.numer().abs(),
            Coefficient::Quadratic(q) => q.a.numer().gcd(q.b.numer()),
            Coefficient::Float(_) => BigInt::one(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Coefficient {
        self * &Coefficient::from_bigint(k.clone())
    }
}

fn mixed(d1: i64, d2: i64) -> ! {
    panic!("mixed quadratic extensions sqrt({d1}) and sqrt({d2}) in one computation")
}

fn add_impl(x: &Coefficient, y: &Coefficient) -> Coefficient {
    use Coefficient::*;
    match (x, y) {
        (Rational(a), Rational(b)) => Rational(a + b),
        (Rational(r), Quadratic(q)) | (Quadratic(q), Rational(r)) => {
            Coefficient::quadratic(&q.a + r, q.b.clone(), q.d)
        }
        (Quadratic(p), Quadratic(q)) => {
            if p.d != q.d {
                mixed(p.d, q.d)
            }
            Coefficient::quadratic(&p.a + &q.a, &p.b + &q.b, p.d)
        }
        (Float(a), b) => Float(a + b.to_complex()),
        (a, Float(b)) => Float(a.to_complex() + b),
    }
}

fn mul_impl(x: &Coefficient, y: &Coefficient) -> Coefficient {
    use Coefficient::*;
    match (x, y) {
        (Rational(a), Rational(b)) => Rational(a * b),
        (Rational(r), Quadratic(q)) | (Quadratic(q), Rational(r)) => {
            Coefficient::quadratic(&q.a * r, &q.b * r, q.d)
        }
        (Quadratic(p), Quadratic(q)) => {
            if p.d != q.d {
                mixed(p.d, q.d)
            }
            let a = &p.a * &q.a + &p.b * &q.b * rat(p.d);
            let b = &p.a * &q.b + &p.b * &q.a;
            Coefficient::quadratic(a, b, p.d)
        }
        (Float(a), b) => Float(a * b.to_complex()),
        (a, Float(b)) => Float(a.to_complex() * b),
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        use Coefficient::*;
        match (self, other) {
            (Rational(a), Rational(b)) => a == b,
            (Quadratic(p), Quadratic(q)) => p == q,
            (Float(a), Float(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Coefficient {}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        add_impl(self, rhs)
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        add_impl(self, &-rhs)
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        mul_impl(self, rhs)
    }
}

impl<'a> Div<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn div(self, rhs: &Coefficient) -> Coefficient {
        mul_impl(self, &rhs.inv().expect("division by zero coefficient"))
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Rational(r) => Coefficient::Rational(-r),
            Coefficient::Quadratic(q) => Coefficient::Quadratic(QuadNumber {
                a: -q.a.clone(),
                b: -q.b.clone(),
                d: q.d,
            }),
            Coefficient::Float(c) => Coefficient::Float(-c),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Coefficient> for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: Coefficient) -> Coefficient {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Coefficient> for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: &Coefficient) -> Coefficient {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Coefficient> for &'a Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: Coefficient) -> Coefficient {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, rhs: &Coefficient) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Coefficient> for Coefficient {
    fn mul_assign(&mut self, rhs: &Coefficient) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::from_int(n)
    }
}

impl From<BigRational> for Coefficient {
    fn from(r: BigRational) -> Self {
        Coefficient::Rational(r)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn fmt_float(v: f64) -> String {
    let s = format!("{v:e}");
    // prefer plain notation for moderate magnitudes
    if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        s
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(r) => fmt_rational(r, f),
            Coefficient::Quadratic(q) => {
                if !q.a.is_zero() {
                    fmt_rational(&q.a, f)?;
                    write!(f, "{}", if q.b.is_negative() { " - " } else { " + " })?;
                } else if q.b.is_negative() {
                    write!(f, "-")?;
                }
                let b = q.b.abs();
                if !b.is_one() {
                    fmt_rational(&b, f)?;
                    write!(f, "*")?;
                }
                write!(f, "sqrt({})", q.d)
            }
            Coefficient::Float(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", fmt_float(c.re))
                } else {
                    let sign = if c.im < 0.0 { "-" } else { "+" };
                    write!(f, "({} {} {}*i)", fmt_float(c.re), sign, fmt_float(c.im.abs()))
                }
            }
        }
    }
}

impl Coefficient {
    /// Whether printing needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        match self {
            Coefficient::Quadratic(q) => !q.a.is_zero(),
            Coefficient::Float(c) => c.im != 0.0,
            Coefficient::Rational(_) => false,
        }
    }

    /// True when the printed form starts with a minus sign.
    pub fn prints_negative(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_negative(),
            Coefficient::Quadratic(q) => {
                if q.a.is_zero() {
                    q.b.is_negative()
                } else {
                    q.a.is_negative()
                }
            }
            Coefficient::Float(c) => c.im == 0.0 && c.re < 0.0,
        }
    }

    pub fn bigint_sign(n: &BigInt) -> i32 {
        match n.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}
