//! Scalar systems `dx/dt = f(x)`: eigenfunctions by partial fractions and
//! solutions by inverting `phi(x(t)) = phi(x0) e^{lambda t}`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::algebra::gcd::gcd;
use crate::algebra::{AlgebraError, Coefficient, Field, Polynomial, RationalFunction};
use crate::numerics::eig::sqrt_in_field;
use crate::numerics::roots::roots_univariate_numeric;
use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Koopman1dError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("expected a polynomial in one variable")]
    NotUnivariate,
    #[error("eigenvalue must be nonzero")]
    ZeroEigenvalue,
    #[error("phi has a pole at x = {0}")]
    Pole(f64),
    #[error("Newton did not converge at t = {t} (residual {residual:e})")]
    NoConvergence { t: f64, residual: f64 },
    #[error("time grid must be ascending from 0")]
    BadGrid,
}

/// Roots of a univariate polynomial with multiplicities. Rational roots are
/// found by the rational-root test, remaining quadratics by the quadratic
/// formula (adopting `Q(sqrt(d))`); other factors are split square-free and
/// rooted numerically.
pub fn roots_1d(f: &Polynomial) -> Result<Vec<(Coefficient, usize)>, Koopman1dError> {
    if f.nvars() != 1 {
        return Err(Koopman1dError::NotUnivariate);
    }
    if f.is_zero() {
        return Err(Koopman1dError::ZeroPolynomial);
    }
    let mut rest = f.canonical();
    let mut out: Vec<(Coefficient, usize)> = Vec::new();
    let vars = f.vars().clone();
    let x = Polynomial::var(&vars, 0);
    let strip = |rest: &mut Polynomial, r: &Coefficient| -> usize {
        let lin = &x - &Polynomial::constant(&vars, r.clone());
        let mut k = 0;
        while let Ok(Some(q)) = rest.divide_exact(&lin) {
            *rest = q;
            k += 1;
        }
        k
    };
    if rest.is_exact() && rest.field()? == Some(Field::Rational) {
        for r in rational_root_candidates(&rest) {
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
            let k = strip(&mut rest, &r);
            if k > 0 {
                out.push((r, k));
            }
        }
    }
    let deg = rest.degree().unwrap_or(0);
    if deg == 2 && rest.is_exact() {
        let field = rest.field()?.unwrap_or(Field::Rational);
        let [c, b, a] = [0u32, 1, 2].map(|e| rest.coeff(&crate::algebra::Monomial::from_exponents(&[e])));
        let disc = &(&b * &b) - &(&Coefficient::from_int(4) * &(&a * &c));
        if let Some((s, _)) = sqrt_in_field(&disc, field, field == Field::Rational) {
            let two_a = &Coefficient::from_int(2) * &a;
            if s.is_zero() {
                out.push((&(-&b) / &two_a, 2));
            } else {
                out.push((&(&(-&b) - &s) / &two_a, 1));
                out.push((&(&(-&b) + &s) / &two_a, 1));
            }
            rest = Polynomial::one(&vars);
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        for (factor, mult) in squarefree_decomposition(&rest)? {
            let coeffs: Vec<Complex64> = factor.coeffs_in(0).iter().map(|c| c.constant_term().to_complex()).collect();
            for z in roots_univariate_numeric(&coeffs)? {
                out.push((Coefficient::from_complex(polish_root(&factor, z)), mult));
            }
        }
    }
    out.sort_by(|a, b| {
        let (za, zb) = (a.0.to_complex(), b.0.to_complex());
        za.re.total_cmp(&zb.re).then(za.im.total_cmp(&zb.im))
    });
    Ok(out)
}

fn polish_root(p: &Polynomial, mut z: Complex64) -> Complex64 {
    let d = p.partial(0);
    for _ in 0..5 {
        let v = p.eval_complex(&[z]);
        let dv = d.eval_complex(&[z]);
        if v.norm() < 1e-15 || dv.norm() == 0.0 {
            break;
        }
        let next = z - v / dv;
        if p.eval_complex(&[next]).norm() >= v.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Yun's square-free decomposition `p = prod a_i^i`.
fn squarefree_decomposition(p: &Polynomial) -> Result<Vec<(Polynomial, usize)>, Koopman1dError> {
    if !p.is_exact() {
        return Ok(vec![(p.clone(), 1)]);
    }
    let dp = p.partial(0);
    let b = gcd(p, &dp)?;
    let mut c = p.divide_exact(&b)?.expect("gcd divides");
    let mut d = &dp.divide_exact(&b)?.expect("gcd divides") - &c.partial(0);
    let mut out = Vec::new();
    let mut i = 1;
    while !c.is_constant() {
        let a = gcd(&c, &d)?;
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        c = c.divide_exact(&a)?.expect("gcd divides");
        d = &d.divide_exact(&a)?.expect("gcd divides") - &c.partial(0);
        i += 1;
    }
    Ok(out)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let Some(v) = n.to_u64().filter(|v| *v <= 1_000_000_000_000) else { return Vec::new() };
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= v {
        if v % k == 0 {
            out.push(BigInt::from(k));
            if k * k != v {
                out.push(BigInt::from(v / k));
            }
        }
        k += 1;
    }
    out
}

/// Candidates `+-p/q`, `p | a_0`, `q | a_n`, plus zero, for an integral
/// polynomial.
fn rational_root_candidates(p: &Polynomial) -> Vec<Coefficient> {
    let mut out = vec![Coefficient::zero()];
    let ints: Vec<(u32, BigInt)> = p
        .terms()
        .map(|(m, c)| (m.exponent(0), c.as_rational().map(|r| r.numer().clone()).unwrap_or_default()))
        .collect();
    let Some((_, lead)) = ints.last() else { return out };
    // lowest nonzero coefficient after factoring out x^k
    let Some((_, low)) = ints.first() else { return out };
    let (ps, qs) = (divisors(low), divisors(lead));
    for pn in &ps {
        for qn in &qs {
            if pn.gcd(qn).is_one() {
                let r = BigRational::new(pn.clone(), qn.clone());
                out.push(Coefficient::from_rational(r.clone()));
                out.push(Coefficient::from_rational(-r));
            }
        }
    }
    out
}

/// `phi(x) = exp(E(x)) * prod (x - x_i)^{p_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenfunction1D {
    pub lambda: Coefficient,
    /// `(root, multiplicity, p_i)`; roots with zero log-exponent are kept so
    /// that they still bound the solver's intervals.
    pub factors: Vec<(Coefficient, usize, Coefficient)>,
    /// `E(x) = sum c * (x - x_i)^{-k}` as `(factor index, k, c)`.
    pub exp_terms: Vec<(usize, u32, Coefficient)>,
    /// Leading coefficient of `f`.
    pub scale: Coefficient,
}

fn common_field(values: &[&Coefficient]) -> Option<Field> {
    let mut f = Field::Rational;
    for v in values {
        f = f.join(v.field()?)?;
    }
    Some(f)
}

/// Series of `1/(delta + h)^m` up to `h^order`.
fn inv_power_series(delta: &Coefficient, m: usize, order: usize) -> Vec<Coefficient> {
    let inv = Coefficient::one() / delta.clone();
    let mut base = Vec::with_capacity(order + 1);
    let mut term = inv.clone();
    for _ in 0..=order {
        base.push(term.clone());
        term = &(-&term) * &inv;
    }
    let mut acc = vec![Coefficient::zero(); order + 1];
    acc[0] = Coefficient::one();
    for _ in 0..m {
        acc = series_mul(&acc, &base, order);
    }
    acc
}

fn series_mul(a: &[Coefficient], b: &[Coefficient], order: usize) -> Vec<Coefficient> {
    let mut out = vec![Coefficient::zero(); order + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Integrate `lambda / f` by partial fractions: simple poles give the
/// exponents `p_i`, higher-order poles the rational part `E`.
pub fn partial_fraction_exponents(f: &Polynomial, lambda: &Coefficient) -> Result<Eigenfunction1D, Koopman1dError> {
    if lambda.is_zero() {
        return Err(Koopman1dError::ZeroEigenvalue);
    }
    let roots = roots_1d(f)?;
    let scale = f.leading_coeff().cloned().ok_or(Koopman1dError::ZeroPolynomial)?;
    let mut all: Vec<&Coefficient> = roots.iter().map(|(r, _)| r).collect();
    all.push(lambda);
    all.push(&scale);
    let exact = common_field(&all).is_some();
    let lift = |c: &Coefficient| if exact { c.clone() } else { c.to_float() };
    let roots: Vec<(Coefficient, usize)> = roots.iter().map(|(r, m)| (lift(r), *m)).collect();
    let (lam, sc) = (lift(lambda), lift(&scale));
    let mut factors = Vec::new();
    let mut exp_terms = Vec::new();
    for (i, (xi, mi)) in roots.iter().enumerate() {
        let order = mi - 1;
        let mut g = vec![Coefficient::zero(); order + 1];
        g[0] = &lam / &sc;
        for (j, (xj, mj)) in roots.iter().enumerate() {
            if j != i {
                g = series_mul(&g, &inv_power_series(&(xi - xj), *mj, order), order);
            }
        }
        // coefficient of (x - x_i)^{-k} in lambda/f is g[m_i - k]
        factors.push((xi.clone(), *mi, g[order].clone()));
        for k in 2..=*mi {
            let a = &g[mi - k];
            if !a.is_zero() {
                exp_terms.push((i, (k - 1) as u32, a / &Coefficient::from_int(1 - k as i64)));
            }
        }
    }
    Ok(Eigenfunction1D { lambda: lam, factors, exp_terms, scale: sc })
}

impl Eigenfunction1D {
    pub fn is_exact(&self) -> bool {
        self.lambda.is_exact()
    }

    /// Roots carrying a nonzero log-exponent.
    pub fn log_factors(&self) -> impl Iterator<Item = &(Coefficient, usize, Coefficient)> {
        self.factors.iter().filter(|(_, _, p)| !p.is_zero())
    }

    /// `E(x)` as an exact rational function.
    pub fn exp_part(&self, f: &Polynomial) -> Option<RationalFunction> {
        if !self.is_exact() {
            return None;
        }
        let vars = f.vars();
        let x = Polynomial::var(vars, 0);
        let mut acc = RationalFunction::from_poly(Polynomial::zero(vars));
        for (i, k, c) in &self.exp_terms {
            let lin = &x - &Polynomial::constant(vars, self.factors[*i].0.clone());
            let term = RationalFunction::new(Polynomial::constant(vars, c.clone()), lin.pow(*k)).ok()?;
            acc = acc.add(&term).ok()?;
        }
        Some(acc)
    }

    /// `E'(x) f(x) + sum p_i f(x)/(x - x_i) - lambda`, exactly.
    pub fn log_derivative_residual(&self, f: &Polynomial) -> Option<RationalFunction> {
        let e = self.exp_part(f)?;
        let vars = f.vars();
        let x = Polynomial::var(vars, 0);
        let fr = RationalFunction::from_poly(f.clone());
        let mut acc = e.partial(0).ok()?.mul(&fr).ok()?;
        for (xi, _, p) in self.log_factors() {
            let lin = &x - &Polynomial::constant(vars, xi.clone());
            let q = f.divide_exact(&lin).ok()??;
            acc = acc.add(&RationalFunction::from_poly(q.scale(p))).ok()?;
        }
        acc.sub(&RationalFunction::constant(vars, self.lambda.clone())).ok()
    }

    /// The same residual evaluated in floating point.
    pub fn log_derivative_residual_at(&self, f: &Polynomial, x: Complex64) -> Complex64 {
        let fx = f.eval_complex(&[x]);
        let mut e_prime = Complex64::new(0.0, 0.0);
        for (i, k, c) in &self.exp_terms {
            let d = x - self.factors[*i].0.to_complex();
            e_prime += -(*k as f64) * c.to_complex() / d.powu(k + 1);
        }
        let mut acc = e_prime * fx;
        for (xi, _, p) in self.log_factors() {
            acc += p.to_complex() * fx / (x - xi.to_complex());
        }
        acc - self.lambda.to_complex()
    }

    /// Principal-branch `log phi(x)`.
    pub fn log_phi(&self, x: Complex64) -> Result<Complex64, Koopman1dError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, k, c) in &self.exp_terms {
            let d = x - self.factors[*i].0.to_complex();
            if d.norm() == 0.0 {
                return Err(Koopman1dError::Pole(x.re));
            }
            acc += c.to_complex() / d.powu(*k);
        }
        for (xi, _, p) in self.log_factors() {
            let d = x - xi.to_complex();
            if d.norm() == 0.0 {
                return Err(Koopman1dError::Pole(x.re));
            }
            acc += p.to_complex() * d.ln();
        }
        Ok(acc)
    }

    /// `d/dx log phi = lambda / f`.
    fn dlog_phi(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, k, c) in &self.exp_terms {
            let d = x - self.factors[*i].0.to_complex();
            acc += -(*k as f64) * c.to_complex() / d.powu(k + 1);
        }
        for (xi, _, p) in self.log_factors() {
            acc += p.to_complex() / (x - xi.to_complex());
        }
        acc
    }

    /// Sorted real roots (fixed points) bounding the solver's intervals.
    fn real_roots(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .factors
            .iter()
            .map(|(x, _, _)| x.to_complex())
            .filter(|z| z.im.abs() <= 1e-12 * z.re.abs().max(1.0))
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }
}

impl fmt::Display for Eigenfunction1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.exp_terms.is_empty() {
            let e: Vec<String> = self
                .exp_terms
                .iter()
                .map(|(i, k, c)| {
                    let base = shifted(&self.factors[*i].0);
                    if *k == 1 {
                        format!("({c})/({base})")
                    } else {
                        format!("({c})/({base})^{k}")
                    }
                })
                .collect();
            parts.push(format!("exp({})", e.join(" + ")));
        }
        for (xi, _, p) in self.log_factors() {
            parts.push(format!("({})^({p})", shifted(xi)));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

fn shifted(root: &Coefficient) -> String {
    if root.is_zero() {
        "x".into()
    } else if root.prints_negative() && !root.is_compound() {
        format!("x + {}", -root)
    } else {
        format!("x - {}", if root.is_compound() { format!("({root})") } else { root.to_string() })
    }
}

/// `phi(x)`, principal branch.
pub fn eval_phi(e: &Eigenfunction1D, x: Complex64) -> Result<Complex64, Koopman1dError> {
    for (xi, _, p) in e.log_factors() {
        if (x - xi.to_complex()).norm() == 0.0 && p.to_complex().re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    Ok(e.log_phi(x)?.exp())
}

/// Solution samples; `x` is shorter than `times` when the trajectory
/// escapes to infinity, with `escape_time` estimated.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution1D {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub escape_time: Option<f64>,
}

const NEWTON_ITERS: usize = 100;
/// Stand-in for infinity when measuring how far an unbounded interval reaches.
const FAR: f64 = 1e15;

/// Solve `phi(x(t)) = phi(x0) e^{lambda t}` on `t_grid` by safeguarded Newton
/// on the real part of `log phi(x) - log phi(x0) - lambda t`, continued from
/// the previous grid point. On the real line between adjacent real roots of
/// `f` this function is monotone, so the bracket never crosses a fixed point.
pub fn solve_1d(e: &Eigenfunction1D, x0: f64, t_grid: &[f64]) -> Result<Solution1D, Koopman1dError> {
    if t_grid.first().is_some_and(|t| *t != 0.0) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Koopman1dError::BadGrid);
    }
    let lam = e.lambda.to_complex();
    let roots = e.real_roots();
    let mut out = Solution1D { times: t_grid.to_vec(), x: Vec::with_capacity(t_grid.len()), escape_time: None };
    if roots.iter().any(|r| (*r - x0).abs() <= 1e-15 * r.abs().max(1.0)) {
        out.x = vec![x0; t_grid.len()];
        return Ok(out);
    }
    let lo = roots.iter().rev().find(|r| **r < x0).copied().unwrap_or(f64::NEG_INFINITY);
    let hi = roots.iter().find(|r| **r > x0).copied().unwrap_or(f64::INFINITY);
    let base = e.log_phi(Complex64::new(x0, 0.0))?;
    // H(x) = Re[log phi(x) - log phi(x0)] - Re(lambda) t, increasing or
    // decreasing with the fixed sign of lambda/f on (lo, hi)
    let h = |x: f64, t: f64| -> Result<f64, Koopman1dError> {
        Ok((e.log_phi(Complex64::new(x, 0.0))? - base).re - lam.re * t)
    };
    let dh = |x: f64| e.dlog_phi(Complex64::new(x, 0.0)).re;
    // range of H(., 0) over the interval: infinite at a finite root,
    // finite towards infinity when deg f >= 2
    let increasing = dh(x0) > 0.0;
    let end_value = |end: f64, upper: bool| -> Result<f64, Koopman1dError> {
        if end.is_finite() {
            return Ok(if upper == increasing { f64::INFINITY } else { f64::NEG_INFINITY });
        }
        h(end.signum() * FAR.max(x0.abs() * 1e6), 0.0)
    };
    let (g_lo, g_hi) = (end_value(lo, false)?, end_value(hi, true)?);
    let (g_min, g_max) = (g_lo.min(g_hi), g_lo.max(g_hi));
    let mut x = x0;
    for &t in t_grid {
        if t == 0.0 {
            out.x.push(x0);
            continue;
        }
        let target = lam.re * t;
        if target >= g_max || target <= g_min {
            let edge = if target >= g_max { g_max } else { g_min };
            out.escape_time = Some(edge / lam.re);
            return Ok(out);
        }
        x = newton_bracketed(&h, &dh, x, t, lo, hi)?;
        out.x.push(x);
    }
    Ok(out)
}

fn newton_bracketed<H, D>(h: &H, dh: &D, start: f64, t: f64, lo: f64, hi: f64) -> Result<f64, Koopman1dError>
where
    H: Fn(f64, f64) -> Result<f64, Koopman1dError>,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut x = start;
    let mut v = h(x, t)?;
    let increasing = dh(x) > 0.0;
    for _ in 0..NEWTON_ITERS {
        if v == 0.0 {
            return Ok(x);
        }
        // shrink the bracket: the root lies on the side where H changes sign
        if (v > 0.0) == increasing {
            b = x;
        } else {
            a = x;
        }
        let d = dh(x);
        let mut next = x - v / d;
        if !next.is_finite() || next <= a || next >= b {
            next = match (a.is_finite(), b.is_finite()) {
                (true, true) => 0.5 * (a + b),
                (true, false) => x + (x - a).abs().max(1.0),
                (false, true) => x - (b - x).abs().max(1.0),
                (false, false) => x - v.signum() * 1.0,
            };
        }
        let step = (next - x).abs();
        x = next;
        v = h(x, t)?;
        if step <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            return Ok(x);
        }
    }
    if v.abs() <= 1e-12 * (1.0 + t.abs()) {
        Ok(x)
    } else {
        Err(Koopman1dError::NoConvergence { t, residual: v.abs() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars_from;
    use crate::manifold::tests::poly;

    fn f(s: &str) -> Polynomial {
        poly(&vars_from(&["x"]), s)
    }

    fn roots_str(p: &str) -> Vec<(String, usize)> {
        roots_1d(&f(p)).unwrap().into_iter().map(|(r, m)| (r.to_string(), m)).collect()
    }

    #[test]
    fn root_examples() {
        let s = |v: &[(&str, usize)]| v.iter().map(|(a, b)| (a.to_string(), *b)).collect::<Vec<_>>();
        assert_eq!(roots_str("-x^3 + x"), s(&[("-1", 1), ("0", 1), ("1", 1)]));
        assert_eq!(roots_str("x^2"), s(&[("0", 2)]));
        assert_eq!(roots_str("x^3 + 2*x^2 + 2*x"), s(&[("-1 - sqrt(-1)", 1), ("-1 + sqrt(-1)", 1), ("0", 1)]));
        assert_eq!(roots_str("x^2 - 2"), s(&[("-sqrt(2)", 1), ("sqrt(2)", 1)]));
        assert!(roots_1d(&f("0")).is_err());
    }

    #[test]
    fn numeric_roots_with_multiplicity() {
        // (x^3 - 3x - 1)^2 (x - 2) has no rational roots in the cubic
        let r = roots_1d(&f("(x^3 - 3*x - 1)^2 * (x - 2)")).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.iter().filter(|(_, m)| *m == 2).count(), 3);
        for (z, _) in &r {
            assert!(f("x^3 - 3*x - 1").eval_complex(&[z.to_complex()]).norm() < 1e-12 || z.to_complex() == Complex64::new(2.0, 0.0));
        }
    }

    #[test]
    fn exponent_examples() {
        let e = partial_fraction_exponents(&f("-x^3 + x"), &Coefficient::from_int(-1)).unwrap();
        let p: Vec<(String, String)> = e.factors.iter().map(|(r, _, p)| (r.to_string(), p.to_string())).collect();
        assert_eq!(p, vec![("-1".into(), "1/2".into()), ("0".into(), "-1".into()), ("1".into(), "1/2".into())]);
        assert!(e.exp_terms.is_empty());
        assert!(e.log_derivative_residual(&f("-x^3 + x")).unwrap().is_zero());

        let e = partial_fraction_exponents(&f("x^2"), &Coefficient::from_int(-1)).unwrap();
        assert_eq!(e.log_factors().count(), 0);
        assert_eq!(e.exp_part(&f("x^2")).unwrap().to_string(), "1 / x");

        let g = f("-x^5 + x");
        let e = partial_fraction_exponents(&g, &Coefficient::from_int(-1)).unwrap();
        let quarter = Coefficient::from_ratio(1, 4);
        for (r, _, p) in &e.factors {
            let want = if r.is_zero() { Coefficient::from_int(-1) } else { quarter.clone() };
            assert_eq!(p, &want, "root {r}");
        }
        assert_eq!(e.factors.len(), 5);
        assert!(e.log_derivative_residual(&g).unwrap().is_zero());
    }

    #[test]
    fn phi_values() {
        let e = partial_fraction_exponents(&f("-x^3 + x"), &Coefficient::from_int(-1)).unwrap();
        let v = eval_phi(&e, Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.norm() - 0.75f64.sqrt() / 0.5).abs() < 1e-12);
        assert_eq!(eval_phi(&e, Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert!(eval_phi(&e, Complex64::new(0.0, 0.0)).is_err());
        let e = partial_fraction_exponents(&f("x^2"), &Coefficient::from_int(-1)).unwrap();
        let v = eval_phi(&e, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new(std::f64::consts::E, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solves_match_closed_forms() {
        let e = partial_fraction_exponents(&f("x^2"), &Coefficient::from_int(-1)).unwrap();
        let s = solve_1d(&e, 1.0, &[0.0, 0.5]).unwrap();
        assert_eq!(s.x[0], 1.0);
        assert!((s.x[1] - 2.0).abs() < 1e-12);
        let s = solve_1d(&e, 1.0, &[0.0, 0.5, 1.5]).unwrap();
        assert_eq!(s.x.len(), 2);
        assert!((s.escape_time.unwrap() - 1.0).abs() < 1e-9);

        let e = partial_fraction_exponents(&f("-x^3 + x"), &Coefficient::from_int(-1)).unwrap();
        let s = solve_1d(&e, 0.5, &[0.0, 1.0]).unwrap();
        let t: f64 = 1.0;
        let want = t.exp() / (-1.0 + (2.0 * t).exp() + 4.0).sqrt();
        assert!((s.x[1] - want).abs() < 1e-12);
    }

    #[test]
    fn complex_root_case_is_real_on_the_line() {
        let g = f("x^3 + 2*x^2 + 2*x");
        let e = partial_fraction_exponents(&g, &Coefficient::from_int(-1)).unwrap();
        assert!(e.log_derivative_residual(&g).unwrap().is_zero());
        let s = solve_1d(&e, -0.5, &[0.0, 0.25, 0.5]).unwrap();
        // f'(0) = 2: x leaves the unstable origin and stays in (-inf, 0)
        assert!(s.x.iter().all(|v| *v < 0.0));
        assert!(s.x[2] < s.x[1] && s.x[1] < s.x[0]);
        for (t, x) in s.times.iter().zip(&s.x) {
            let lhs = eval_phi(&e, Complex64::new(*x, 0.0)).unwrap();
            let rhs = eval_phi(&e, Complex64::new(-0.5, 0.0)).unwrap() * (-t).exp();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
