//! Closed-form solutions of planar systems from a pair of independent
//! eigenfunctions: map the initial condition, propagate each eigenfunction
//! as `phi0 * exp(lambda*t)`, and invert back to the state variables.

mod check;
mod expoly;
mod numeric;

pub use check::{check_against_rk45, CheckReport, CheckRow};
pub use expoly::ExpPoly;
pub use numeric::{invert_numeric, solve_numeric};

use std::fmt;

use crate::algebra::{vars_from, AlgebraError, Coefficient, Monomial, Polynomial, RationalFunction, Vars};
use crate::eigen::{EigenError, EigenPair};
use crate::numerics::NumericsError;
use crate::sysparse::InitialCondition;

/// Pole test threshold relative to the magnitude of the denominator terms.
pub const POLE_TOL: f64 = 1e-12;
/// Samples per unit time when scanning for sign changes.
const SCAN_DENSITY: f64 = 4096.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Koopman2dError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("initial condition lies on the singular manifold {0} = 0")]
    SingularIc(String),
    #[error("eigenfunction value at the initial condition is not real")]
    NotReal,
    #[error("no exact inversion path: {0}")]
    NoExactPath(String),
    #[error("degenerate eigenfunction pair: the linear system in the state monomials is singular")]
    Degenerate,
    #[error("initial condition has {0} components, expected 2")]
    Dimension(usize),
    #[error("pole at t = {t}")]
    Pole { t: f64 },
    #[error("t = {t}: even root of a negative quantity, trajectory left the branch fixed at t = 0")]
    Domain { t: f64 },
}

pub type Pair = (EigenPair, EigenPair);

/// `var^power = value(phi1, phi2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSolve {
    pub var: usize,
    pub power: u32,
    pub value: RationalFunction,
}

/// Symbolic inverse of `(x, y) -> (phi1, phi2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inversion {
    pub state_vars: Vars,
    pub comps: [MonomialSolve; 2],
}

impl fmt::Display for Inversion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.comps.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let name = &self.state_vars[c.var];
            match c.power {
                1 => write!(f, "{name} = {}", c.value.to_string_cleared())?,
                p if p % 2 == 0 => write!(f, "{name} = sign({name}0) * ({})^(1/{p})", c.value.to_string_cleared())?,
                p => write!(f, "{name} = ({})^(1/{p})", c.value.to_string_cleared())?,
            }
        }
        Ok(())
    }
}

fn phi_vars() -> Vars {
    vars_from(&["phi1", "phi2"])
}

/// Eigenfunction values at the initial condition, exact when both the
/// initial condition and the eigenfunctions allow it.
pub fn map_ic(pair: &Pair, ic: &InitialCondition) -> Result<[Coefficient; 2], Koopman2dError> {
    if ic.values.len() != 2 {
        return Err(Koopman2dError::Dimension(ic.values.len()));
    }
    let mut out = Vec::with_capacity(2);
    for e in [&pair.0, &pair.1] {
        for (mp, p) in e.factors() {
            if p.signum() >= 0 {
                continue;
            }
            let zero = match &ic.exact {
                Some(x) => mp.m().eval(x).is_zero(),
                None => mp.m().eval_f64(&ic.values).abs() < 1e-14,
            };
            if zero {
                return Err(Koopman2dError::SingularIc(mp.m().to_string()));
            }
        }
        let exact = match (&ic.exact, e.phi()) {
            (Some(x), Some(r)) => Some(r.eval(x)?),
            _ => None,
        };
        let v = match exact {
            Some(v) => v,
            None => {
                let v = e.eval_f64(&ic.values);
                if !v.is_finite() {
                    return Err(Koopman2dError::NotReal);
                }
                Coefficient::from_f64(v)
            }
        };
        out.push(v);
    }
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    Ok([a, b])
}

/// Pure powers `(var, exponent)` covering the non-constant support of every
/// polynomial, one per variable, or `None`.
fn monomial_basis(polys: &[&Polynomial]) -> Option<[(usize, u32); 2]> {
    let mut pows: [Option<u32>; 2] = [None, None];
    for p in polys {
        for (m, _) in p.terms() {
            if m.is_one() {
                continue;
            }
            let nz: Vec<usize> = (0..2).filter(|&i| m.exponent(i) > 0).collect();
            if nz.len() != 1 {
                return None;
            }
            let (i, e) = (nz[0], m.exponent(nz[0]));
            match pows[i] {
                Some(prev) if prev != e => return None,
                _ => pows[i] = Some(e),
            }
        }
    }
    Some([(0, pows[0]?), (1, pows[1]?)])
}

/// Solve `phi_k * B_k - A_k = 0` (k = 1, 2) for the state monomials by
/// Cramer's rule, when both are affine in one pure power of each variable.
pub fn invert_exact(pair: &Pair) -> Result<Inversion, Koopman2dError> {
    let phis = [pair.0.phi(), pair.1.phi()];
    let [Some(r1), Some(r2)] = phis else {
        return Err(Koopman2dError::NoExactPath("an eigenfunction has non-integer exponents".into()));
    };
    let state_vars = r1.vars().clone();
    if state_vars.len() != 2 {
        return Err(Koopman2dError::Dimension(state_vars.len()));
    }
    let basis = monomial_basis(&[r1.num(), r1.den(), r2.num(), r2.den()]).ok_or_else(|| {
        Koopman2dError::NoExactPath("eigenfunctions are not affine in one power of each variable".into())
    })?;
    let pv = phi_vars();
    let monos: Vec<Monomial> = std::iter::once(Monomial::one(2))
        .chain(basis.iter().map(|&(i, e)| Monomial::var(2, i).pow(e)))
        .collect();
    // c[k][j]: coefficient of monos[j] in phi_k * B_k - A_k
    let c: Vec<Vec<Polynomial>> = [&r1, &r2]
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let phik = Polynomial::var(&pv, k);
            monos
                .iter()
                .map(|m| &phik.scale(&r.den().coeff(m)) - &Polynomial::constant(&pv, r.num().coeff(m)))
                .collect()
        })
        .collect();
    let det = &(&c[0][1] * &c[1][2]) - &(&c[0][2] * &c[1][1]);
    if det.is_zero() {
        return Err(Koopman2dError::Degenerate);
    }
    let u1 = &(&c[0][2] * &c[1][0]) - &(&c[0][0] * &c[1][2]);
    let u2 = &(&c[1][1] * &c[0][0]) - &(&c[0][1] * &c[1][0]);
    let comps = [
        MonomialSolve { var: basis[0].0, power: basis[0].1, value: RationalFunction::new(u1, det.clone())? },
        MonomialSolve { var: basis[1].0, power: basis[1].1, value: RationalFunction::new(u2, det)? },
    ];
    Ok(Inversion { state_vars, comps })
}

/// One state variable as `sign * (num(t) / den(t))^(1/root)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarSolution {
    pub var: usize,
    pub num: ExpPoly,
    pub den: ExpPoly,
    pub root: u32,
    /// Branch for even roots, frozen from the initial condition.
    pub sign: f64,
}

impl VarSolution {
    fn eval(&self, t: f64) -> Result<f64, Koopman2dError> {
        let d = self.den.eval(t);
        if d.norm() <= POLE_TOL * self.den.magnitude(t) {
            return Err(Koopman2dError::Pole { t: refine_pole(&self.den, t) });
        }
        let r = (self.num.eval(t) / d).re;
        Ok(match self.root {
            1 => r,
            m if m % 2 == 0 => {
                if r < -1e-14 * (1.0 + r.abs()) {
                    return Err(Koopman2dError::Domain { t });
                }
                self.sign * r.max(0.0).powf(1.0 / m as f64)
            }
            m => r.signum() * r.abs().powf(1.0 / m as f64),
        })
    }
}

/// Closed-form trajectory through a fixed initial condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormSolution2D {
    pub state_vars: Vars,
    pub comps: Vec<VarSolution>,
    pub pair: Pair,
    pub ic: InitialCondition,
    pub phi0: [Coefficient; 2],
}

impl fmt::Display for ClosedFormSolution2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.comps.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let name = &self.state_vars[c.var];
            let ratio = format!("({}) / ({})", c.num, c.den);
            match c.root {
                1 => write!(f, "{name}(t) = {ratio}")?,
                m if m % 2 == 0 => {
                    let s = if c.sign < 0.0 { "-" } else { "" };
                    write!(f, "{name}(t) = {s}({ratio})^(1/{m})")?
                }
                m => write!(f, "{name}(t) = ({ratio})^(1/{m})")?,
            }
        }
        Ok(())
    }
}

/// Substitute `phi_k(t) = phi_k0 * exp(lambda_k t)` into a polynomial in
/// `(phi1, phi2)`.
fn to_expoly(p: &Polynomial, phi0: &[Coefficient; 2], lambdas: [&Coefficient; 2]) -> ExpPoly {
    ExpPoly::new(p.terms().map(|(m, c)| {
        let (i, j) = (m.exponent(0), m.exponent(1));
        let coeff = c * &(&phi0[0].pow(i) * &phi0[1].pow(j));
        let rate = &lambdas[0].scale_int(&i.into()) + &lambdas[1].scale_int(&j.into());
        (coeff, rate)
    }))
}

pub fn assemble_solution(
    pair: &Pair,
    inv: &Inversion,
    ic: &InitialCondition,
) -> Result<ClosedFormSolution2D, Koopman2dError> {
    let phi0 = map_ic(pair, ic)?;
    let lambdas = [&pair.0.lambda, &pair.1.lambda];
    let mut comps: Vec<VarSolution> = inv
        .comps
        .iter()
        .map(|c| {
            let x0 = ic.values[c.var];
            VarSolution {
                var: c.var,
                num: to_expoly(c.value.num(), &phi0, lambdas),
                den: to_expoly(c.value.den(), &phi0, lambdas),
                root: c.power,
                sign: if x0 < 0.0 { -1.0 } else { 1.0 },
            }
        })
        .collect();
    comps.sort_by_key(|c| c.var);
    if comps.iter().any(|c| c.den.is_zero()) {
        return Err(Koopman2dError::Degenerate);
    }
    Ok(ClosedFormSolution2D { state_vars: inv.state_vars.clone(), comps, pair: pair.clone(), ic: ic.clone(), phi0 })
}

/// `(x(t), y(t))`, or the pole / branch exit encountered at `t`.
pub fn eval_solution(s: &ClosedFormSolution2D, t: f64) -> Result<[f64; 2], Koopman2dError> {
    let mut out = [0.0; 2];
    for c in &s.comps {
        out[c.var] = c.eval(t)?;
    }
    Ok(out)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn refine_pole(den: &ExpPoly, t: f64) -> f64 {
    let h = 1e-6 * (1.0 + t.abs());
    let f = |s: f64| den.eval(s).re;
    if f(t - h).signum() != f(t + h).signum() {
        bisect(f, t - h, t + h)
    } else {
        t
    }
}

/// Sign changes of `f` on `[0, horizon]`, each located by bisection.
fn sign_changes<F: Fn(f64) -> f64>(f: F, horizon: f64) -> Vec<f64> {
    if horizon <= 0.0 {
        return Vec::new();
    }
    let n = ((horizon * SCAN_DENSITY).ceil() as usize).max(64);
    let mut out = Vec::new();
    let mut prev_t = 0.0;
    let mut prev = f(0.0);
    for k in 1..=n {
        let t = horizon * k as f64 / n as f64;
        let v = f(t);
        if v == 0.0 {
            out.push(t);
        } else if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            out.push(bisect(&f, prev_t, t));
        }
        prev_t = t;
        prev = v;
    }
    out
}

fn merge_times(mut ts: Vec<f64>) -> Vec<f64> {
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    ts
}

/// Zeros of the real denominators in `(0, horizon]`.
pub fn pole_times(s: &ClosedFormSolution2D, horizon: f64) -> Vec<f64> {
    let ts = s.comps.iter().flat_map(|c| sign_changes(|t| c.den.eval(t).re, horizon)).collect();
    merge_times(ts)
}

/// Times where an even-root variable crosses zero: the frozen branch stops
/// being valid there.
pub fn branch_crossings(s: &ClosedFormSolution2D, horizon: f64) -> Vec<f64> {
    let ts = s
        .comps
        .iter()
        .filter(|c| c.root % 2 == 0)
        .flat_map(|c| sign_changes(|t| c.num.eval(t).re, horizon))
        .collect();
    merge_times(ts)
}

/// First pole or branch crossing in `(0, horizon]`.
pub fn first_singularity(s: &ClosedFormSolution2D, horizon: f64) -> Option<f64> {
    pole_times(s, horizon).into_iter().chain(branch_crossings(s, horizon)).filter(|t| *t > 0.0).reduce(f64::min)
}

/// Exact path if one exists, numeric inversion otherwise.
#[derive(Clone, Debug)]
pub enum Solution2D {
    Exact(ClosedFormSolution2D),
    Numeric { pair: Pair, ic: InitialCondition, phi0: [Coefficient; 2], reason: String },
}

pub fn solve_2d(pair: &Pair, ic: &InitialCondition) -> Result<Solution2D, Koopman2dError> {
    match invert_exact(pair) {
        Ok(inv) => Ok(Solution2D::Exact(assemble_solution(pair, &inv, ic)?)),
        Err(Koopman2dError::NoExactPath(reason)) => {
            let phi0 = map_ic(pair, ic)?;
            Ok(Solution2D::Numeric { pair: pair.clone(), ic: ic.clone(), phi0, reason })
        }
        Err(e) => Err(e),
    }
}

/// `phi_k0 * exp(lambda_k t)` for both eigenfunctions.
pub fn propagate(pair: &Pair, phi0: &[Coefficient; 2], t: f64) -> [f64; 2] {
    let f = |e: &EigenPair, v: &Coefficient| (v.to_complex() * (e.lambda.to_complex() * t).exp()).re;
    [f(&pair.0, &phi0[0]), f(&pair.1, &phi0[1])]
}

#[cfg(test)]
mod tests;
