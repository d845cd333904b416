//! Darboux polynomial search by residual minimization.
//!
//! For coefficients `m` of `M` the best cofactor `n` is a linear
//! least-squares solve, leaving the variable-projection objective
//! `g(m) = |L m - B(m) n*|^2 / |m_nonconst|^2`, where `L` maps `M` to
//! `Lie(M)` and `B(m) n` is the product `M*N` in coefficient space.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::linalg::nullspace;
use crate::algebra::monomial::monomials_up_to;
use crate::algebra::{Coefficient, Field, Matrix, Monomial, Polynomial, VectorField};

use super::rational::{rationalize, DEFAULT_DEN_BOUND};
use super::{dedup_pairs, lie_derivative, ManifoldError, ManifoldPair, Provenance};

pub const ACCEPT_RESIDUAL: f64 = 1e-10;
/// BFGS endpoints below this go on to Gauss-Newton polishing.
const POLISH_GATE: f64 = 1e-3;
const BFGS_ITERS: usize = 400;

#[derive(Clone, Debug)]
pub struct AnsatzOptions {
    pub max_deg: u32,
    pub attempts: usize,
    pub seed: u64,
    /// Field for rationalized coefficients.
    pub field: Field,
    pub den_bound: i64,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        AnsatzOptions { max_deg: 2, attempts: 48, seed: 0, field: Field::Rational, den_bound: DEFAULT_DEN_BOUND }
    }
}

struct Problem {
    k: usize,
    kn: usize,
    r: usize,
    /// Row-major `r x k`.
    l: Vec<f64>,
    /// `prod[i*kn + j]`: output row of `mons_m[i] * mons_n[j]`.
    prod: Vec<usize>,
    nonconst: Vec<bool>,
    mons_m: Vec<Monomial>,
    mons_n: Vec<Monomial>,
    mons_r: Vec<Monomial>,
    lie_exact: Vec<Polynomial>,
}

struct Eval {
    g: f64,
    grad: Vec<f64>,
    n: Vec<f64>,
}

impl Problem {
    fn new(field: &VectorField, deg: u32) -> Result<Self, ManifoldError> {
        let dim = field.dim();
        let deg_f = field.degree().max(1);
        let mons_m = monomials_up_to(dim, deg);
        let mons_n = monomials_up_to(dim, deg_f - 1);
        let mons_r = monomials_up_to(dim, deg + deg_f - 1);
        let index: HashMap<&Monomial, usize> = mons_r.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let (k, kn, r) = (mons_m.len(), mons_n.len(), mons_r.len());
        let mut l = vec![0.0; r * k];
        let mut lie_exact = Vec::with_capacity(k);
        for (i, mono) in mons_m.iter().enumerate() {
            let lie = lie_derivative(&Polynomial::monomial(field.vars(), mono.clone(), Coefficient::one()), field)?;
            for (t, c) in lie.terms() {
                let v = c.to_f64().ok_or_else(|| ManifoldError::Invalid("ansatz search needs real coefficients".into()))?;
                l[index[t] * k + i] = v;
            }
            lie_exact.push(lie);
        }
        let mut prod = vec![0; k * kn];
        for (i, a) in mons_m.iter().enumerate() {
            for (j, b) in mons_n.iter().enumerate() {
                prod[i * kn + j] = index[&a.mul(b)];
            }
        }
        let nonconst = mons_m.iter().map(|m| !m.is_one()).collect();
        Ok(Problem { k, kn, r, l, prod, nonconst, mons_m, mons_n, mons_r, lie_exact })
    }

    fn lie_times(&self, m: &[f64]) -> Vec<f64> {
        (0..self.r).map(|row| (0..self.k).map(|i| self.l[row * self.k + i] * m[i]).sum()).collect()
    }

    fn norm_nc(&self, m: &[f64]) -> f64 {
        m.iter().zip(&self.nonconst).filter(|(_, nc)| **nc).map(|(v, _)| v * v).sum()
    }

    /// Residual `L m - M*N` for given `m` and `n`.
    fn residual(&self, m: &[f64], n: &[f64]) -> Vec<f64> {
        let mut r = self.lie_times(m);
        for i in 0..self.k {
            for j in 0..self.kn {
                r[self.prod[i * self.kn + j]] -= m[i] * n[j];
            }
        }
        r
    }

    fn eval(&self, m: &[f64]) -> Eval {
        let (k, kn) = (self.k, self.kn);
        let lm = self.lie_times(m);
        // normal equations for n: (B^T B) n = B^T L m
        let mut a = vec![0.0; kn * kn];
        let mut b = vec![0.0; kn];
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(k); kn];
        for i in 0..k {
            if m[i] != 0.0 {
                for j in 0..kn {
                    cols[j].push((self.prod[i * kn + j], m[i]));
                }
            }
        }
        for j in 0..kn {
            b[j] = cols[j].iter().map(|(row, v)| v * lm[*row]).sum();
            for jj in j..kn {
                // columns j and jj overlap only where their rows coincide
                let mut s = 0.0;
                for (ra, va) in &cols[j] {
                    for (rb, vb) in &cols[jj] {
                        if ra == rb {
                            s += va * vb;
                        }
                    }
                }
                a[j * kn + jj] = s;
                a[jj * kn + j] = s;
            }
        }
        let trace: f64 = (0..kn).map(|j| a[j * kn + j]).sum();
        for j in 0..kn {
            a[j * kn + j] += 1e-15 * trace.max(1e-300);
        }
        let n = solve_dense(a, b, kn);
        let r = self.residual(m, &n);
        let h: f64 = r.iter().map(|v| v * v).sum();
        let s = self.norm_nc(m).max(1e-300);
        let mut grad = vec![0.0; k];
        for i in 0..k {
            let mut gi: f64 = (0..self.r).map(|row| self.l[row * k + i] * r[row]).sum();
            for j in 0..kn {
                gi -= n[j] * r[self.prod[i * kn + j]];
            }
            let mut v = 2.0 * gi / s;
            if self.nonconst[i] {
                v -= h * 2.0 * m[i] / (s * s);
            }
            grad[i] = v;
        }
        Eval { g: h / s, grad, n }
    }

    fn bfgs(&self, start: Vec<f64>) -> (Vec<f64>, f64) {
        let k = self.k;
        let mut x = start;
        let mut e = self.eval(&x);
        let mut hinv = identity(k);
        let mut first = true;
        for _ in 0..BFGS_ITERS {
            if e.g < 1e-26 {
                break;
            }
            let mut d: Vec<f64> = (0..k).map(|i| -(0..k).map(|j| hinv[i * k + j] * e.grad[j]).sum::<f64>()).collect();
            let mut slope: f64 = d.iter().zip(&e.grad).map(|(a, b)| a * b).sum();
            if !(slope < 0.0) {
                hinv = identity(k);
                d = e.grad.iter().map(|v| -v).collect();
                slope = -e.grad.iter().map(|v| v * v).sum::<f64>();
                if slope == 0.0 {
                    break;
                }
            }
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..50 {
                let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
                let en = self.eval(&xn);
                if en.g.is_finite() && en.g <= e.g + 1e-4 * alpha * slope {
                    accepted = Some((xn, en));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((xn, en)) = accepted else { break };
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = en.grad.iter().zip(&e.grad).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let step: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            let xnorm: f64 = xn.iter().map(|v| v * v).sum::<f64>().sqrt();
            // rescale so that |m_nonconst| = 1, which keeps the Hessian model meaningful
            let scale = 1.0 / self.norm_nc(&xn).sqrt();
            x = xn.iter().map(|v| v * scale).collect();
            e = self.eval(&x);
            if sy > 1e-300 {
                let s: Vec<f64> = s.iter().map(|v| v * scale).collect();
                let y: Vec<f64> = y.iter().map(|v| v / scale).collect();
                if first {
                    let yy: f64 = y.iter().map(|v| v * v).sum();
                    let gamma = sy / yy;
                    hinv = identity(k).into_iter().map(|v| v * gamma).collect();
                    first = false;
                }
                bfgs_update(&mut hinv, &s, &y, k);
            }
            if step <= 1e-15 * xnorm.max(1.0) {
                break;
            }
        }
        (x, e.g)
    }

    /// Gauss-Newton on the joint residual in `(m, n)` with the largest
    /// nonconstant coefficient of `m` pinned to one.
    fn polish(&self, m: &[f64], n: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let (k, kn) = (self.k, self.kn);
        let pivot = (0..k)
            .filter(|&i| self.nonconst[i])
            .max_by(|&a, &b| m[a].abs().partial_cmp(&m[b].abs()).unwrap())
            .unwrap();
        let mut m: Vec<f64> = m.iter().map(|v| v / m[pivot]).collect();
        let mut n = n.to_vec();
        let free: Vec<usize> = (0..k).filter(|&i| i != pivot).collect();
        let cols = free.len() + kn;
        let mut r = self.residual(&m, &n);
        let mut rn: f64 = r.iter().map(|v| v * v).sum();
        for _ in 0..30 {
            if rn < 1e-30 {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(self.r, cols);
            for (c, &i) in free.iter().enumerate() {
                for row in 0..self.r {
                    jac[(row, c)] = self.l[row * k + i];
                }
                for j in 0..kn {
                    jac[(self.prod[i * kn + j], c)] -= n[j];
                }
            }
            for j in 0..kn {
                for i in 0..k {
                    jac[(self.prod[i * kn + j], free.len() + j)] -= m[i];
                }
            }
            let rhs = DVector::from_iterator(self.r, r.iter().map(|v| -v));
            let Ok(delta) = jac.svd(true, true).solve(&rhs, 1e-13) else { break };
            let mut mc = m.clone();
            for (c, &i) in free.iter().enumerate() {
                mc[i] += delta[c];
            }
            let nc: Vec<f64> = n.iter().enumerate().map(|(j, v)| v + delta[free.len() + j]).collect();
            let rc = self.residual(&mc, &nc);
            let rcn: f64 = rc.iter().map(|v| v * v).sum();
            if !(rcn < rn) {
                break;
            }
            m = mc;
            n = nc;
            r = rc;
            rn = rcn;
        }
        let g = rn / self.norm_nc(&m).max(1e-300);
        (m, n, g)
    }

    fn poly_from(&self, vars: &crate::algebra::Vars, mons: &[Monomial], coeffs: &[Coefficient]) -> Polynomial {
        Polynomial::from_terms(vars, mons.iter().cloned().zip(coeffs.iter().cloned()))
    }

    /// All Darboux polynomials of this degree bound with cofactor `nc`:
    /// the exact nullspace of `M -> Lie(M) - M*N`.
    fn exact_family(&self, vars: &crate::algebra::Vars, nc: &Polynomial) -> Vec<Polynomial> {
        let index: HashMap<&Monomial, usize> = self.mons_r.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = Matrix::zeros(self.r, self.k);
        for (i, mono) in self.mons_m.iter().enumerate() {
            let col = self.lie_exact[i].try_sub(&nc.mul_monomial(mono, &Coefficient::one())).expect("shared variables");
            for (t, c) in col.terms() {
                match index.get(t) {
                    Some(&row) => mat[(row, i)] = c.clone(),
                    None => return Vec::new(),
                }
            }
        }
        nullspace(&mat).iter().map(|v| self.poly_from(vars, &self.mons_m, v)).collect()
    }
}

fn identity(k: usize) -> Vec<f64> {
    let mut h = vec![0.0; k * k];
    for i in 0..k {
        h[i * k + i] = 1.0;
    }
    h
}

fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], k: usize) {
    let rho = 1.0 / s.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let hy: Vec<f64> = (0..k).map(|i| (0..k).map(|j| h[i * k + j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..k {
        for j in 0..k {
            h[i * k + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Vec<f64> {
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap()).unwrap();
        if a[p * n + col] == 0.0 {
            continue;
        }
        if p != col {
            for c in 0..n {
                a.swap(p * n + c, col * n + c);
            }
            b.swap(p, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f != 0.0 {
                for c in col..n {
                    a[row * n + c] -= f * a[col * n + c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let d = a[row * n + row];
        if d == 0.0 {
            continue;
        }
        let s: f64 = (row + 1..n).map(|c| a[row * n + c] * x[c]).sum();
        x[row] = (b[row] - s) / d;
    }
    x
}

fn start_vector(seed: u64, deg: u32, attempt: usize, k: usize) -> Vec<f64> {
    let mix = seed ^ (u64::from(deg) << 48) ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mix);
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Multi-start search for Darboux polynomials of degree `1..=max_deg`.
///
/// Converged minima are made exact by rationalizing the cofactor and taking
/// the exact nullspace of `M -> Lie(M) - M*N`; if that fails, the
/// coefficients of `M` themselves are rationalized. Only exactly verified
/// pairs are returned, without associates or products of lower-degree finds.
pub fn discover_ansatz(field: &VectorField, opts: &AnsatzOptions) -> Result<Vec<ManifoldPair>, ManifoldError> {
    if !(1..=4).contains(&opts.max_deg) {
        return Err(ManifoldError::Invalid(format!("max degree {} outside 1..=4", opts.max_deg)));
    }
    let vars = field.vars().clone();
    let mut found: Vec<ManifoldPair> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for deg in 1..=opts.max_deg {
        let prob = Problem::new(field, deg)?;
        let minima: Vec<(Vec<f64>, Vec<f64>)> = (0..opts.attempts)
            .into_par_iter()
            .filter_map(|a| {
                let (m, g) = prob.bfgs(start_vector(opts.seed, deg, a, prob.k));
                if !(g < POLISH_GATE) {
                    return None;
                }
                let n = prob.eval(&m).n;
                let (m, n, g) = prob.polish(&m, &n);
                (g < ACCEPT_RESIDUAL).then_some((m, n))
            })
            .collect();
        let mut tried_n: BTreeSet<String> = BTreeSet::new();
        for (m, n) in minima {
            let mut cands = Vec::new();
            let nc: Option<Vec<Coefficient>> = n.iter().map(|v| rationalize(*v, opts.field, opts.den_bound)).collect();
            if let Some(nc) = nc {
                let np = prob.poly_from(&vars, &prob.mons_n, &nc);
                if tried_n.insert(np.to_string()) {
                    cands.extend(prob.exact_family(&vars, &np));
                } else {
                    continue;
                }
            }
            if cands.is_empty() {
                let mc: Option<Vec<Coefficient>> = m.iter().map(|v| rationalize(*v, opts.field, opts.den_bound)).collect();
                if let Some(mc) = mc {
                    cands.push(prob.poly_from(&vars, &prob.mons_m, &mc));
                }
            }
            for c in cands {
                if c.is_constant() {
                    continue;
                }
                let c = c.canonical();
                if !seen.insert(c.to_string()) {
                    continue;
                }
                if let Some(pair) = ManifoldPair::verify(&c, field, Provenance::AnsatzDiscovered)? {
                    found.push(pair);
                }
            }
        }
    }
    let mut out = dedup_pairs(found);
    out.sort_by(|a, b| a.m().degree().cmp(&b.m().degree()).then_with(|| a.m().to_string().cmp(&b.m().to_string())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars_from;
    use crate::manifold::tests::{field, poly};

    fn ms(p: &[ManifoldPair]) -> Vec<String> {
        p.iter().map(|p| p.m().to_string()).collect()
    }

    #[test]
    fn decoupled_linear() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x", "y"]);
        let found = discover_ansatz(&f, &AnsatzOptions { max_deg: 1, attempts: 8, ..Default::default() }).unwrap();
        assert_eq!(ms(&found), vec!["x", "y"]);
        for p in &found {
            assert_eq!(p.n(), &poly(&v, "1"));
        }
    }

    #[test]
    fn quadratic_manifolds() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x - x*y", "-y + x^2 - 2*y^2"]);
        let found = discover_ansatz(&f, &AnsatzOptions::default()).unwrap();
        let got = ms(&found);
        for want in ["x^2 - 3*y", "x^2 - 2*y - 1"] {
            assert!(got.contains(&want.to_string()), "{want} missing from {got:?}");
        }
        for p in &found {
            assert!(p.check(&f).unwrap());
        }
    }

    #[test]
    fn deterministic() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x*y", "y^2 - x - 1"]);
        let o = AnsatzOptions { seed: 11, ..Default::default() };
        let a = discover_ansatz(&f, &o).unwrap();
        let b = discover_ansatz(&f, &o).unwrap();
        assert_eq!(a, b);
        let got = ms(&a);
        for want in ["x", "y - x - 1", "y + x + 1"] {
            assert!(got.contains(&want.to_string()), "{want} missing from {got:?}");
        }
    }
}
