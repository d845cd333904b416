//! Fixed points by resultant elimination, numeric roots and Newton polish.

use num_complex::Complex64;

use crate::algebra::gcd::{gcd, squarefree_univariate};
use crate::algebra::{Coefficient, Field, Polynomial, VectorField};
use crate::numerics::eig::{eig2x2_exact, eig2x2_numeric, Eig2Exact};
use crate::numerics::newton::newton_polynomial_system;
use crate::numerics::resultant::sylvester_resultant;
use crate::numerics::roots::roots_univariate_numeric;

use super::rational::{rationalize_complex, DEFAULT_DEN_BOUND};
use super::ManifoldError;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const DEDUP_TOL: f64 = 1e-9;
const IMAG_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub coords: Vec<Complex64>,
    /// Exact coordinates, verified `F(P) = 0`.
    pub exact: Option<Vec<Coefficient>>,
    /// Jacobian eigenvalues; eigenvectors below are paired by index.
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub exact_eigen: Option<Eig2Exact>,
    /// `max_i |F_i(P)|` after polishing.
    pub residual: f64,
    /// Exactly or numerically singular Jacobian.
    pub degenerate: bool,
}

impl FixedPoint {
    pub fn is_real(&self) -> bool {
        self.coords.iter().all(|z| z.im.abs() <= IMAG_TOL * z.re.abs().max(1.0))
    }

    pub fn real_coords(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.re).collect()
    }
}

/// Fixed points of `field` with coordinates reconstructed in the field of
/// its coefficients.
pub fn fixed_points(field: &VectorField) -> Result<Vec<FixedPoint>, ManifoldError> {
    let f = field.field()?.ok_or(crate::algebra::AlgebraError::NotExact)?;
    fixed_points_in(field, f)
}

/// Fixed points with exact reconstruction attempted in `ambient`.
pub fn fixed_points_in(field: &VectorField, ambient: Field) -> Result<Vec<FixedPoint>, ManifoldError> {
    if field.field()?.is_none() {
        return Err(crate::algebra::AlgebraError::NotExact.into());
    }
    let raw = match field.dim() {
        1 => roots_1d(field.component(0))?,
        2 => roots_2d(field)?,
        n => return Err(ManifoldError::Dimension(n)),
    };
    let mut pts: Vec<FixedPoint> = raw.into_iter().map(|(p, r)| describe(field, ambient, p, r)).collect();
    pts.sort_by(|a, b| {
        let key = |p: &FixedPoint| {
            let mut k = vec![if p.is_real() { 0.0 } else { 1.0 }];
            for z in &p.coords {
                k.push(z.re);
                k.push(z.im);
            }
            k
        };
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(pts)
}

fn complex_coeffs(coeffs: &[Polynomial]) -> Vec<Complex64> {
    coeffs.iter().map(|c| c.constant_term().to_complex()).collect()
}

fn push_unique(out: &mut Vec<(Vec<Complex64>, f64)>, p: Vec<Complex64>, r: f64) {
    let close = |q: &Vec<Complex64>| {
        q.iter().zip(&p).all(|(a, b)| (a - b).norm() <= DEDUP_TOL * a.norm().max(1.0))
    };
    match out.iter_mut().find(|(q, _)| close(q)) {
        Some(slot) if r < slot.1 => *slot = (p, r),
        Some(_) => {}
        None => out.push((p, r)),
    }
}

fn roots_1d(f: &Polynomial) -> Result<Vec<(Vec<Complex64>, f64)>, ManifoldError> {
    if f.is_zero() {
        return Err(ManifoldError::NonIsolated);
    }
    if f.is_constant() {
        return Ok(Vec::new());
    }
    let sf = squarefree_univariate(f, 0)?;
    let roots = roots_univariate_numeric(&complex_coeffs(&sf.coeffs_in(0)))?;
    let mut out = Vec::new();
    for z in roots {
        let (p, r) = newton_polynomial_system(std::slice::from_ref(f), &[z], 30);
        let (p, r) = if r <= RESIDUAL_TOL { (p, r) } else { (vec![z], f.eval_complex(&[z]).norm()) };
        if r <= RESIDUAL_TOL {
            push_unique(&mut out, p, r);
        }
    }
    Ok(out)
}

/// Numeric coefficients of `p(xi, y)` in `y`, trailing negligible terms cut.
fn specialize(p: &Polynomial, xi: Complex64) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = p.coeffs_in(1).iter().map(|q| q.eval_complex(&[xi, Complex64::new(0.0, 0.0)])).collect();
    let scale = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    while c.last().is_some_and(|z| z.norm() <= 1e-12 * scale) {
        c.pop();
    }
    c
}

fn roots_2d(field: &VectorField) -> Result<Vec<(Vec<Complex64>, f64)>, ManifoldError> {
    let (f1, f2) = (field.component(0), field.component(1));
    if f1.is_zero() || f2.is_zero() {
        return Err(ManifoldError::NonIsolated);
    }
    let g = gcd(f1, f2)?;
    if !g.is_constant() {
        return Err(ManifoldError::NonIsolated);
    }
    if !f1.uses_var(1) && !f2.uses_var(1) {
        // coprime polynomials in x alone have no common root
        return Ok(Vec::new());
    }
    let res = sylvester_resultant(f1, f2, 1)?;
    if res.is_zero() {
        return Err(ManifoldError::NonIsolated);
    }
    if res.is_constant() {
        return Ok(Vec::new());
    }
    let sf = squarefree_univariate(&res, 0)?;
    let xs = roots_univariate_numeric(&complex_coeffs(&sf.coeffs_in(0)))?;
    let comps = field.components();
    let mut out = Vec::new();
    for xi in xs {
        let mut ys = Vec::new();
        for p in [f1, f2] {
            let c = specialize(p, xi);
            if c.len() >= 2 {
                ys.extend(roots_univariate_numeric(&c)?);
            }
        }
        for eta in ys {
            let (p, r) = newton_polynomial_system(comps, &[xi, eta], 30);
            if r <= RESIDUAL_TOL {
                push_unique(&mut out, p, r);
            }
        }
    }
    Ok(out)
}

fn describe(field: &VectorField, ambient: Field, coords: Vec<Complex64>, residual: f64) -> FixedPoint {
    let exact = coords
        .iter()
        .map(|z| rationalize_complex(*z, ambient, DEFAULT_DEN_BOUND))
        .collect::<Option<Vec<_>>>()
        .filter(|pt| field.components().iter().all(|c| c.eval(pt).is_zero()));
    let (coords, residual) = match &exact {
        Some(pt) => (pt.iter().map(|c| c.to_complex()).collect(), 0.0),
        None => (coords, residual),
    };
    let jac = field.jacobian();
    let mut fp = FixedPoint {
        coords,
        exact,
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
        exact_eigen: None,
        residual,
        degenerate: false,
    };
    if field.dim() == 1 {
        let d = jac[0][0].eval_complex(&fp.coords);
        fp.eigenvalues = vec![d];
        fp.eigenvectors = vec![vec![Complex64::new(1.0, 0.0)]];
        fp.degenerate = match &fp.exact {
            Some(pt) => jac[0][0].eval(pt).is_zero(),
            None => d.norm() < DEDUP_TOL,
        };
        return fp;
    }
    if let Some(pt) = &fp.exact {
        let j = [
            [jac[0][0].eval(pt), jac[0][1].eval(pt)],
            [jac[1][0].eval(pt), jac[1][1].eval(pt)],
        ];
        let det = &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0]);
        fp.degenerate = det.is_zero();
        fp.exact_eigen = eig2x2_exact(&j, ambient, false);
    }
    if fp.is_real() {
        let x = fp.real_coords();
        let j = [
            [jac[0][0].eval_f64(&x), jac[0][1].eval_f64(&x)],
            [jac[1][0].eval_f64(&x), jac[1][1].eval_f64(&x)],
        ];
        let e = eig2x2_numeric(j);
        if fp.exact.is_none() {
            let scale = j.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            fp.degenerate = (j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs() <= 1e-12 * scale * scale;
        }
        fp.eigenvalues = e.values;
        fp.eigenvectors = e.vectors.into_iter().map(|v| v.to_vec()).collect();
    }
    fp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars_from;
    use crate::manifold::tests::field;

    fn exact_set(pts: &[FixedPoint]) -> Vec<Vec<String>> {
        pts.iter()
            .map(|p| p.exact.as_ref().unwrap().iter().map(|c| c.to_string()).collect())
            .collect()
    }

    #[test]
    fn example_one_points() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x*y", "y^2 - x - 1"]);
        let pts = fixed_points(&f).unwrap();
        assert_eq!(exact_set(&pts), vec![vec!["-1", "0"], vec!["0", "-1"], vec!["0", "1"]]);
    }

    #[test]
    fn linear_origin() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x - y", "-2*x"]);
        let pts = fixed_points(&f).unwrap();
        assert_eq!(exact_set(&pts), vec![vec!["0", "0"]]);
        let e = pts[0].exact_eigen.as_ref().unwrap();
        assert_eq!(e.values, vec![Coefficient::from_int(2), Coefficient::from_int(-1)]);
    }

    #[test]
    fn example_two_points() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x - x*y", "-x - y - y^2"]);
        let pts = fixed_points(&f).unwrap();
        let s = exact_set(&pts);
        assert!(s.contains(&vec!["0".to_string(), "0".to_string()]));
        assert!(s.contains(&vec!["0".to_string(), "-1".to_string()]));
        assert!(s.contains(&vec!["-2".to_string(), "1".to_string()]));
        for p in &pts {
            let r = f.components().iter().map(|c| c.eval_complex(&p.coords).norm()).fold(0.0, f64::max);
            assert!(r <= RESIDUAL_TOL);
        }
    }

    #[test]
    fn sqrt_two_points_need_field() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x - y - x^2", "-x - y - x*y"]);
        let pts = fixed_points(&f).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts.iter().filter(|p| p.exact.is_some()).count(), 1);
        let pts = fixed_points_in(&f, Field::Quadratic(2)).unwrap();
        assert!(pts.iter().all(|p| p.exact.is_some()));
    }

    #[test]
    fn complex_and_nonisolated() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x^2 + 1", "y"]);
        let pts = fixed_points(&f).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| !p.is_real()));
        let f = field(&v, &["x*y", "x*(y - 1)"]);
        assert_eq!(fixed_points(&f), Err(ManifoldError::NonIsolated));
    }

    #[test]
    fn one_dimensional() {
        let v = vars_from(&["x"]);
        let f = field(&v, &["-x^3 + x"]);
        let pts = fixed_points(&f).unwrap();
        let xs: Vec<String> = pts.iter().map(|p| p.exact.as_ref().unwrap()[0].to_string()).collect();
        assert_eq!(xs, vec!["-1", "0", "1"]);
    }
}
