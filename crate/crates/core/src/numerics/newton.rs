//! Newton iterations for small nonlinear systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::Polynomial;

use super::NumericsError;

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton on `f(x) = 0` with Jacobian `jac`. Each step is halved up to
/// ten times until the residual decreases.
pub fn newton_polish<F, J>(f: F, jac: J, guess: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>, NumericsError>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Vec<Vec<f64>>,
{
    let n = guess.len();
    let mut x = guess.to_vec();
    let mut r = f(&x);
    let mut rn = norm_inf(&r);
    for _ in 0..=max_iter {
        if rn < tol {
            return Ok(x);
        }
        let jm = jac(&x);
        let a = DMatrix::from_fn(n, n, |i, j| jm[i][j]);
        let b = DVector::from_iterator(n, r.iter().map(|v| -v));
        let Some(dx) = a.lu().solve(&b) else {
            return Err(NumericsError::SingularJacobian);
        };
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=10 {
            let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(xi, d)| xi + step * d).collect();
            let rc = f(&cand);
            let rcn = norm_inf(&rc);
            if rcn.is_finite() && rcn < rn {
                x = cand;
                r = rc;
                rn = rcn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if rn < tol {
        Ok(x)
    } else {
        Err(NumericsError::NoConvergence { residual: rn })
    }
}

/// Complex Newton for a square polynomial system; returns the polished point
/// and its residual.
pub fn newton_polynomial_system(
    system: &[Polynomial],
    guess: &[Complex64],
    max_iter: usize,
) -> (Vec<Complex64>, f64) {
    let n = guess.len();
    let jac: Vec<Vec<Polynomial>> = system.iter().map(|p| (0..n).map(|j| p.partial(j)).collect()).collect();
    let eval = |x: &[Complex64]| -> Vec<Complex64> { system.iter().map(|p| p.eval_complex(x)).collect() };
    let res = |v: &[Complex64]| v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut x = guess.to_vec();
    let mut r = eval(&x);
    let mut rn = res(&r);
    for _ in 0..max_iter {
        if rn == 0.0 {
            break;
        }
        let a = DMatrix::from_fn(n, n, |i, j| jac[i][j].eval_complex(&x));
        let b = DVector::from_iterator(n, r.iter().map(|v| -v));
        let Some(dx) = a.lu().solve(&b) else { break };
        let cand: Vec<Complex64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d).collect();
        let rc = eval(&cand);
        let rcn = res(&rc);
        if !(rcn < rn) {
            break;
        }
        x = cand;
        r = rc;
        rn = rcn;
    }
    (x, rn)
}
