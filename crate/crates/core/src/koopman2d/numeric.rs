//! Newton inversion of `(x, y) -> (phi1, phi2)` when no exact path exists.

use crate::eigen::EigenPair;
use crate::numerics::newton_polish;

use super::{propagate, Koopman2dError, Pair};
use crate::algebra::Coefficient;

const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 60;

/// Gradient of `phi = prod M_i^{p_i}` from `phi * sum p_i grad(M_i) / M_i`.
fn grad(e: &EigenPair, x: &[f64]) -> [f64; 2] {
    let phi = e.eval_f64(x);
    let mut g = [0.0; 2];
    for (mp, p) in e.factors() {
        let m = mp.m().eval_f64(x);
        let p = p.to_f64().unwrap_or(f64::NAN);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += p * mp.m().partial(j).eval_f64(x) / m;
        }
    }
    [phi * g[0], phi * g[1]]
}

/// Point near `prev` where `(phi1, phi2) = v`.
pub fn invert_numeric(pair: &Pair, v: [f64; 2], prev: [f64; 2]) -> Result<[f64; 2], Koopman2dError> {
    let scale = [v[0].abs().max(1.0), v[1].abs().max(1.0)];
    let f = |x: &[f64]| vec![(pair.0.eval_f64(x) - v[0]) / scale[0], (pair.1.eval_f64(x) - v[1]) / scale[1]];
    let jac = |x: &[f64]| {
        let (a, b) = (grad(&pair.0, x), grad(&pair.1, x));
        vec![vec![a[0] / scale[0], a[1] / scale[0]], vec![b[0] / scale[1], b[1] / scale[1]]]
    };
    let x = newton_polish(f, jac, &prev, RESIDUAL_TOL, MAX_ITER)?;
    Ok([x[0], x[1]])
}

/// Trajectory on `times` by continuation from the initial condition. The
/// first failure ends the run; later entries are absent.
pub fn solve_numeric(
    pair: &Pair,
    x0: [f64; 2],
    phi0: &[Coefficient; 2],
    times: &[f64],
) -> (Vec<[f64; 2]>, Option<(f64, Koopman2dError)>) {
    let mut out = Vec::with_capacity(times.len());
    let mut prev = x0;
    for &t in times {
        match invert_numeric(pair, propagate(pair, phi0, t), prev) {
            Ok(p) => {
                out.push(p);
                prev = p;
            }
            Err(e) => return (out, Some((t, e))),
        }
    }
    (out, None)
}
