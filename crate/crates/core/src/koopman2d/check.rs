//! Closed form against the adaptive integrator on a uniform grid.

use crate::algebra::VectorField;
use crate::numerics::{rk45_field, IntegratorConfig, Termination};

use super::{eval_solution, first_singularity, pole_times, solve_numeric, Koopman2dError, Solution2D};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub t: f64,
    pub analytic: Option<[f64; 2]>,
    pub numeric: Option<[f64; 2]>,
}

impl CheckRow {
    pub fn abs_err(&self) -> Option<[f64; 2]> {
        let (a, n) = (self.analytic?, self.numeric?);
        Some([(a[0] - n[0]).abs(), (a[1] - n[1]).abs()])
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    pub poles: Vec<f64>,
    /// First pole or branch crossing, if any.
    pub singularity: Option<f64>,
    pub termination: Termination,
    pub rk_last_time: f64,
    /// Comparison window `[0, window_end]`: the horizon, or 0.8 times the
    /// first singularity.
    pub window_end: f64,
    /// Largest componentwise error over grid points in the window.
    pub max_err: f64,
}

/// Compare on `n + 1` equally spaced times in `[0, horizon]`.
pub fn check_against_rk45(
    field: &VectorField,
    sol: &Solution2D,
    horizon: f64,
    cfg: &IntegratorConfig,
    n: usize,
) -> Result<CheckReport, Koopman2dError> {
    let times: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n.max(1) as f64).collect();
    let (analytic, poles, singularity, x0) = match sol {
        Solution2D::Exact(s) => {
            let a: Vec<Option<[f64; 2]>> = times.iter().map(|&t| eval_solution(s, t).ok()).collect();
            let x0 = [s.ic.values[0], s.ic.values[1]];
            (a, pole_times(s, horizon), first_singularity(s, horizon), x0)
        }
        Solution2D::Numeric { pair, ic, phi0, .. } => {
            let x0 = [ic.values[0], ic.values[1]];
            let (pts, fail) = solve_numeric(pair, x0, phi0, &times);
            let mut a: Vec<Option<[f64; 2]>> = pts.into_iter().map(Some).collect();
            a.resize(times.len(), None);
            (a, Vec::new(), fail.map(|(t, _)| t), x0)
        }
    };
    let cfg = IntegratorConfig { horizon, dense: true, ..cfg.clone() };
    let traj = rk45_field(field, &x0, &cfg)?;
    let window_end = singularity.map_or(horizon, |s| (0.8 * s).min(horizon));
    let mut max_err: f64 = 0.0;
    let rows: Vec<CheckRow> = times
        .iter()
        .zip(analytic)
        .map(|(&t, a)| {
            let num = traj.eval(t).map(|v| [v[0], v[1]]);
            let row = CheckRow { t, analytic: a, numeric: num };
            if t <= window_end {
                if let Some(e) = row.abs_err() {
                    max_err = max_err.max(e[0]).max(e[1]);
                }
            }
            row
        })
        .collect();
    Ok(CheckReport {
        rows,
        poles,
        singularity,
        termination: traj.termination,
        rk_last_time: traj.last_time(),
        window_end,
        max_err,
    })
}
