//! Dormand–Prince 5(4) with a PI step-size controller and dense output.

use crate::algebra::poly::RealPoly;
use crate::algebra::VectorField;

use super::NumericsError;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
pub const DIVERGENCE: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub horizon: f64,
    pub dense: bool,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            horizon: 1.0,
            dense: false,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn new(horizon: f64, rtol: f64, atol: f64) -> Self {
        IntegratorConfig { horizon, rtol, atol, ..Default::default() }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        let ok = self.rtol > 0.0
            && self.rtol < 1.0
            && self.atol > 0.0
            && self.atol < 1.0
            && self.horizon >= 0.0
            && self.horizon.is_finite()
            && self.max_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(NumericsError::BadConfig(format!("{self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Horizon,
    StepUnderflow,
    /// Some component exceeded `1e12` in magnitude, or became non-finite.
    Divergence,
    StepLimit,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Horizon => "horizon",
            Termination::StepUnderflow => "step-underflow",
            Termination::Divergence => "divergence",
            Termination::StepLimit => "step-limit",
        })
    }
}

/// Accepted steps of an integration. `dense[k]` interpolates on
/// `[times[k], times[k+1]]` when dense output was requested.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
    dense: Vec<[Vec<f64>; 5]>,
}

impl Trajectory {
    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("at least the initial point")
    }

    pub fn has_dense(&self) -> bool {
        !self.dense.is_empty() || self.times.len() == 1
    }

    /// Interpolated state at `t` within the integrated range.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let first = self.times[0];
        let last = self.last_time();
        if t < first || t > last || !self.has_dense() {
            return None;
        }
        if self.times.len() == 1 {
            return Some(self.states[0].clone());
        }
        let k = match self.times.binary_search_by(|s| s.partial_cmp(&t).expect("finite")) {
            Ok(k) => return Some(self.states[k].clone()),
            Err(k) => k - 1,
        };
        let h = self.times[k + 1] - self.times[k];
        let s = (t - self.times[k]) / h;
        let s1 = 1.0 - s;
        let c = &self.dense[k];
        Some(
            (0..c[0].len())
                .map(|i| c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i]))))
                .collect(),
        )
    }
}

fn err_norm(err: &[f64], y0: &[f64], y1: &[f64], cfg: &IntegratorConfig) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..err.len() {
        let sc = cfg.atol + cfg.rtol * y0[i].abs().max(y1[i].abs());
        m = m.max((err[i] / sc).abs());
    }
    m
}

fn rms_norm(v: &[f64], y0: &[f64], cfg: &IntegratorConfig) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter()
        .zip(y0)
        .map(|(a, y)| {
            let sc = cfg.atol + cfg.rtol * y.abs();
            (a / sc).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt()
}

fn initial_step<F: FnMut(&[f64], &mut [f64])>(f: &mut F, y0: &[f64], f0: &[f64], cfg: &IntegratorConfig) -> f64 {
    let d0 = rms_norm(y0, y0, cfg);
    let d1 = rms_norm(f0, y0, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, k)| y + h0 * k).collect();
    let mut f1 = vec![0.0; y0.len()];
    f(&y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_norm(&diff, y0, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(cfg.max_step)
}

/// A polynomial field forces the step size to zero only near a movable
/// singularity. When the step floor is hit while the state is large and its
/// local time scale `|y| / |y'|` has collapsed, the trajectory is escaping to
/// infinity faster than the step floor can follow.
fn escaping(y: &[f64], dy: &[f64], horizon: f64) -> bool {
    let ny = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nd = dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ny > 1e3 && nd > 0.0 && ny / nd < 1e-6 * horizon
}

/// Integrate the autonomous system `y' = f(y)` from `t = 0`.
pub fn rk45<F: FnMut(&[f64], &mut [f64])>(
    mut f: F,
    y0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, NumericsError> {
    cfg.validate()?;
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    let n = y0.len();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y0.to_vec()],
        termination: Termination::Horizon,
        dense: Vec::new(),
    };
    if cfg.horizon == 0.0 {
        return Ok(traj);
    }
    let h_min = 1e-14 * cfg.horizon;
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    f(&y, &mut k1);
    let mut h = initial_step(&mut f, &y, &k1, cfg).min(cfg.horizon);
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut err_old: f64 = 1e-4;
    let mut rejected = false;
    let mut steps = 0usize;

    loop {
        if t >= cfg.horizon {
            traj.termination = Termination::Horizon;
            break;
        }
        if steps >= cfg.max_steps {
            traj.termination = Termination::StepLimit;
            break;
        }
        let last = t + h >= cfg.horizon;
        if last {
            h = cfg.horizon - t;
        }
        if h < h_min && !last {
            traj.termination = if escaping(&y, &k1, cfg.horizon) {
                Termination::Divergence
            } else {
                Termination::StepUnderflow
            };
            break;
        }
        steps += 1;

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(&tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(&tmp, &mut k6);
        for i in 0..n {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(&y1, &mut k7);
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = err_norm(&err, &y, &y1, cfg);

        if !e.is_finite() {
            rejected = true;
            h *= FAC_MIN;
            continue;
        }
        if e <= 1.0 {
            let fac = if e == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * e.powf(-ALPHA) * err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX)
            };
            err_old = e.max(1e-4);
            if cfg.dense {
                let mut c = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
                for i in 0..n {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    c[0][i] = y[i];
                    c[1][i] = ydiff;
                    c[2][i] = bspl;
                    c[3][i] = ydiff - h * k7[i] - bspl;
                    c[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                traj.dense.push(c);
            }
            t = if last { cfg.horizon } else { t + h };
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            traj.times.push(t);
            traj.states.push(y.clone());
            if y.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE) {
                traj.termination = Termination::Divergence;
                break;
            }
            let mut h_new = h * if rejected { fac.min(1.0) } else { fac };
            h_new = h_new.min(cfg.max_step);
            h = h_new;
            rejected = false;
        } else {
            rejected = true;
            h *= (SAFETY * e.powf(-0.2)).max(FAC_MIN);
        }
    }
    Ok(traj)
}

/// Integrate a real polynomial vector field.
pub fn rk45_field(field: &VectorField, y0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory, NumericsError> {
    if y0.len() != field.dim() {
        return Err(NumericsError::Dimension { expected: field.dim(), got: y0.len() });
    }
    let comps: Vec<RealPoly> = field
        .components()
        .iter()
        .map(RealPoly::new)
        .collect::<Option<_>>()
        .ok_or(NumericsError::NonReal)?;
    rk45(
        |y, out| {
            for (o, c) in out.iter_mut().zip(&comps) {
                *o = c.eval(y);
            }
        },
        y0,
        cfg,
    )
}
