//! Adaptive Dormand-Prince integration with dense output.
use koopman::algebra::{vars_from, VectorField};
use koopman::numerics::{rk45_field, IntegratorConfig};
use koopman::sysparse::parse_polynomial;

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    // harmonic oscillator: exact solution (cos t, -sin t)
    let f = VectorField::new(vec![p("y"), p("-x")]).unwrap();
    let cfg = IntegratorConfig { dense: true, ..IntegratorConfig::new(10.0, 1e-10, 1e-12) };
    let traj = rk45_field(&f, &[1.0, 0.0], &cfg).unwrap();
    println!("{} accepted steps, stopped by {}", traj.times.len() - 1, traj.termination);
    for t in [1.0, 2.5, 7.0, 10.0] {
        let s = traj.eval(t).unwrap();
        println!("t = {t:4.1}  error = {:.2e}", ((s[0] - t.cos()).powi(2) + (s[1] + t.sin()).powi(2)).sqrt());
    }
}
