//! Scalar systems: eigenfunction by partial fractions, trajectory by
//! inverting phi(x) = phi(x0) exp(lambda t).
use koopman::algebra::{vars_from, Coefficient};
use koopman::koopman1d::{partial_fraction_exponents, solve_1d};
use koopman::sysparse::parse_polynomial;

fn main() {
    let v = vars_from(&["x"]);
    let lambda = Coefficient::from_int(-1);
    for (rhs, x0) in [("-x^3 + x", 0.5), ("x^2", 1.0), ("x^3 + 2*x^2 + 2*x", 0.2)] {
        let f = parse_polynomial(rhs, &v, None).unwrap();
        let e = partial_fraction_exponents(&f, &lambda).unwrap();
        let grid: Vec<f64> = (0..=6).map(|k| k as f64 * 0.25).collect();
        let sol = solve_1d(&e, x0, &grid).unwrap();
        println!("dx/dt = {rhs}, x0 = {x0}: phi = {e}");
        for (t, x) in sol.times.iter().zip(&sol.x) {
            println!("  t = {t:.2}  x = {x:.12}");
        }
        if let Some(te) = sol.escape_time {
            println!("  escapes to infinity at t = {te:.10}");
        }
    }
}
