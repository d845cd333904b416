//! A trajectory that reaches infinity in finite time and comes back: the
//! closed form has a denominator pole, the integrator has to stop there.
use koopman::algebra::{vars_from, VectorField};
use koopman::eigen::select_pair;
use koopman::koopman2d::{check_against_rk45, eval_solution, pole_times, solve_2d, Solution2D};
use koopman::manifold::{ManifoldPair, Provenance};
use koopman::numerics::IntegratorConfig;
use koopman::sysparse::{parse_numbers, parse_polynomial};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let f = VectorField::new(vec![p("x*y"), p("y^2 - x - 1")]).unwrap();
    let pairs: Vec<ManifoldPair> = ["x", "y - x - 1", "y + x + 1"]
        .iter()
        .map(|m| ManifoldPair::verify(&p(m), &f, Provenance::UserSupplied).unwrap().unwrap())
        .collect();
    let pair = select_pair(&pairs).unwrap().unwrap();
    let sol = solve_2d(&pair, &parse_numbers("2 5/2").unwrap()).unwrap();
    let Solution2D::Exact(cf) = &sol else { unreachable!("exact inversion exists") };
    let poles = pole_times(cf, 3.0);
    println!("poles in (0, 3]: {poles:?}");
    let report = check_against_rk45(&f, &sol, 3.0, &IntegratorConfig::new(3.0, 1e-10, 1e-12), 300).unwrap();
    println!("integrator: {} at t = {:.6}", report.termination, report.rk_last_time);
    println!("max error before the pole window ends ({:.4}): {:.2e}", report.window_end, report.max_err);
    let after = poles[0] + 0.1;
    println!("closed form at t = {after:.4}: {:?}", eval_solution(cf, after).unwrap());
}
