//! Closed-form trajectory of a planar system: invert the eigenfunction map
//! symbolically, then substitute phi0 * exp(lambda t).
use koopman::algebra::{vars_from, VectorField};
use koopman::eigen::select_pair;
use koopman::koopman2d::{assemble_solution, eval_solution, invert_exact};
use koopman::manifold::{ManifoldPair, Provenance};
use koopman::sysparse::{parse_numbers, parse_polynomial};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let f = VectorField::new(vec![p("x - x*y"), p("-y + x^2 - 2*y^2")]).unwrap();
    let pairs: Vec<ManifoldPair> = ["x", "x^2 - 3*y", "1 - x^2 + 2*y"]
        .iter()
        .map(|m| ManifoldPair::verify(&p(m), &f, Provenance::UserSupplied).unwrap().unwrap())
        .collect();
    let pair = select_pair(&pairs).unwrap().unwrap();
    let inv = invert_exact(&pair).unwrap();
    println!("{inv}");
    let ic = parse_numbers("-1/2 1/4").unwrap();
    let sol = assemble_solution(&pair, &inv, &ic).unwrap();
    println!("{sol}");
    for k in 0..=4 {
        let t = k as f64 * 0.25;
        let [x, y] = eval_solution(&sol, t).unwrap();
        println!("t = {t:.2}  x = {x:+.12}  y = {y:+.12}");
    }
}
