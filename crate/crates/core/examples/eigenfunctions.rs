//! Eigenfunctions from constant cofactor combinations, each checked against
//! the Koopman PDE, and the automatically selected independent pair.
use koopman::algebra::{vars_from, VectorField};
use koopman::eigen::{eigen_candidates, select_pair, verify_pde};
use koopman::manifold::{ManifoldPair, Provenance};
use koopman::sysparse::parse_polynomial;

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let f = VectorField::new(vec![p("x - x*y"), p("-x - y - y^2")]).unwrap();
    let pairs: Vec<ManifoldPair> = ["x", "x + 2*y", "1 + x + y"]
        .iter()
        .map(|m| ManifoldPair::verify(&p(m), &f, Provenance::UserSupplied).unwrap().unwrap())
        .collect();
    for e in eigen_candidates(&pairs).unwrap() {
        let ok = verify_pde(&e, &f).unwrap().passed();
        println!("lambda = {:<3} phi = {:<28} p = {:?}  pde ok: {ok}", e.lambda.to_string(), e.phi_string(), e.weight.entries().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    let (a, b) = select_pair(&pairs).unwrap().expect("independent pair");
    println!("selected: {} and {}", a.phi_string(), b.phi_string());
}
