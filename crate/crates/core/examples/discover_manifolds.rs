//! Polynomial ansatz search for invariant manifolds up to degree 2.
use koopman::algebra::{vars_from, VectorField};
use koopman::manifold::{discover_ansatz, AnsatzOptions};
use koopman::sysparse::{parse_polynomial, print_poly};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let f = VectorField::new(vec![p("x - x*y"), p("-y + x^2 - 2*y^2")]).unwrap();
    let opts = AnsatzOptions { max_deg: 2, ..Default::default() };
    for pair in discover_ansatz(&f, &opts).unwrap() {
        println!("M = {:<16} N = {:<10} ({})", print_poly(pair.m()), print_poly(pair.n()), pair.provenance());
    }
}
