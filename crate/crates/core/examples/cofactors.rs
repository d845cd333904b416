//! Exact cofactors N with Lie(M) = M*N for a few candidate manifolds.
use koopman::algebra::{vars_from, VectorField};
use koopman::manifold::cofactor;
use koopman::sysparse::{parse_polynomial, print_poly};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let f = VectorField::new(vec![p("x*y"), p("y^2 - x - 1")]).unwrap();
    for m in ["x", "y - x - 1", "y + x + 1", "y"] {
        match cofactor(&p(m), &f).unwrap() {
            Some(n) => println!("M = {m:<10}  N = {}", print_poly(&n)),
            None => println!("M = {m:<10}  not invariant"),
        }
    }
}
