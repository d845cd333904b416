//! Exact arithmetic in Q(sqrt 2): polynomial division and a nullspace.
use koopman::algebra::linalg::nullspace;
use koopman::algebra::{vars_from, Matrix};
use koopman::sysparse::{parse_polynomial, print_poly};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, Some(2)).unwrap();
    let a = p("x - sqrt(2)*y");
    let b = p("x + sqrt(2)*y + 1");
    let prod = &a * &b;
    println!("({}) * ({}) = {}", print_poly(&a), print_poly(&b), print_poly(&prod));
    let q = prod.divide_exact(&a).unwrap().expect("exact division");
    println!("quotient: {}", print_poly(&q));
    let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, -1]]);
    for k in nullspace(&m) {
        println!("kernel vector: {:?}", k.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
}
