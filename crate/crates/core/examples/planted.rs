//! Build a field that carries chosen manifolds, then rediscover them.
use koopman::algebra::{vars_from, Field};
use koopman::manifold::{discover_ansatz, generate_planted, seed_linear_candidates, AnsatzOptions};
use koopman::sysparse::{parse_polynomial, print_poly};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let ms = [p("x"), p("y - x - 1")];
    let ns = [p("y"), p("y + 1")];
    let f = generate_planted(&ms, &ns, 2, 7).unwrap();
    for (k, c) in f.components().iter().enumerate() {
        println!("d{}/dt = {}", v[k], print_poly(c));
    }
    let mut found = seed_linear_candidates(&f, Field::Rational).unwrap();
    found.extend(discover_ansatz(&f, &AnsatzOptions::default()).unwrap());
    let mut seen = std::collections::BTreeSet::new();
    for pair in found.iter().filter(|q| seen.insert(print_poly(q.m()))) {
        println!("found M = {}  N = {}", print_poly(pair.m()), print_poly(pair.n()));
    }
}
