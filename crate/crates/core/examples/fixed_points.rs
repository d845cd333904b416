//! Fixed points, their Jacobian spectra, and the straight-line manifolds
//! seeded from real eigenvectors.
use koopman::algebra::{vars_from, Field, VectorField};
use koopman::manifold::{fixed_points_in, seed_linear_candidates};
use koopman::sysparse::{parse_polynomial, print_poly};

fn main() {
    let v = vars_from(&["x", "y"]);
    let p = |s: &str| parse_polynomial(s, &v, None).unwrap();
    let f = VectorField::new(vec![p("x*y"), p("y^2 - x - 1")]).unwrap();
    for fp in fixed_points_in(&f, Field::Rational).unwrap() {
        println!("fixed point {:?}  eigenvalues {:?}", fp.real_coords(), fp.eigenvalues);
    }
    for pair in seed_linear_candidates(&f, Field::Rational).unwrap() {
        println!("line M = {}  N = {}", print_poly(pair.m()), print_poly(pair.n()));
    }
}
