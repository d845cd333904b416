use super::*;
use crate::algebra::{Field, VectorField};
use crate::eigen::select_pair;
use crate::manifold::{ManifoldPair, Provenance};
use crate::numerics::IntegratorConfig;
use crate::sysparse::parse_polynomial;

pub(crate) fn setup(comps: &[&str], ms: &[&str], d: Option<i64>) -> (VectorField, Pair) {
    let v = vars_from(&["x", "y"]);
    let f = VectorField::new(comps.iter().map(|c| parse_polynomial(c, &v, d).unwrap()).collect()).unwrap();
    let pairs: Vec<ManifoldPair> = ms
        .iter()
        .map(|m| {
            let p = parse_polynomial(m, &v, d).unwrap();
            ManifoldPair::verify(&p, &f, Provenance::UserSupplied).unwrap().unwrap()
        })
        .collect();
    let pair = select_pair(&pairs).unwrap().unwrap();
    (f, pair)
}

pub(crate) fn ex_linear() -> (VectorField, Pair) {
    setup(&["x - y", "-2*x"], &["y + x", "y - 2*x"], None)
}

pub(crate) fn ex1() -> (VectorField, Pair) {
    setup(&["x*y", "y^2 - x - 1"], &["x", "y - x - 1", "y + x + 1"], None)
}

pub(crate) fn ex2() -> (VectorField, Pair) {
    setup(&["x - x*y", "-x - y - y^2"], &["x", "x + 2*y", "1 + x + y"], None)
}

pub(crate) fn ex4() -> (VectorField, Pair) {
    setup(&["x - x*y", "-y + x^2 - 2*y^2"], &["x", "x^2 - 3*y", "1 - x^2 + 2*y"], None)
}

pub(crate) fn ex5() -> (VectorField, Pair) {
    setup(
        &["x - y - x^2", "-x - y - x*y"],
        &["y - (1+sqrt(2))*x", "y - (1-sqrt(2))*x", "y - x + 2"],
        Some(2),
    )
}

fn q(n: i64, d: i64) -> Coefficient {
    Coefficient::from_ratio(n, d)
}

fn ic(x: i64, y: i64) -> InitialCondition {
    InitialCondition::from_exact(vec![Coefficient::from_int(x), Coefficient::from_int(y)])
}

fn rf(text_num: &str, text_den: &str) -> RationalFunction {
    let v = phi_vars();
    RationalFunction::new(parse_polynomial(text_num, &v, None).unwrap(), parse_polynomial(text_den, &v, None).unwrap())
        .unwrap()
}

#[test]
fn map_ic_examples() {
    let (_, pair) = ex1();
    assert_eq!(pair.0.phi_string(), "x / (1 + x + y)");
    // second eigenfunction is x / (y - x - 1): the hand-derived x / (1 + x - y) up to sign
    assert_eq!(map_ic(&pair, &ic(1, 1)).unwrap(), [q(1, 3), q(-1, 1)]);
    assert_eq!(map_ic(&pair, &ic(0, 5)).unwrap(), [q(0, 1), q(0, 1)]);
    match map_ic(&pair, &ic(1, -2)) {
        Err(Koopman2dError::SingularIc(m)) => assert_eq!(m, "y + x + 1"),
        other => panic!("{other:?}"),
    }
    let fl = map_ic(&pair, &InitialCondition::from_f64(&[1.0, 1.0])).unwrap();
    assert!((fl[0].to_complex().re - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn invert_example_one() {
    let (_, pair) = ex1();
    let inv = invert_exact(&pair).unwrap();
    // with phi2 -> -phi2 these are 2 phi1 phi2 / (phi1 + phi2 - 2 phi1 phi2) and
    // (phi2 - phi1) / (phi1 + phi2 - 2 phi1 phi2)
    assert_eq!(inv.comps[0].power, 1);
    assert_eq!(inv.comps[0].value, rf("-2*phi1*phi2", "phi1 - phi2 + 2*phi1*phi2"));
    assert_eq!(inv.comps[1].value, rf("-phi1 - phi2", "phi1 - phi2 + 2*phi1*phi2"));
}

#[test]
fn invert_quadratic_example() {
    let (_, pair) = ex4();
    let inv = invert_exact(&pair).unwrap();
    assert_eq!((inv.comps[0].var, inv.comps[0].power), (0, 2));
    assert_eq!((inv.comps[1].var, inv.comps[1].power), (1, 1));
    // phi1 = M3/M2 and phi2 = M3/x^2 with M3 = x^2 - 2y - 1. The hand-derived
    // pair (-3(1 - x^2 + 2y)/M2, (1 - x^2 + 2y)/x^2) is (3 phi1, -phi2), and
    // substituting it into x^2 = 3 P1 / (P1 - 6 P2 + 3 P1 P2) gives this.
    let d = "phi1 + 2*phi2 - 3*phi1*phi2";
    assert_eq!(inv.comps[0].value, rf("3*phi1", d));
    assert_eq!(inv.comps[1].value, rf("phi1 - phi2", d));
    let by_hand = rf("9*phi1", "3*phi1 + 6*phi2 - 9*phi1*phi2");
    assert_eq!(inv.comps[0].value, by_hand);
}

#[test]
fn invert_linear_example() {
    let (_, pair) = ex_linear();
    let inv = invert_exact(&pair).unwrap();
    // phi1 = y - 2x (lambda 2), phi2 = y + x (lambda -1)
    assert_eq!(pair.0.phi_string(), "y - 2*x");
    assert_eq!(inv.comps[0].value, rf("-1/3*phi1 + 1/3*phi2", "1"));
    assert_eq!(inv.comps[1].value, rf("1/3*phi1 + 2/3*phi2", "1"));
    for (a, b) in [(q(1, 2), q(3, 1)), (q(-2, 1), q(5, 7))] {
        let x = inv.comps[0].value.eval(&[a.clone(), b.clone()]).unwrap();
        let y = inv.comps[1].value.eval(&[a.clone(), b.clone()]).unwrap();
        let back = map_ic(&pair, &InitialCondition::from_exact(vec![x, y])).unwrap();
        assert_eq!(back, [a, b]);
    }
}

/// Substituting the symbolic inverse back returns `(phi1, phi2)` exactly.
fn roundtrip(pair: &Pair) {
    let inv = invert_exact(pair).unwrap();
    let eqs = [pair.0.phi().unwrap(), pair.1.phi().unwrap()];
    for (a, b) in [(2, 3), (-1, 5), (7, -4), (3, 11)] {
        let phi = [q(a, 3), q(b, 2)];
        let u: Vec<Coefficient> = inv.comps.iter().map(|c| c.value.eval(&phi).unwrap()).collect();
        // cleared equations phi_k * B_k - A_k in the state monomials
        for (k, r) in eqs.iter().enumerate() {
            let mut acc = Coefficient::zero();
            for (m, cnum) in r.num().terms() {
                let mut val = cnum.clone();
                for c in &inv.comps {
                    if m.exponent(c.var) > 0 {
                        val = &val * &u[c.var];
                    }
                }
                acc = &acc - &val;
            }
            for (m, cden) in r.den().terms() {
                let mut val = cden * &phi[k];
                for c in &inv.comps {
                    if m.exponent(c.var) > 0 {
                        val = &val * &u[c.var];
                    }
                }
                acc = &acc + &val;
            }
            assert!(acc.is_zero(), "equation {k} at {phi:?}");
        }
    }
}

#[test]
fn inversions_are_exact() {
    for (_, p) in [ex_linear(), ex1(), ex2(), ex4(), ex5()] {
        roundtrip(&p);
    }
}

#[test]
fn sqrt_two_inversion() {
    let (_, pair) = ex5();
    let inv = invert_exact(&pair).unwrap();
    assert_eq!(inv.comps[0].power, 1);
    assert_eq!(inv.comps[1].power, 1);
    assert_eq!(pair.0.lambda.field(), Some(Field::Quadratic(2)));
}

#[test]
fn no_exact_path() {
    // y - x^2 - x mixes two powers of x
    let (_, pair) = setup(&["x", "2*y - x"], &["x", "y - x^2 - x"], None);
    assert!(matches!(invert_exact(&pair), Err(Koopman2dError::NoExactPath(_))));
}

#[test]
fn assembled_rates() {
    let (_, pair) = ex1();
    let s = assemble_solution(&pair, &invert_exact(&pair).unwrap(), &ic(1, 1)).unwrap();
    let mut rates: Vec<i64> = s.comps[0].den.rates().iter().map(|r| r.as_i64().unwrap()).collect();
    rates.sort();
    assert_eq!(rates, vec![-1, 0, 1]);
    let e = eval_solution(&s, 0.0).unwrap();
    assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);

    let (_, pair) = ex4();
    let s = assemble_solution(&pair, &invert_exact(&pair).unwrap(), &ic(1, 2)).unwrap();
    let mut rates: Vec<i64> = s.comps[0].den.rates().iter().map(|r| r.as_i64().unwrap()).collect();
    rates.sort();
    assert_eq!(rates, vec![-2, -1, 1]);
}

#[test]
fn linear_solution_at_one() {
    let (_, pair) = ex_linear();
    let s = assemble_solution(&pair, &invert_exact(&pair).unwrap(), &ic(1, 0)).unwrap();
    let e = eval_solution(&s, 1.0).unwrap();
    let (e2, em1) = (2f64.exp(), (-1f64).exp());
    // The hand-derived formula (y0 - x0) e^{2t} - (y0 - 2x0) e^{-t} matches x0 at
    // t = 0 but has x'(0) = -4 at (1, 0) where x - y = 1, so it is not a
    // solution; the matrix exponential below is the oracle.
    let by_hand = [-e2 + 2.0 * em1, -2.0 * e2 + 2.0 * em1];
    assert!((e[0] - by_hand[0]).abs() > 1.0);
    assert!((e[0] - (2.0 * e2 + em1) / 3.0).abs() < 1e-12);
    assert!((e[1] - (-2.0 * e2 + 2.0 * em1) / 3.0).abs() < 1e-12);
    // matrix exponential of [[1,-1],[-2,0]] via its eigen decomposition
    // A = V diag(2,-1) V^-1 with V = [[-1,1],[1,2]]
    let v = [[-1.0, 1.0], [1.0, 2.0]];
    let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
    let vinv = [[v[1][1] / det, -v[0][1] / det], [-v[1][0] / det, v[0][0] / det]];
    let d = [e2, em1];
    let mut x = [0.0; 2];
    for (i, xi) in x.iter_mut().enumerate() {
        for k in 0..2 {
            *xi += v[i][k] * d[k] * vinv[k][0];
        }
    }
    assert!((e[0] - x[0]).abs() < 1e-12 && (e[1] - x[1]).abs() < 1e-12);
}

#[test]
fn t_zero_identity() {
    for (_, pair) in [ex1(), ex2(), ex4(), ex5()] {
        let inv = invert_exact(&pair).unwrap();
        for (x, y) in [(1.5, 0.25), (-0.7, 1.3), (0.3, -1.9)] {
            let ic = InitialCondition::from_f64(&[x, y]);
            let Ok(s) = assemble_solution(&pair, &inv, &ic) else { continue };
            let e = eval_solution(&s, 0.0).unwrap();
            assert!((e[0] - x).abs() < 1e-12 && (e[1] - y).abs() < 1e-12, "{e:?} vs {x},{y}");
        }
    }
}

#[test]
fn pole_found_and_both_sides_finite() {
    let (f, pair) = ex1();
    let ic = InitialCondition::from_f64(&[2.0, 2.5]);
    let s = assemble_solution(&pair, &invert_exact(&pair).unwrap(), &ic).unwrap();
    let poles = pole_times(&s, 3.0);
    assert!(!poles.is_empty(), "no pole");
    let tp = poles[0];
    assert!(tp > 0.0 && tp < 3.0);
    assert!(matches!(eval_solution(&s, tp), Err(Koopman2dError::Pole { .. })));
    let before = eval_solution(&s, tp - 0.1).unwrap();
    let after = eval_solution(&s, tp + 0.1).unwrap();
    assert!(before.iter().chain(&after).all(|v| v.is_finite()));
    // the integrator cannot pass the pole
    let traj = crate::numerics::rk45_field(&f, &[2.0, 2.5], &IntegratorConfig::new(3.0, 1e-10, 1e-12)).unwrap();
    assert_eq!(traj.termination, crate::numerics::Termination::Divergence);
    assert!(traj.last_time() < tp);
}

#[test]
fn numeric_inversion_matches_exact() {
    let (_, pair) = ex1();
    let ic = InitialCondition::from_f64(&[1.0, 1.0]);
    let s = assemble_solution(&pair, &invert_exact(&pair).unwrap(), &ic).unwrap();
    let times: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let first = invert_numeric(&pair, propagate(&pair, &s.phi0, 0.0), [1.0, 1.0]).unwrap();
    assert_eq!(first, [1.0, 1.0]);
    let (pts, fail) = solve_numeric(&pair, [1.0, 1.0], &s.phi0, &times);
    assert!(fail.is_none(), "{fail:?}");
    for (t, p) in times.iter().zip(&pts) {
        let e = eval_solution(&s, *t).unwrap();
        assert!((e[0] - p[0]).abs() < 1e-9 && (e[1] - p[1]).abs() < 1e-9, "t={t}");
    }
}

#[test]
fn numeric_inversion_keeps_branch() {
    // near x = 0 both signs of x give the same eigenfunction values
    let (_, pair) = ex4();
    for x0 in [0.05, -0.05] {
        let ic = InitialCondition::from_f64(&[x0, 0.4]);
        let s = assemble_solution(&pair, &invert_exact(&pair).unwrap(), &ic).unwrap();
        let times: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
        let (pts, fail) = solve_numeric(&pair, [x0, 0.4], &s.phi0, &times);
        assert!(fail.is_none());
        for (t, p) in times.iter().zip(&pts) {
            let e = eval_solution(&s, *t).unwrap();
            assert!(p[0].signum() == x0.signum());
            assert!((e[0] - p[0]).abs() < 1e-8 && (e[1] - p[1]).abs() < 1e-8, "t={t}");
        }
    }
}

#[test]
fn check_report_example_one() {
    let (f, pair) = ex1();
    let sol = solve_2d(&pair, &ic(1, 1)).unwrap();
    let rep = check_against_rk45(&f, &sol, 1.0, &IntegratorConfig::new(1.0, 1e-10, 1e-12), 100).unwrap();
    assert_eq!(rep.rows.len(), 101);
    assert!(rep.max_err < 1e-6, "{}", rep.max_err);
}

#[test]
fn expoly_basics() {
    let p = ExpPoly::new([
        (q(2, 1), q(1, 1)),
        (q(-1, 1), q(0, 1)),
        (q(3, 1), q(1, 1)),
        (q(1, 2), q(-2, 1)),
        (q(0, 1), q(5, 1)),
    ]);
    assert_eq!(p.terms().len(), 3);
    assert_eq!(p.to_string(), "5*exp(t) - 1 + 1/2*exp(-2*t)");
    assert!((p.eval(0.0).re - 4.5).abs() < 1e-15);
}


#[test]
fn numeric_fallback_tracks_integrator() {
    let (f, pair) = setup(&["x", "2*y - x"], &["x", "y - x^2 - x"], None);
    let sol = solve_2d(&pair, &InitialCondition::from_f64(&[0.5, 0.3])).unwrap();
    assert!(matches!(sol, Solution2D::Numeric { .. }));
    let rep = check_against_rk45(&f, &sol, 1.0, &IntegratorConfig::new(1.0, 1e-10, 1e-12), 50).unwrap();
    assert!(rep.rows.iter().all(|r| r.analytic.is_some()));
    assert!(rep.max_err < 1e-8, "{}", rep.max_err);
}
