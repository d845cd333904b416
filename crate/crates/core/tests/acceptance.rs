//! Acceptance criteria 1-8. Each test prints one `criterion N: PASS|FAIL`
//! line; all tolerances are pinned below.

mod common;

use std::sync::Mutex;
use std::time::{Duration, Instant};

use common::{corpus, examples, field, kv, poly, run, verified, xy};
use koopman::algebra::linalg::{nullspace, rank};
use koopman::algebra::{Coefficient, Field, Matrix, Monomial, Polynomial, Vars};
use koopman::eigen::{build_eigenpair, independent_pairs, select_pair, WeightVector};
use koopman::koopman1d::{partial_fraction_exponents, solve_1d};
use koopman::koopman2d::{check_against_rk45, eval_solution, solve_2d, Solution2D};
use koopman::manifold::{discover_ansatz, generate_planted, seed_linear_candidates, AnsatzOptions, ManifoldPair};
use koopman::numerics::IntegratorConfig;
use koopman::sysparse::{parse_numbers, parse_polynomial, print_poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C1_TIME: Duration = Duration::from_secs(1);
const C3_TOL: f64 = 1e-6;
const C3_ICS: usize = 50;
const C3_TIME: Duration = Duration::from_secs(30);
/// Initial conditions closer than this to a manifold are redrawn.
const C3_MANIFOLD_GAP: f64 = 0.05;
const C4_AFTER: f64 = 0.1;
const C5_TOL: f64 = 1e-10;
const C6_SYSTEMS: usize = 100;
const C6_REQUIRED: usize = 90;
const C6_TIME: Duration = Duration::from_secs(120);
const C8_IDENTITIES: usize = 100_000;
const C8_TIME: Duration = Duration::from_secs(60);

/// Serializes the criteria so that the runtime bounds are not measured
/// under contention from sibling tests.
static SERIAL: Mutex<()> = Mutex::new(());

fn verdict(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_1_cofactor_recovery() {
    let _g = lock();
    let start = Instant::now();
    let (code, out, _) = run(&["verify", corpus("ex1.sys").to_str().unwrap(), "--kv"]);
    let elapsed = start.elapsed();
    let r = kv(&out);
    let v = xy();
    let expect = [("x", "y"), ("y - x - 1", "y + 1"), ("y + x + 1", "y - 1")];
    let mut ok = code == 0 && elapsed < C1_TIME;
    for (k, (m, n)) in expect.iter().enumerate() {
        let key = |s: &str| format!("manifold.{}.{s}", k + 1);
        ok &= r.get(&key("m")) == Some(&print_poly(&poly(&v, m, None)));
        ok &= r.get(&key("n")) == Some(&print_poly(&poly(&v, n, None)));
    }
    verdict(1, ok, format!("exit {code}, N = {{y, y + 1, y - 1}} expected, {elapsed:?}"));
}

/// Split `num / den` at the top-level slash.
fn split_phi(s: &str) -> (String, String) {
    let mut depth = 0i32;
    let b = s.as_bytes();
    for i in 0..b.len() {
        match b[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'/' if depth == 0 && i > 0 && b[i - 1] == b' ' => {
                return (s[..i - 1].to_string(), s[i + 2..].to_string());
            }
            _ => {}
        }
    }
    (s.to_string(), "1".to_string())
}

fn eval_ratio(num: &Polynomial, den: &Polynomial, pt: &[Coefficient]) -> Option<Coefficient> {
    let d = den.eval(pt);
    if d.is_zero() {
        None
    } else {
        Some(&num.eval(pt) / &d)
    }
}

/// `(lambda_c, phi_c)` and `(lambda_p, phi_p)` belong to one class when
/// `lambda_c = c*lambda_p` and `phi_c / phi_p^c` is constant, c integer.
fn same_class(
    v: &Vars,
    d: Option<i64>,
    cand: (&Coefficient, &str),
    expected: (&Coefficient, &str, &str),
) -> bool {
    let c = cand.0 / expected.0;
    let Some(c) = c.as_i64() else { return false };
    if c == 0 {
        return false;
    }
    let (cn, cd) = split_phi(cand.1);
    let (cn, cd) = (poly(v, &cn, d), poly(v, &cd, d));
    let (pn, pd) = (poly(v, expected.1, d), poly(v, expected.2, d));
    let mut reference: Option<Coefficient> = None;
    let points = [(2, 7), (-3, 5), (5, -11), (7, 13), (-13, -17), (11, 19)];
    for (a, b) in points {
        let pt = [Coefficient::from_ratio(a, 3), Coefficient::from_ratio(b, 5)];
        let (Some(fc), Some(fp)) = (eval_ratio(&cn, &cd, &pt), eval_ratio(&pn, &pd, &pt)) else { return false };
        if fp.is_zero() {
            return false;
        }
        let q = &fc / &fp.powi(c);
        match &reference {
            None => reference = Some(q),
            Some(r) if *r == q => {}
            Some(_) => return false,
        }
    }
    true
}

#[test]
fn criterion_2_eigenpair_recovery() {
    let _g = lock();
    let v = xy();
    // (file, field, [(lambda, phi numerator, phi denominator)])
    let tables: [(&str, Option<i64>, Vec<(&str, &str, &str)>); 4] = [
        ("ex1.sys", None, vec![("1", "x", "1 + x + y"), ("-1", "x", "1 + x - y"), ("2", "y - x - 1", "y + x + 1")]),
        (
            "ex2.sys",
            None,
            vec![
                ("-1", "1 + x + y", "x"),
                ("1", "1 + x + y", "x + 2*y"),
                ("1", "x", "1 + x + y"),
                ("2", "2*x", "x + 2*y"),
            ],
        ),
        ("ex4.sys", None, vec![("1", "-3*(1 - x^2 + 2*y)", "x^2 - 3*y"), ("-2", "1 - x^2 + 2*y", "x^2")]),
        (
            "ex5.sys",
            Some(2),
            vec![
                ("sqrt(2)", "y - x + 2", "2*(y - (1 - sqrt(2))*x)"),
                ("-sqrt(2)", "y - x + 2", "2*(y - (1 + sqrt(2))*x)"),
            ],
        ),
    ];
    let mut ok = true;
    let mut missing = Vec::new();
    let mut checked = 0;
    for (file, d, table) in &tables {
        let (code, out, _) = run(&["eigen", corpus(file).to_str().unwrap(), "--kv"]);
        ok &= code == 0;
        let r = kv(&out);
        let mut cands = Vec::new();
        for k in 1.. {
            let Some(lam) = r.get(&format!("eigen.{k}.lambda")) else { break };
            ok &= r.get(&format!("eigen.{k}.checks")).map(String::as_str) == Some("pass");
            let lam = poly(&v, lam, *d).constant_term();
            cands.push((lam, r[&format!("eigen.{k}.phi")].clone()));
            checked += 1;
        }
        for (lam, n, den) in table {
            let lp = poly(&v, lam, *d).constant_term();
            let found = cands.iter().any(|(lc, phi)| same_class(&v, *d, (lc, phi), (&lp, n, den)));
            if !found {
                missing.push(format!("{file}: ({lam}, ({n})/({den}))"));
            }
        }
    }
    ok &= missing.is_empty();
    verdict(2, ok, format!("{checked} eigenfunctions with exact checks, missing: {missing:?}"));
}

#[test]
fn criterion_3_closed_form_vs_rk45() {
    let _g = lock();
    let start = Instant::now();
    let cfg = IntegratorConfig::new(1.0, 1e-10, 1e-12);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut runs = 0;
    for (idx, ex) in examples().iter().enumerate() {
        let pair = select_pair(&ex.manifolds).unwrap().expect("independent pair");
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + idx as u64);
        let mut done = 0;
        while done < C3_ICS {
            let p = [rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0)];
            if ex.manifolds.iter().any(|m| m.m().eval_f64(&p).abs() < C3_MANIFOLD_GAP) {
                continue;
            }
            done += 1;
            runs += 1;
            let ic = koopman::sysparse::InitialCondition::from_f64(&p);
            let res = solve_2d(&pair, &ic).and_then(|s| check_against_rk45(&ex.field, &s, 1.0, &cfg, 200));
            match res {
                Ok(rep) => {
                    let complete = rep.rows.iter().filter(|r| r.t <= rep.window_end).all(|r| r.numeric.is_some());
                    if !(rep.max_err < C3_TOL) || !complete {
                        failures.push(format!("{} {p:?}: err {:e}", ex.name, rep.max_err));
                    }
                    worst = worst.max(rep.max_err);
                }
                Err(e) => failures.push(format!("{} {p:?}: {e}", ex.name)),
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < C3_TIME;
    verdict(3, ok, format!("{runs} trajectories, worst error {worst:e}, {elapsed:?}, failures {failures:?}"));
}

#[test]
fn criterion_4_finite_time_blow_up() {
    let _g = lock();
    let dir = tempfile::tempdir().unwrap();
    let file = corpus("ex1.sys");
    let args =
        ["check", file.to_str().unwrap(), "--ics", "2,2.5", "--horizon", "3", "--kv", "--out-dir", dir.path().to_str().unwrap()];
    let (code, out, _) = run(&args);
    let r = kv(&out);
    let poles: Vec<f64> =
        r.get("check.1.poles").map(|s| s.split_whitespace().filter_map(|t| t.parse().ok()).collect()).unwrap_or_default();
    let t_star = poles.iter().copied().find(|t| *t > 0.0 && *t < 3.0);
    let rk_last: f64 = r.get("check.1.rk_last_time").and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
    let divergence = r.get("check.1.termination").map(String::as_str) == Some("divergence");
    let after = t_star.map(|t| {
        let f = field(&["x*y", "y^2 - x - 1"], None);
        let ms = verified(&f, &["x", "y - x - 1", "y + x + 1"], None);
        let pair = select_pair(&ms).unwrap().unwrap();
        match solve_2d(&pair, &parse_numbers("2 5/2").unwrap()).unwrap() {
            Solution2D::Exact(s) => eval_solution(&s, t + C4_AFTER).ok(),
            Solution2D::Numeric { .. } => None,
        }
    });
    let finite = matches!(after, Some(Some(v)) if v.iter().all(|c| c.is_finite()));
    let ok = code == 0 && divergence && t_star.is_some_and(|t| rk_last < t) && finite;
    verdict(4, ok, format!("t* = {t_star:?}, RK45 stopped at {rk_last} (divergence: {divergence}), x(t* + 0.1) = {after:?}"));
}

#[test]
fn criterion_5_one_dimensional_equivalence() {
    let _g = lock();
    let v = koopman::algebra::vars_from(&["x"]);
    let lam = Coefficient::from_int(-1);
    let grid: Vec<f64> = (0..=300).map(|k| k as f64 * 0.01).collect();
    let cubic = parse_polynomial("-x^3 + x", &v, None).unwrap();
    let e = partial_fraction_exponents(&cubic, &lam).unwrap();
    let mut worst_cubic = 0.0f64;
    for x0 in [-1.5, -0.9, -0.5, -0.1, 0.1, 0.5, 0.9, 1.5] {
        let sol = solve_1d(&e, x0, &grid).unwrap();
        assert_eq!(sol.x.len(), grid.len());
        for (t, x) in sol.times.iter().zip(&sol.x) {
            let sov = f64::signum(x0) * t.exp() / (-1.0 + (2.0 * t).exp() + 1.0 / (x0 * x0)).sqrt();
            worst_cubic = worst_cubic.max((x - sov).abs());
        }
    }
    let square = parse_polynomial("x^2", &v, None).unwrap();
    let e = partial_fraction_exponents(&square, &lam).unwrap();
    let mut worst_square = 0.0f64;
    for x0 in [-2.0, -0.5, 0.25, 0.5, 1.0, 2.0] {
        let limit: f64 = if x0 > 0.0 { 0.9 / x0 } else { 3.0 };
        let g: Vec<f64> = grid.iter().copied().filter(|t| *t < limit).collect();
        let sol = solve_1d(&e, x0, &g).unwrap();
        assert_eq!(sol.x.len(), g.len());
        for (t, x) in sol.times.iter().zip(&sol.x) {
            worst_square = worst_square.max((x - x0 / (1.0 - x0 * t)).abs());
        }
    }
    let ok = worst_cubic < C5_TOL && worst_square < C5_TOL;
    verdict(5, ok, format!("cubic max error {worst_cubic:e}, square max error {worst_square:e}"));
}

fn small(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Coefficient {
    Coefficient::from_int(rng.gen_range(lo..=hi))
}

fn linear(rng: &mut ChaCha8Rng, v: &Vars) -> Polynomial {
    loop {
        let (a, b, c) = (small(rng, -3, 3), small(rng, -3, 3), small(rng, -3, 3));
        if a.is_zero() && b.is_zero() {
            continue;
        }
        let p = &(&Polynomial::var(v, 0).scale(&a) + &Polynomial::var(v, 1).scale(&b)) + &Polynomial::constant(v, c);
        return p;
    }
}

/// `z^2 + p*z + q*w + r` with `q != 0`, irreducible since it is a graph over `z`.
fn quadratic(rng: &mut ChaCha8Rng, v: &Vars) -> Polynomial {
    let (z, w) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
    let mut q = small(rng, -3, 3);
    while q.is_zero() {
        q = small(rng, -3, 3);
    }
    let zv = Polynomial::var(v, z);
    let extra = Polynomial::var(v, 0).try_mul(&Polynomial::var(v, 1)).unwrap().scale(&small(rng, -1, 1));
    &(&(&(&zv.pow(2) + &zv.scale(&small(rng, -3, 3))) + &Polynomial::var(v, w).scale(&q))
        + &Polynomial::constant(v, small(rng, -3, 3)))
        + &extra
}

fn cofactor_guess(rng: &mut ChaCha8Rng, v: &Vars) -> Polynomial {
    let mut n = Polynomial::constant(v, small(rng, -2, 2));
    for i in 0..2 {
        n = &n + &Polynomial::var(v, i).scale(&small(rng, -2, 2));
    }
    n
}

/// Planted instances that are feasible by construction: a single line (any
/// cofactor), two independent lines (any cofactors, since the lines are
/// coordinates), or one quadratic with `N = h1*M_x + h2*M_y` for constants
/// `h`, realized by `F = M*(h1, h2)` plus any multiple of `(M_y, -M_x)`.
fn planted_instance(seed: u64) -> (Vec<Polynomial>, Vec<Polynomial>) {
    let v = xy();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match seed % 3 {
        0 => {
            let m = linear(&mut rng, &v);
            (vec![m], vec![cofactor_guess(&mut rng, &v)])
        }
        1 => loop {
            let (a, b) = (linear(&mut rng, &v), linear(&mut rng, &v));
            let det = &(&a.coeff(&Monomial::var(2, 0)) * &b.coeff(&Monomial::var(2, 1)))
                - &(&a.coeff(&Monomial::var(2, 1)) * &b.coeff(&Monomial::var(2, 0)));
            if !det.is_zero() {
                break (vec![a, b], vec![cofactor_guess(&mut rng, &v), cofactor_guess(&mut rng, &v)]);
            }
        },
        _ => {
            let m = quadratic(&mut rng, &v);
            let (h1, h2) = (small(&mut rng, -2, 2), small(&mut rng, -2, 2));
            let n = &m.partial(0).scale(&h1) + &m.partial(1).scale(&h2);
            (vec![m], vec![n])
        }
    }
}

#[test]
fn criterion_6_discovery_on_planted_systems() {
    let _g = lock();
    let start = Instant::now();
    let mut recovered = 0;
    let mut all_verified = 0;
    let mut misses = Vec::new();
    for seed in 0..C6_SYSTEMS as u64 {
        let (ms, ns) = planted_instance(seed);
        let f = generate_planted(&ms, &ns, 2, seed).expect("feasible by construction");
        let mut found: Vec<ManifoldPair> = seed_linear_candidates(&f, Field::Rational).unwrap_or_default();
        let opts = AnsatzOptions { max_deg: 2, seed, ..Default::default() };
        found.extend(discover_ansatz(&f, &opts).unwrap());
        if found.iter().all(|p| p.check(&f).unwrap_or(false)) {
            all_verified += 1;
        }
        let hit = ms.iter().all(|m| found.iter().any(|p| p.m().canonical() == m.canonical()));
        if hit {
            recovered += 1;
        } else {
            misses.push(seed);
        }
    }
    let elapsed = start.elapsed();
    let ok = recovered >= C6_REQUIRED && all_verified == C6_SYSTEMS && elapsed < C6_TIME;
    verdict(
        6,
        ok,
        format!("recovered {recovered}/{C6_SYSTEMS}, verified {all_verified}/{C6_SYSTEMS}, {elapsed:?}, missed seeds {misses:?}"),
    );
}

#[test]
fn criterion_7_independence_gate() {
    let _g = lock();
    let ex = examples().into_iter().find(|e| e.name == "ex2").unwrap();
    let w = |a: i64, b: i64, c: i64| WeightVector(vec![a, b, c].into_iter().map(Coefficient::from_int).collect());
    let (p1, p2, p3) = (w(-1, 0, 1), w(0, -1, 1), w(1, 0, -1));
    let e1 = build_eigenpair(&ex.manifolds, &p1).unwrap();
    let e2 = build_eigenpair(&ex.manifolds, &p2).unwrap();
    let e3 = build_eigenpair(&ex.manifolds, &p3).unwrap();
    let rejected = independent_pairs(&[e1.clone(), e3]).is_empty();
    let accepted = !independent_pairs(&[e1, e2]).is_empty();
    let (a, b) = select_pair(&ex.manifolds).unwrap().unwrap();
    let mut chosen = [a.weight.canonical(), b.weight.canonical()];
    chosen.sort();
    let mut want = [p1.canonical(), p2.canonical()];
    want.sort();
    let ok = rejected && accepted && chosen == want;
    verdict(7, ok, format!("(phi1, phi3) rejected: {rejected}, selected weights {} and {}", chosen[0], chosen[1]));
}

fn random_poly(rng: &mut ChaCha8Rng, v: &Vars, max_deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(v);
    for _ in 0..terms {
        let m = Monomial::from_exponents(&[rng.gen_range(0..=max_deg), rng.gen_range(0..=max_deg)]);
        let c = Coefficient::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        p.add_term(m, c);
    }
    p
}

#[test]
fn criterion_8_algebra_kernel() {
    let _g = lock();
    let start = Instant::now();
    let v = xy();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut passed = 0usize;
    let mut failed = Vec::new();
    let mut n = 0usize;
    while n < C8_IDENTITIES {
        let kind = n % 8;
        let ok = match kind {
            0 | 1 | 2 => {
                let (a, b, c) = (random_poly(&mut rng, &v, 2, 3), random_poly(&mut rng, &v, 2, 3), random_poly(&mut rng, &v, 2, 3));
                match kind {
                    0 => &(&a + &b) + &c == &a + &(&b + &c) && &a + &b == &b + &a,
                    1 => &a * &(&b + &c) == &(&a * &b) + &(&a * &c),
                    _ => &(&a * &b) * &c == &a * &(&b * &c) && &a * &b == &b * &a && &a - &a == Polynomial::zero(&v),
                }
            }
            3 | 4 => {
                let (a, b) = (random_poly(&mut rng, &v, 2, 3), random_poly(&mut rng, &v, 2, 3));
                let i = kind - 3;
                (&a * &b).partial(i) == &(&a * &b.partial(i)) + &(&b * &a.partial(i))
            }
            5 | 6 => {
                let (a, b) = (random_poly(&mut rng, &v, 2, 3), random_poly(&mut rng, &v, 2, 3));
                b.is_zero() || (&a * &b).divide_exact(&b).unwrap().as_ref() == Some(&a)
            }
            _ => {
                let rows = rng.gen_range(1..=3);
                let cols = rng.gen_range(2..=4);
                let data: Vec<Vec<Coefficient>> = (0..rows)
                    .map(|_| (0..cols).map(|_| Coefficient::from_int(rng.gen_range(-2..=2))).collect())
                    .collect();
                let m = Matrix::from_rows(data);
                let ns = nullspace(&m);
                ns.iter().all(|k| m.mul_vec(k).iter().all(Coefficient::is_zero)) && rank(&m) + ns.len() == cols
            }
        };
        if ok {
            passed += 1;
        } else if failed.len() < 5 {
            failed.push(n);
        }
        n += 1;
    }
    let elapsed = start.elapsed();
    let ok = passed == C8_IDENTITIES && elapsed < C8_TIME;
    verdict(8, ok, format!("{passed}/{C8_IDENTITIES} identities, {elapsed:?}, first failures {failed:?}"));
}
