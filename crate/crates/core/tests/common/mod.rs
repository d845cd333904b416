#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use koopman::algebra::{vars_from, Polynomial, Vars, VectorField};
use koopman::manifold::{ManifoldPair, Provenance};
use koopman::sysparse::parse_polynomial;

pub fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn xy() -> Vars {
    vars_from(&["x", "y"])
}

pub fn poly(v: &Vars, s: &str, d: Option<i64>) -> Polynomial {
    parse_polynomial(s, v, d).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn field(comps: &[&str], d: Option<i64>) -> VectorField {
    let v = xy();
    VectorField::new(comps.iter().map(|c| poly(&v, c, d)).collect()).unwrap()
}

pub fn verified(f: &VectorField, ms: &[&str], d: Option<i64>) -> Vec<ManifoldPair> {
    let v = xy();
    ms.iter()
        .map(|m| ManifoldPair::verify(&poly(&v, m, d), f, Provenance::UserSupplied).unwrap().expect("invariant"))
        .collect()
}

/// The four planar systems with their manifold lists.
pub struct Example {
    pub name: &'static str,
    pub field: VectorField,
    pub manifolds: Vec<ManifoldPair>,
    pub d: Option<i64>,
}

pub fn examples() -> Vec<Example> {
    let mk = |name, comps: &[&str], ms: &[&str], d| {
        let f = field(comps, d);
        let manifolds = verified(&f, ms, d);
        Example { name, field: f, manifolds, d }
    };
    vec![
        mk("ex1", &["x*y", "y^2 - x - 1"], &["x", "y - x - 1", "y + x + 1"], None),
        mk("ex2", &["x - x*y", "-x - y - y^2"], &["x", "x + 2*y", "1 + x + y"], None),
        mk("ex4", &["x - x*y", "-y + x^2 - 2*y^2"], &["x", "x^2 - 3*y", "1 - x^2 + 2*y"], None),
        mk(
            "ex5",
            &["x - y - x^2", "-x - y - x*y"],
            &["y - (1+sqrt(2))*x", "y - (1-sqrt(2))*x", "y - x + 2"],
            Some(2),
        ),
    ]
}

/// Run the CLI in-process; returns (exit code, stdout, stderr).
pub fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["koopman"];
    full.extend_from_slice(args);
    let code = koopman::cli::run_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// `key=value` lines of a `--kv` report.
pub fn kv(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
