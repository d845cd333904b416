//! Linear manifold candidates from fixed points and Jacobian eigenvectors.

use crate::algebra::{Coefficient, Field, Polynomial, VectorField};

use super::fixed::{fixed_points_in, FixedPoint};
use super::rational::{rationalize, DEFAULT_DEN_BOUND};
use super::{dedup_pairs, ManifoldError, ManifoldPair, Provenance};

/// `a*x + b*y + c` over the vector field's variables.
fn line(field: &VectorField, a: Coefficient, b: Coefficient, c: Coefficient) -> Polynomial {
    let v = field.vars();
    &(&Polynomial::var(v, 0).scale(&a) + &Polynomial::var(v, 1).scale(&b)) + &Polynomial::constant(v, c)
}

/// Line through `p` along direction `d`, exact.
fn exact_line(field: &VectorField, p: &[Coefficient], d: &[Coefficient]) -> Polynomial {
    // d1*(x - px) - d0*(y - py)
    let c = &(&d[0] * &p[1]) - &(&d[1] * &p[0]);
    line(field, d[1].clone(), -&d[0], c)
}

/// Line through `p` along `d` from floats, rationalized after scaling the
/// largest coefficient to one.
fn numeric_line(field: &VectorField, ambient: Field, p: &[f64], d: &[f64]) -> Option<Polynomial> {
    let coeffs = [d[1], -d[0], d[0] * p[1] - d[1] * p[0]];
    let big = coeffs[..2].iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
    if big.abs() < 1e-12 {
        return None;
    }
    let r: Option<Vec<Coefficient>> = coeffs.iter().map(|v| rationalize(v / big, ambient, DEFAULT_DEN_BOUND)).collect();
    let r = r?;
    Some(line(field, r[0].clone(), r[1].clone(), r[2].clone()))
}

fn real_direction(v: &[num_complex::Complex64]) -> Option<Vec<f64>> {
    let scale = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 || v.iter().any(|z| z.im.abs() > 1e-9 * scale) {
        return None;
    }
    Some(v.iter().map(|z| z.re / scale).collect())
}

fn point_lines(field: &VectorField, ambient: Field, fp: &FixedPoint) -> Vec<Polynomial> {
    if fp.degenerate || !fp.is_real() {
        return Vec::new();
    }
    if let (Some(p), Some(e)) = (&fp.exact, &fp.exact_eigen) {
        if e.field.discriminant().is_none_or(|d| d > 0) {
            return e.vectors.iter().map(|d| exact_line(field, p, d)).collect();
        }
    }
    let p = fp.real_coords();
    fp.eigenvectors
        .iter()
        .filter_map(|v| real_direction(v))
        .filter_map(|d| numeric_line(field, ambient, &p, &d))
        .collect()
}

fn pair_line(field: &VectorField, ambient: Field, a: &FixedPoint, b: &FixedPoint) -> Option<Polynomial> {
    if let (Some(p), Some(q)) = (&a.exact, &b.exact) {
        let d = [&q[0] - &p[0], &q[1] - &p[1]];
        return Some(exact_line(field, p, &d));
    }
    let (p, q) = (a.real_coords(), b.real_coords());
    numeric_line(field, ambient, &p, &[q[0] - p[0], q[1] - p[1]])
}

/// Exactly verified linear manifolds through fixed points: along each
/// Jacobian eigenvector and through each pair of real fixed points.
pub fn seed_linear_candidates(field: &VectorField, ambient: Field) -> Result<Vec<ManifoldPair>, ManifoldError> {
    if field.dim() != 2 {
        return Err(ManifoldError::Dimension(field.dim()));
    }
    let pts = match fixed_points_in(field, ambient) {
        Ok(p) => p,
        Err(ManifoldError::NonIsolated) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let real: Vec<&FixedPoint> = pts.iter().filter(|p| p.is_real()).collect();
    let mut cands = Vec::new();
    for p in &real {
        cands.extend(point_lines(field, ambient, p));
    }
    for (i, a) in real.iter().enumerate() {
        for b in &real[i + 1..] {
            cands.extend(pair_line(field, ambient, a, b));
        }
    }
    let mut out = Vec::new();
    for c in cands {
        if c.is_constant() {
            continue;
        }
        if let Some(pair) = ManifoldPair::verify(&c, field, Provenance::EigenvectorSeeded)? {
            out.push(pair);
        }
    }
    let mut out = dedup_pairs(out);
    out.sort_by(|a, b| a.m().to_string().cmp(&b.m().to_string()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars_from;
    use crate::manifold::tests::field;
    use crate::sysparse::parse_polynomial;

    fn ms(pairs: &[ManifoldPair]) -> Vec<String> {
        pairs.iter().map(|p| p.m().to_string()).collect()
    }

    #[test]
    fn linear_example() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x - y", "-2*x"]);
        let s = seed_linear_candidates(&f, Field::Rational).unwrap();
        assert_eq!(ms(&s), vec!["y + x", "y - 2*x"]);
    }

    #[test]
    fn example_one() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x*y", "y^2 - x - 1"]);
        let s = ms(&seed_linear_candidates(&f, Field::Rational).unwrap());
        for m in ["x", "y - x - 1", "y + x + 1"] {
            assert!(s.contains(&m.to_string()), "{m} missing from {s:?}");
        }
    }

    #[test]
    fn sqrt_two_slopes() {
        let v = vars_from(&["x", "y"]);
        let f = field(&v, &["x - y - x^2", "-x - y - x*y"]);
        let s = seed_linear_candidates(&f, Field::Quadratic(2)).unwrap();
        let want = parse_polynomial("y - (1+sqrt(2))*x", &v, Some(2)).unwrap().canonical();
        assert!(s.iter().any(|p| p.m() == &want), "{:?}", ms(&s));
        for p in &s {
            assert!(p.check(&f).unwrap());
        }
    }
}
