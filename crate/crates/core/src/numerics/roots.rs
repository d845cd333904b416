//! Simultaneous root finding (Aberth–Ehrlich) for univariate polynomials.

use num_complex::Complex64;

use super::NumericsError;

/// Horner evaluation of `p(z)` and `p'(z)`; coefficients ascending.
pub fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All complex roots of the polynomial with ascending coefficients `coeffs`,
/// repeated by multiplicity, sorted by (re, im).
pub fn roots_univariate_numeric(coeffs: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(NumericsError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    // exact zero roots
    let lead_zeros = c.iter().take_while(|v| v.norm() == 0.0).count();
    roots.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(lead_zeros));
    let c = &c[lead_zeros..];
    let n = c.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-c[0] / c[1]);
        sort_roots(&mut roots);
        return Ok(roots);
    }
    let lc = c[n];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lc).collect();
    // Cauchy-type radius for the starting circle
    let radius = monic[..n].iter().map(|v| v.norm()).fold(0.0, f64::max) + 1.0;
    let r0 = radius.min(
        // geometric mean of root moduli is |c0|^(1/n)
        monic[0].norm().powf(1.0 / n as f64).max(1e-3) * 1.5,
    );
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..1000 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let w = if denom.norm() == 0.0 || !denom.is_finite() { ratio } else { ratio / denom };
            if !w.is_finite() {
                z[i] += Complex64::new(1e-8, 1e-8);
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    // Newton polish on the original coefficients
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            let cand = *zi - step;
            if horner(c, cand).norm() <= p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    roots.extend(z);
    sort_roots(&mut roots);
    Ok(roots)
}

pub fn roots_real_coeffs(coeffs: &[f64]) -> Result<Vec<Complex64>, NumericsError> {
    let c: Vec<Complex64> = coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    roots_univariate_numeric(&c)
}

fn sort_roots(r: &mut [Complex64]) {
    r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal)));
}

/// Group numerically coincident roots: `(mean root, multiplicity)`.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut sum = roots[i];
        let mut count = 1;
        used[i] = true;
        for j in i + 1..roots.len() {
            if !used[j] && (roots[j] - roots[i]).norm() <= tol * roots[i].norm().max(1.0) {
                used[j] = true;
                sum += roots[j];
                count += 1;
            }
        }
        out.push((sum / count as f64, count));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_pair() {
        let r = roots_real_coeffs(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn product_plant() {
        // (x-1)(x+2)(x-3)(x-0.5)
        let roots = [1.0, -2.0, 3.0, 0.5];
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, v) in c.iter().enumerate() {
                next[i + 1] += v;
                next[i] -= r * v;
            }
            c = next;
        }
        let got = roots_real_coeffs(&c).unwrap();
        let mut want = roots.to_vec();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(want) {
            assert!((g.re - w).abs() < 1e-12 && g.im.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_roots_factored() {
        let r = roots_real_coeffs(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(r, vec![Complex64::new(0.0, 0.0); 2]);
        assert!(roots_real_coeffs(&[0.0]).is_err());
    }

    #[test]
    fn repeated_roots_cluster() {
        // (x-1)^2 (x+1)
        let r = roots_real_coeffs(&[1.0, -1.0, -1.0, 1.0]).unwrap();
        let cl = cluster_roots(&r, 1e-6);
        assert_eq!(cl.len(), 2);
        assert!(cl.iter().any(|(z, m)| *m == 2 && (z.re - 1.0).abs() < 1e-6));
    }
}
