use crate::algebra::{Polynomial, Vars};

use super::NumericsError;

/// Determinant of a polynomial matrix by fraction-free elimination.
pub fn det_bareiss(mut m: Vec<Vec<Polynomial>>, vars: &Vars) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(vars);
    }
    let mut sign = false;
    let mut prev = Polynomial::one(vars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Polynomial::zero(vars);
            };
            m.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .divide_exact(&prev)
                    .expect("shared variables")
                    .expect("Bareiss division is exact");
            }
            m[i][k] = Polynomial::zero(vars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Sylvester resultant of `p` and `q` with respect to variable `var`.
pub fn sylvester_resultant(p: &Polynomial, q: &Polynomial, var: usize) -> Result<Polynomial, NumericsError> {
    p.check_vars(q).map_err(NumericsError::Algebra)?;
    if !p.is_exact() || !q.is_exact() {
        return Err(NumericsError::Algebra(crate::algebra::AlgebraError::NotExact));
    }
    let vars = p.vars().clone();
    if p.is_zero() || q.is_zero() {
        return Ok(Polynomial::zero(&vars));
    }
    let pc = p.coeffs_in(var);
    let qc = q.coeffs_in(var);
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    if m == 0 {
        return Ok(p.pow(n as u32));
    }
    if n == 0 {
        return Ok(q.pow(m as u32));
    }
    let size = m + n;
    let zero = Polynomial::zero(&vars);
    let mut rows = vec![vec![zero.clone(); size]; size];
    for i in 0..n {
        for (k, c) in pc.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in qc.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    Ok(det_bareiss(rows, &vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{vars_from, Coefficient};

    #[test]
    fn fixed_point_projection() {
        let v = vars_from(&["x", "y"]);
        let x = Polynomial::var(&v, 0);
        let y = Polynomial::var(&v, 1);
        let one = Polynomial::one(&v);
        let f1 = &x * &y;
        let f2 = &(&y.pow(2) - &x) - &one;
        let r = sylvester_resultant(&f1, &f2, 1).unwrap();
        assert!(!r.uses_var(1));
        for root in [0i64, -1] {
            let val = r.eval(&[Coefficient::from_int(root), Coefficient::zero()]);
            assert!(val.is_zero(), "resultant nonzero at x = {root}");
        }
    }

    #[test]
    fn univariate_common_root() {
        let v = vars_from(&["x"]);
        let x = Polynomial::var(&v, 0);
        let one = Polynomial::one(&v);
        let r = sylvester_resultant(&(&x - &one), &(&x.pow(2) - &one), 0).unwrap();
        assert!(r.is_zero());
        let r = sylvester_resultant(&(&x - &one), &(&x + &one), 0).unwrap();
        assert_eq!(r, Polynomial::constant(&v, Coefficient::from_int(2)));
    }
}
