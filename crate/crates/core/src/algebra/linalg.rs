//! Exact dense linear algebra over one coefficient field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coeff::Coefficient;
use super::poly::clear_denominators;
use super::AlgebraError;

/// Row-major exact matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Coefficient>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Coefficient::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Coefficient::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Coefficient>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Integer matrix convenience constructor.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Coefficient::from_int(v)).collect())
                .collect(),
        )
    }

    /// An `r x c` matrix with no rows still remembers its column count.
    pub fn with_shape(rows: usize, cols: usize, data: Vec<Coefficient>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Coefficient] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Coefficient]) -> Vec<Coefficient> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Coefficient::zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Coefficient;
    fn index(&self, (i, j): (usize, usize)) -> &Coefficient {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Coefficient {
        &mut self.data[i * self.cols + j]
    }
}

/// Fraction-free (Bareiss) forward elimination. Returns the echelon form and
/// its pivot columns.
pub fn bareiss_echelon(mat: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = mat.clone();
    let mut pivots = Vec::new();
    let mut prev = Coefficient::one();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let piv = m[(r, c)].clone();
        for i in r + 1..m.rows {
            let f = m[(i, c)].clone();
            for j in c..m.cols {
                let v = &(&(&piv * &m[(i, j)]) - &(&f * &m[(r, j)])) / &prev;
                m[(i, j)] = v;
            }
        }
        // entries left of the pivot in later rows are zero by construction
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(mat: &Matrix) -> usize {
    bareiss_echelon(mat).1.len()
}

/// Solve the echelon system for pivot variables given the free ones.
fn back_substitute(ech: &Matrix, pivots: &[usize], rhs: &[Coefficient], x: &mut [Coefficient]) {
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let mut s = rhs[k].clone();
        for j in pc + 1..x.len() {
            if !ech[(k, j)].is_zero() && !x[j].is_zero() {
                s = &s - &(&ech[(k, j)] * &x[j]);
            }
        }
        x[pc] = &s / &ech[(k, pc)];
    }
}

/// Basis of the right nullspace, each vector canonicalized with
/// [`canonical_vector`].
pub fn nullspace(mat: &Matrix) -> Vec<Vec<Coefficient>> {
    let (ech, pivots) = bareiss_echelon(mat);
    let zero_rhs = vec![Coefficient::zero(); pivots.len()];
    let mut basis = Vec::new();
    for free in (0..mat.cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Coefficient::zero(); mat.cols];
        x[free] = Coefficient::one();
        back_substitute(&ech, &pivots, &zero_rhs, &mut x);
        basis.push(canonical_vector(&x));
    }
    basis
}

/// One solution of `mat * x = rhs` (free variables set to zero).
pub fn solve(mat: &Matrix, rhs: &[Coefficient]) -> Result<Vec<Coefficient>, AlgebraError> {
    assert_eq!(rhs.len(), mat.rows);
    let mut aug = Matrix::zeros(mat.rows, mat.cols + 1);
    for i in 0..mat.rows {
        for j in 0..mat.cols {
            aug[(i, j)] = mat[(i, j)].clone();
        }
        aug[(i, mat.cols)] = rhs[i].clone();
    }
    let (ech, pivots) = bareiss_echelon(&aug);
    if pivots.last() == Some(&mat.cols) {
        return Err(AlgebraError::Inconsistent);
    }
    let ech_rhs: Vec<_> = (0..pivots.len()).map(|k| ech[(k, mat.cols)].clone()).collect();
    let mut x = vec![Coefficient::zero(); mat.cols];
    back_substitute(&ech, &pivots, &ech_rhs, &mut x);
    Ok(x)
}

/// Scale so the first nonzero entry is 1, then clear denominators and remove
/// the integer content. Over the rationals this yields the smallest integer
/// vector with a positive first entry.
pub fn canonical_vector(v: &[Coefficient]) -> Vec<Coefficient> {
    let Some(first) = v.iter().find(|c| !c.is_zero()) else {
        return v.to_vec();
    };
    let inv = first.inv().expect("nonzero");
    let scaled: Vec<Coefficient> = v.iter().map(|c| c * &inv).collect();
    let l = clear_denominators(&scaled);
    let ints: Vec<Coefficient> = scaled.iter().map(|c| c.scale_int(&l)).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(&c.numerator_gcd()));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    let ginv = Coefficient::from_rational(BigRational::new(BigInt::one(), g));
    ints.iter().map(|c| c * &ginv).collect()
}
