//! Dense linear algebra over either exact rationals or complex floats.
//!
//! Everything downstream (Bass operators, determinant formulae, Neumann sums)
//! is generic over a small [`Field`] trait with two implementations:
//! `BigRational` for exact evaluation at integer exponents and `Complex64`
//! for floating evaluation elsewhere. Matrices are small and dense; the
//! exact determinant uses fraction-free (Bareiss) elimination, the floating
//! one Gaussian elimination with partial pivoting.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot mix exact and floating scalars")]
    ModeMismatch,
}

/// Scalar field the matrices are built over.
pub trait Field: Clone + PartialEq + std::fmt::Debug + Zero + One {
    /// Exact arithmetic (rational) as opposed to floating.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn fadd(&self, other: &Self) -> Self;
    fn fsub(&self, other: &Self) -> Self;
    fn fmul(&self, other: &Self) -> Self;
    fn fdiv(&self, other: &Self) -> Option<Self>;
    fn fneg(&self) -> Self;
    /// Magnitude used for pivot selection and near-zero thresholds in
    /// floating mode. Exact mode only distinguishes zero from nonzero.
    fn mag(&self) -> f64;
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn fadd(&self, other: &Self) -> Self {
        self + other
    }
    fn fsub(&self, other: &Self) -> Self {
        self - other
    }
    fn fmul(&self, other: &Self) -> Self {
        self * other
    }
    fn fdiv(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn mag(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            self.to_f64().map(f64::abs).unwrap_or(1.0)
        }
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn fadd(&self, other: &Self) -> Self {
        self + other
    }
    fn fsub(&self, other: &Self) -> Self {
        self - other
    }
    fn fmul(&self, other: &Self) -> Self {
        self * other
    }
    fn fdiv(&self, other: &Self) -> Option<Self> {
        if other.norm() == 0.0 {
            None
        } else {
            Some(self / other)
        }
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn mag(&self) -> f64 {
        self.norm()
    }
}

/// `n^(-s)` for an integer exponent, exactly.
pub fn rational_power(n: &BigUint, s: i64) -> BigRational {
    let n = BigInt::from(n.clone());
    if s >= 0 {
        BigRational::new(BigInt::one(), n.pow(s as u32))
    } else {
        BigRational::from_integer(n.pow((-s) as u32))
    }
}

/// `n^(-s)` for a complex exponent, as `exp(-s ln n)`.
pub fn complex_power(n: &BigUint, s: Complex64) -> Complex64 {
    let ln = n.to_f64().expect("weight fits in f64").ln();
    (-s * ln).exp()
}

/// Square matrix, row-major. Row/column labels are implicit: whoever builds
/// the matrix indexes it by the canonical edge (or colour) order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![F::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.fadd(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.fsub(b))
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        Matrix::from_fn(n, |i, j| {
            let mut acc = F::zero();
            for k in 0..n {
                let p = self.get(i, k).fmul(other.get(k, j));
                acc = acc.fadd(&p);
            }
            acc
        })
    }

    /// Row vector times matrix.
    pub fn row_mul(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|j| {
                let mut acc = F::zero();
                for i in 0..n {
                    acc = acc.fadd(&v[i].fmul(self.get(i, j)));
                }
                acc
            })
            .collect()
    }

    /// Rank-one update `self + u^t * v` for row vectors `u`, `v`.
    pub fn add_outer(&self, u: &[F], v: &[F]) -> Self {
        assert_eq!(u.len(), self.dim);
        assert_eq!(v.len(), self.dim);
        Matrix::from_fn(self.dim, |i, j| self.get(i, j).fadd(&u[i].fmul(&v[j])))
    }

    pub fn max_mag(&self) -> f64 {
        self.data.iter().map(Field::mag).fold(0.0, f64::max)
    }

    /// Determinant. Fraction-free (Bareiss) elimination in exact mode,
    /// partial-pivoting Gaussian elimination in floating mode.
    pub fn det(&self) -> F {
        if F::EXACT {
            self.det_bareiss()
        } else {
            self.det_pivoting()
        }
    }

    fn det_bareiss(&self) -> F {
        let n = self.dim;
        if n == 0 {
            return F::one();
        }
        let mut m = self.clone();
        let mut sign = false;
        let mut prev = F::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                // find a row below with a nonzero pivot
                let swap = (k + 1..n).find(|&r| !m.get(r, k).is_zero());
                match swap {
                    Some(r) => {
                        for j in 0..n {
                            let a = m.get(k, j).clone();
                            let b = m.get(r, j).clone();
                            m.set(k, j, b);
                            m.set(r, j, a);
                        }
                        sign = !sign;
                    }
                    None => return F::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m
                        .get(i, j)
                        .fmul(m.get(k, k))
                        .fsub(&m.get(i, k).fmul(m.get(k, j)));
                    let v = num.fdiv(&prev).expect("exact division in Bareiss step");
                    m.set(i, j, v);
                }
                m.set(i, k, F::zero());
            }
            prev = m.get(k, k).clone();
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign {
            d.fneg()
        } else {
            d
        }
    }

    fn det_pivoting(&self) -> F {
        let n = self.dim;
        if n == 0 {
            return F::one();
        }
        let mut m = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&a, &b| {
                    m.get(a, k)
                        .mag()
                        .partial_cmp(&m.get(b, k).mag())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if m.get(pivot, k).is_zero() {
                return F::zero();
            }
            if pivot != k {
                for j in 0..n {
                    let a = m.get(k, j).clone();
                    let b = m.get(pivot, j).clone();
                    m.set(k, j, b);
                    m.set(pivot, j, a);
                }
                det = det.fneg();
            }
            let p = m.get(k, k).clone();
            det = det.fmul(&p);
            for i in k + 1..n {
                let factor = match m.get(i, k).fdiv(&p) {
                    Some(f) => f,
                    None => return F::zero(),
                };
                for j in k..n {
                    let v = m.get(i, j).fsub(&factor.fmul(m.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solve `self * x = b` for a single right-hand side.
    pub fn solve(&self, b: &[F]) -> Result<Vec<F>, LinalgError> {
        let n = self.dim;
        if b.len() != n {
            return Err(LinalgError::Dimension(format!(
                "rhs length {} vs dim {n}",
                b.len()
            )));
        }
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let pivot = if F::EXACT {
                (k..n).find(|&r| !m.get(r, k).is_zero())
            } else {
                let best = (k..n).max_by(|&a, &b| {
                    m.get(a, k)
                        .mag()
                        .partial_cmp(&m.get(b, k).mag())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                best.filter(|&r| !m.get(r, k).is_zero())
            };
            let pivot = pivot.ok_or(LinalgError::Singular)?;
            if pivot != k {
                for j in 0..n {
                    let a = m.get(k, j).clone();
                    let b2 = m.get(pivot, j).clone();
                    m.set(k, j, b2);
                    m.set(pivot, j, a);
                }
                rhs.swap(k, pivot);
            }
            let p = m.get(k, k).clone();
            for i in k + 1..n {
                let factor = m.get(i, k).fdiv(&p).ok_or(LinalgError::Singular)?;
                for j in k..n {
                    let v = m.get(i, j).fsub(&factor.fmul(m.get(k, j)));
                    m.set(i, j, v);
                }
                let v = rhs[i].fsub(&factor.fmul(&rhs[k]));
                rhs[i] = v;
            }
        }
        let mut x = vec![F::zero(); n];
        for k in (0..n).rev() {
            let mut acc = rhs[k].clone();
            for j in k + 1..n {
                acc = acc.fsub(&m.get(k, j).fmul(&x[j]));
            }
            x[k] = acc.fdiv(m.get(k, k)).ok_or(LinalgError::Singular)?;
        }
        Ok(x)
    }

    /// Partial Neumann sum `I + m + m^2 + ... + m^L`.
    pub fn neumann_partial(&self, horizon: usize) -> Self {
        let mut sum = Matrix::identity(self.dim);
        let mut power = Matrix::identity(self.dim);
        for _ in 0..horizon {
            power = power.matmul(self);
            sum = sum.add(&power);
        }
        sum
    }

    /// Matrix determinant lemma ratio `det(A + u^t v) / det(A) = 1 + v A^{-1} u^t`.
    pub fn mdl_ratio(&self, u: &[F], v: &[F]) -> Result<F, LinalgError> {
        let x = self.solve(u)?;
        let mut acc = F::one();
        for (vi, xi) in v.iter().zip(&x) {
            acc = acc.fadd(&vi.fmul(xi));
        }
        Ok(acc)
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc.fadd(&x.fmul(y));
    }
    acc
}

/// A computed value, tagged by evaluation mode. Exact rationals are produced
/// at integer exponents, complex floats everywhere else.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<Complex64> {
        match self {
            Scalar::Float(z) => Some(*z),
            Scalar::Exact(r) => r.to_f64().map(|x| Complex64::new(x, 0.0)),
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(z) => write!(f, "{}", format_complex(*z)),
        }
    }
}

/// `re±im i` with 15 significant digits.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{:.14e}-{:.14e}i", z.re, -z.im)
    } else {
        format!("{:.14e}+{:.14e}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int_matrix(dim: usize, rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_fn(dim, |i, j| BigRational::from_integer(BigInt::from(rows[i][j])))
    }

    #[test]
    fn det_identity_is_one() {
        let m: Matrix<BigRational> = Matrix::identity(2);
        assert_eq!(m.det(), rat(1, 1));
    }

    #[test]
    fn det_antidiagonal() {
        let m = int_matrix(2, &[&[0, 2], &[2, 0]]);
        assert_eq!(m.det(), rat(-4, 1));
    }

    #[test]
    fn det_empty_matrix_is_one() {
        let m: Matrix<BigRational> = Matrix::zero(0);
        assert_eq!(m.det(), rat(1, 1));
    }

    // dimension <= 5: compare Bareiss against cofactor expansion
    fn det_cofactor(m: &Matrix<BigRational>) -> BigRational {
        let n = m.dim();
        if n == 0 {
            return rat(1, 1);
        }
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = rat(0, 1);
        for j in 0..n {
            let minor = Matrix::from_fn(n - 1, |r, c| {
                m.get(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = m.get(0, j).fmul(&det_cofactor(&minor));
            if j % 2 == 0 {
                acc = acc.fadd(&term);
            } else {
                acc = acc.fsub(&term);
            }
        }
        acc
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        // small deterministic pseudo-random integer matrices
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 11) as i64 - 5
        };
        for dim in 1..=5 {
            for _ in 0..8 {
                let m = Matrix::from_fn(dim, |_, _| BigRational::from_integer(BigInt::from(next())));
                assert_eq!(m.det(), det_cofactor(&m));
            }
        }
    }

    #[test]
    fn mdl_ratio_trivial_cases() {
        let a: Matrix<BigRational> = Matrix::identity(3);
        let zero = vec![rat(0, 1); 3];
        assert_eq!(a.mdl_ratio(&zero, &zero).unwrap(), rat(1, 1));
        let e1 = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        assert_eq!(a.mdl_ratio(&e1, &e1).unwrap(), rat(2, 1));
    }

    #[test]
    fn mdl_ratio_matches_determinant_quotient() {
        let a = int_matrix(3, &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 2]]);
        let u = vec![rat(1, 2), rat(-1, 1), rat(3, 1)];
        let v = vec![rat(2, 1), rat(0, 1), rat(1, 3)];
        let lhs = a.mdl_ratio(&u, &v).unwrap();
        let rhs = a.add_outer(&u, &v).det().fdiv(&a.det()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn neumann_partial_geometric_identity() {
        // (I - m) * sum_{n<=L} m^n = I - m^{L+1}
        let m = Matrix::from_fn(3, |i, j| rat((i + 2 * j) as i64 % 3 - 1, 7));
        let horizon = 6;
        let sum = m.neumann_partial(horizon);
        let lhs = Matrix::identity(3).sub(&m).matmul(&sum);
        let mut mp = Matrix::identity(3);
        for _ in 0..=horizon {
            mp = mp.matmul(&m);
        }
        let rhs = Matrix::identity(3).sub(&mp);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn neumann_horizon_zero_is_identity() {
        let m = int_matrix(2, &[&[1, 2], &[3, 4]]);
        assert_eq!(m.neumann_partial(0), Matrix::identity(2));
    }

    #[test]
    fn neumann_of_nilpotent_equals_inverse() {
        // strictly upper triangular: finite geometric series equals (I-m)^{-1}
        let m = int_matrix(3, &[&[0, 5, -2], &[0, 0, 3], &[0, 0, 0]]);
        let sum = m.neumann_partial(3);
        let prod = Matrix::identity(3).sub(&m).matmul(&sum);
        assert_eq!(prod, Matrix::identity(3));
    }

    #[test]
    fn solve_singular_reports_error() {
        let m = int_matrix(2, &[&[1, 1], &[1, 1]]);
        assert_eq!(m.solve(&[rat(1, 1), rat(0, 1)]).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn rational_power_signs() {
        let three = BigUint::from(3u32);
        assert_eq!(rational_power(&three, 2), rat(1, 9));
        assert_eq!(rational_power(&three, -2), rat(9, 1));
        assert_eq!(rational_power(&three, 0), rat(1, 1));
    }

    #[test]
    fn complex_power_matches_rational_at_integers() {
        let five = BigUint::from(5u32);
        let z = complex_power(&five, Complex64::new(2.0, 0.0));
        assert!((z.re - 0.04).abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    #[test]
    fn float_determinant_pivots() {
        let m: Matrix<Complex64> = Matrix::from_fn(2, |i, j| {
            Complex64::new(if i == j { 0.0 } else { 2.0 }, 0.0)
        });
        assert!((m.det().re + 4.0).abs() < 1e-12);
    }
}
