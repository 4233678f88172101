//! Exact evaluation of determinant ratios of power-sum matrices, including
//! at removable singularities.
//!
//! The zeta determinant formulae evaluate matrices whose entries are finite
//! sums `Σ c_i · n_i^{-s}` with rational `c_i` and integer bases `n_i >= 1`.
//! At some integer points both determinants vanish (every 1-loop forces a
//! common zero of numerator and denominator at s = -1, and the colour-space
//! operator degenerates at exponent 0), yet the meromorphic ratio has a
//! finite value there.
//!
//! The limit is computed exactly: writing s = s0 + t, each entry expands as
//! a truncated Taylor series in t whose coefficients are polynomials in the
//! symbols λ_p = ln p over the primes p dividing the bases. The λ_p are
//! linearly independent over Q on products, so the lowest-order Taylor
//! coefficients of the two determinants (polynomials in the λ_p) determine
//! the limit: it is finite and rational exactly when the numerator
//! coefficient is a rational multiple of the denominator coefficient.

use crate::linalg::Matrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A finite sum `Σ c_i · n_i^{-s}`, the general entry of the symbolic
/// matrices. Kept normalized: bases strictly increasing, no zero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PowSum {
    terms: Vec<(BigRational, u64)>,
}

impl PowSum {
    pub fn zero() -> Self {
        PowSum { terms: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = PowSum::zero();
        p.push(c, 1);
        p
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// `c · n^{-s}`.
    pub fn power(c: BigRational, n: u64) -> Self {
        assert!(n >= 1, "power base must be positive");
        let mut p = PowSum::zero();
        p.push(c, n);
        p
    }

    pub fn push(&mut self, c: BigRational, n: u64) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|t| t.1.cmp(&n)) {
            Ok(i) => {
                self.terms[i].0 += c;
                if self.terms[i].0.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (c, n)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, n) in &other.terms {
            out.push(c.clone(), *n);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, n) in &other.terms {
            out.push(-c.clone(), *n);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = PowSum::zero();
        for (coeff, n) in &self.terms {
            out.push(coeff * c, *n);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn bases(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|t| t.1)
    }

    /// Exact value at an integer exponent.
    pub fn eval_int(&self, s: i64) -> BigRational {
        let mut acc = BigRational::zero();
        for (c, n) in &self.terms {
            acc += c * crate::linalg::rational_power(&(*n).into(), s);
        }
        acc
    }

    /// Floating value at a complex exponent.
    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        use num_traits::ToPrimitive;
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, n) in &self.terms {
            let cf = c.to_f64().unwrap_or(f64::NAN);
            acc += cf * crate::linalg::complex_power(&(*n).into(), s);
        }
        acc
    }

    /// Taylor coefficient of `t^k` at `s = s0 + t`, as a polynomial in the
    /// log symbols: `n^{-s0-t} = n^{-s0} · (-L(n))^k / k! · t^k + ...` with
    /// `L(n) = Σ_p v_p(n) λ_p` over the prime index map.
    fn taylor_coeff(&self, s0: i64, k: usize, primes: &[u64]) -> LogPoly {
        let mut acc = LogPoly::zero(primes.len());
        for (c, n) in &self.terms {
            let ln = log_form(*n, primes);
            // (-ln)^k / k!
            let mut pow = LogPoly::constant(primes.len(), BigRational::one());
            for _ in 0..k {
                pow = pow.mul(&ln.scale(&-BigRational::one()));
            }
            let mut fact = BigRational::one();
            for i in 1..=k {
                fact *= BigRational::from_integer(BigInt::from(i));
            }
            let coeff = c * crate::linalg::rational_power(&(*n).into(), s0) / fact;
            acc = acc.add(&pow.scale(&coeff));
        }
        acc
    }
}

/// Sparse polynomial in the log symbols λ_p with rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPoly {
    vars: usize,
    terms: BTreeMap<Vec<u8>, BigRational>,
}

impl LogPoly {
    fn zero(vars: usize) -> Self {
        LogPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    fn constant(vars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars], c);
        }
        p
    }

    fn monomial(vars: usize, exps: Vec<u8>, c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let entry = out.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        LogPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Vec<u8> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(m.clone()).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// If `self = c · other` for a rational c, return c.
    fn proportionality(&self, other: &Self) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let (m0, d0) = other.terms.iter().next().unwrap();
        let n0 = self.terms.get(m0)?;
        let c = n0 / d0;
        if self == &other.scale(&c) {
            Some(c)
        } else {
            None
        }
    }

    /// Decompose into (monomial, coefficient) pairs.
    fn monomials(&self) -> impl Iterator<Item = (&Vec<u8>, &BigRational)> {
        self.terms.iter()
    }
}

/// `L(n) = Σ_p v_p(n) λ_p` as a degree-1 polynomial.
fn log_form(n: u64, primes: &[u64]) -> LogPoly {
    let mut p = LogPoly::zero(primes.len());
    let mut m = n;
    for (i, &q) in primes.iter().enumerate() {
        let mut v = 0u8;
        while m % q == 0 {
            m /= q;
            v += 1;
        }
        if v > 0 {
            let mut exps = vec![0; primes.len()];
            exps[i] = 1;
            p = p.add(&LogPoly::monomial(
                primes.len(),
                exps,
                BigRational::from_integer(BigInt::from(v)),
            ));
        }
    }
    debug_assert_eq!(m, 1, "all prime factors of bases must be collected");
    p
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Square matrix of power sums.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<PowSum>,
}

impl SymMatrix {
    pub fn zero(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![PowSum::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.set(i, i, PowSum::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &PowSum {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PowSum) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &PowSum) {
        let cur = self.get(i, j).add(v);
        self.set(i, j, cur);
    }

    pub fn sub_matrix(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim * self.dim {
            out.data[i] = self.data[i].sub(&other.data[i]);
        }
        out
    }

    /// Replace a row with `+1` at column `pos` and `-1` at column `neg`.
    pub fn set_signed_indicator_row(&mut self, row: usize, pos: usize, neg: usize) {
        for j in 0..self.dim {
            self.set(row, j, PowSum::zero());
        }
        self.set(row, pos, PowSum::one());
        self.set(row, neg, PowSum::constant(-BigRational::one()));
    }

    pub fn row_difference(&self, r1: usize, r2: usize) -> Vec<PowSum> {
        (0..self.dim)
            .map(|j| self.get(r1, j).sub(self.get(r2, j)))
            .collect()
    }

    pub fn eval_int(&self, s: i64) -> Matrix<BigRational> {
        Matrix::from_fn(self.dim, |i, j| self.get(i, j).eval_int(s))
    }

    pub fn eval_complex(&self, s: Complex64) -> Matrix<Complex64> {
        Matrix::from_fn(self.dim, |i, j| self.get(i, j).eval_complex(s))
    }

    fn all_primes(&self, other: &SymMatrix) -> Vec<u64> {
        let mut primes = std::collections::BTreeSet::new();
        for entry in self.data.iter().chain(&other.data) {
            for n in entry.bases() {
                for p in prime_factors(n) {
                    primes.insert(p);
                }
            }
        }
        primes.into_iter().collect()
    }

    /// Taylor coefficient of `t^k` of `det(M(s0 + t))`, as a polynomial in
    /// the log symbols. Expanded by multilinearity: the rows carrying
    /// derivative order split into λ-monomial components, each yielding an
    /// exact rational determinant.
    fn det_taylor_coeff(&self, s0: i64, k: usize, primes: &[u64]) -> LogPoly {
        let n = self.dim;
        if n == 0 {
            return if k == 0 {
                LogPoly::constant(primes.len(), BigRational::one())
            } else {
                LogPoly::zero(primes.len())
            };
        }
        let base: Matrix<BigRational> = self.eval_int(s0);
        if k == 0 {
            return LogPoly::constant(primes.len(), base.det());
        }
        // jet rows: row i at order d, as a LogPoly-valued row
        let row_at_order = |i: usize, d: usize| -> Vec<LogPoly> {
            (0..n).map(|j| self.get(i, j).taylor_coeff(s0, d, primes)).collect()
        };
        let mut acc = LogPoly::zero(primes.len());
        // compositions: choose rows i1 < ... < ij with positive orders summing to k
        let mut rows: Vec<(usize, usize)> = Vec::new();
        fn assign(
            start: usize,
            remaining: usize,
            n: usize,
            rows: &mut Vec<(usize, usize)>,
            sink: &mut dyn FnMut(&[(usize, usize)]),
        ) {
            if remaining == 0 {
                sink(rows);
                return;
            }
            for i in start..n {
                for d in 1..=remaining {
                    rows.push((i, d));
                    assign(i + 1, remaining - d, n, rows, sink);
                    rows.pop();
                }
            }
        }
        let mut add_term = |assignment: &[(usize, usize)]| {
            // expand each replaced row into λ-monomial components
            let replaced: Vec<(usize, Vec<(Vec<u8>, Vec<BigRational>)>)> = assignment
                .iter()
                .map(|&(i, d)| {
                    let row = row_at_order(i, d);
                    // collect the monomials that occur in this row
                    let mut mono_set = std::collections::BTreeSet::new();
                    for e in &row {
                        for (m, _) in e.monomials() {
                            mono_set.insert(m.clone());
                        }
                    }
                    let comps = mono_set
                        .into_iter()
                        .map(|m| {
                            let coeffs: Vec<BigRational> = row
                                .iter()
                                .map(|e| {
                                    e.monomials()
                                        .find(|(mm, _)| *mm == &m)
                                        .map(|(_, c)| c.clone())
                                        .unwrap_or_else(BigRational::zero)
                                })
                                .collect();
                            (m, coeffs)
                        })
                        .collect();
                    (i, comps)
                })
                .collect();
            // cartesian product over the replaced rows' components
            fn walk(
                replaced: &[(usize, Vec<(Vec<u8>, Vec<BigRational>)>)],
                idx: usize,
                mono: Vec<u8>,
                chosen: &mut Vec<(usize, Vec<BigRational>)>,
                base: &Matrix<BigRational>,
                acc: &mut LogPoly,
                vars: usize,
            ) {
                if idx == replaced.len() {
                    let n = base.dim();
                    let m = Matrix::from_fn(n, |i, j| {
                        for (r, row) in chosen.iter() {
                            if *r == i {
                                return row[j].clone();
                            }
                        }
                        base.get(i, j).clone()
                    });
                    let d = m.det();
                    if !d.is_zero() {
                        *acc = acc.add(&LogPoly::monomial(vars, mono, d));
                    }
                    return;
                }
                let (row_idx, comps) = &replaced[idx];
                for (m, coeffs) in comps {
                    let joined: Vec<u8> = mono.iter().zip(m).map(|(a, b)| a + b).collect();
                    chosen.push((*row_idx, coeffs.clone()));
                    walk(replaced, idx + 1, joined, chosen, base, acc, vars);
                    chosen.pop();
                }
            }
            let mut chosen = Vec::new();
            walk(
                &replaced,
                0,
                vec![0; primes.len()],
                &mut chosen,
                &base,
                &mut acc,
                primes.len(),
            );
        };
        assign(0, k, n, &mut rows, &mut add_term);
        acc
    }
}

/// Outcome of `det(num)/det(den)` at an integer exponent, with removable
/// singularities resolved exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum DetRatio {
    Finite(BigRational),
    /// Denominator vanishes to strictly lower order: the ratio diverges.
    Pole,
    /// 0/0 beyond the implemented Taylor order, or a limit that is not a
    /// rational number.
    Unresolved(String),
}

const MAX_TAYLOR_ORDER: usize = 5;

/// Shared-denominator evaluator: caches the denominator determinant's value
/// (or its first nonzero Taylor coefficient) so a family of numerators over
/// the same denominator pays for the singular expansion once.
pub struct RatioEvaluator {
    den: SymMatrix,
    s0: i64,
    primes: Vec<u64>,
    den_det: BigRational,
    /// (order, coefficient) of the first nonzero Taylor coefficient, filled
    /// lazily when the plain determinant vanishes.
    den_lowest: Option<(usize, LogPoly)>,
}

impl RatioEvaluator {
    /// `primes_hint` must cover the primes of every numerator base that will
    /// be queried (the denominator's own bases are added automatically).
    pub fn new(den: SymMatrix, s0: i64, primes_hint: &[u64]) -> Self {
        let mut primes: std::collections::BTreeSet<u64> = primes_hint.iter().copied().collect();
        for p in den.all_primes(&den) {
            primes.insert(p);
        }
        let den_det = den.eval_int(s0).det();
        RatioEvaluator {
            den,
            s0,
            primes: primes.into_iter().collect(),
            den_det,
            den_lowest: None,
        }
    }

    fn den_lowest(&mut self) -> Option<&(usize, LogPoly)> {
        if self.den_lowest.is_none() {
            for k in 1..=MAX_TAYLOR_ORDER {
                let c = self.den.det_taylor_coeff(self.s0, k, &self.primes);
                if !c.is_zero() {
                    self.den_lowest = Some((k, c));
                    break;
                }
            }
        }
        self.den_lowest.as_ref()
    }

    /// `det(num)/det(self.den)` at `s0`, resolving a common zero by the
    /// one-sided limit in s.
    pub fn ratio(&mut self, num: &SymMatrix) -> DetRatio {
        assert_eq!(num.dim(), self.den.dim());
        let n0 = num.eval_int(self.s0).det();
        if !self.den_det.is_zero() {
            return DetRatio::Finite(n0 / self.den_det.clone());
        }
        if !n0.is_zero() {
            return DetRatio::Pole;
        }
        let s0 = self.s0;
        let primes = self.primes.clone();
        let (den_order, den_coeff) = match self.den_lowest() {
            Some((k, c)) => (*k, c.clone()),
            None => {
                return DetRatio::Unresolved(format!(
                    "denominator vanishes beyond Taylor order {MAX_TAYLOR_ORDER}"
                ))
            }
        };
        for k in 1..=den_order {
            let c = num.det_taylor_coeff(s0, k, &primes);
            if !c.is_zero() {
                if k < den_order {
                    return DetRatio::Pole;
                }
                return match c.proportionality(&den_coeff) {
                    Some(v) => DetRatio::Finite(v),
                    None => DetRatio::Unresolved(
                        "limit exists but is not a rational number".to_string(),
                    ),
                };
            }
        }
        // numerator vanishes to strictly higher order: the limit is 0
        DetRatio::Finite(BigRational::zero())
    }
}

/// Exact ratio `det(num)/det(den)` at `s = s0`, taking the one-sided limit
/// along s when both determinants vanish.
pub fn det_ratio_at(num: &SymMatrix, den: &SymMatrix, s0: i64) -> DetRatio {
    let primes = num.all_primes(den);
    RatioEvaluator::new(den.clone(), s0, &primes).ratio(num)
}

/// (order, leading Taylor coefficient) of `det(m(s0 + t))`, or None when the
/// determinant vanishes beyond the implemented order.
fn det_lowest(m: &SymMatrix, s0: i64, primes: &[u64]) -> Option<(usize, LogPoly)> {
    let d0 = m.eval_int(s0).det();
    if !d0.is_zero() {
        return Some((0, LogPoly::constant(primes.len(), d0)));
    }
    for k in 1..=MAX_TAYLOR_ORDER {
        let c = m.det_taylor_coeff(s0, k, primes);
        if !c.is_zero() {
            return Some((k, c));
        }
    }
    None
}

/// Exact limit of `Π det(num_i) / Π det(den_j)` at `s = s0`: the orders of
/// vanishing add across factors and the leading coefficients multiply, so
/// the limit is finite and rational exactly when the orders balance and the
/// two coefficient products are proportional. Used for identities whose
/// individual factors have irrational limits that cancel in the product.
pub fn det_ratio_product(nums: &[&SymMatrix], dens: &[&SymMatrix], s0: i64) -> DetRatio {
    let mut primes = std::collections::BTreeSet::new();
    for m in nums.iter().chain(dens) {
        for p in m.all_primes(m) {
            primes.insert(p);
        }
    }
    let primes: Vec<u64> = primes.into_iter().collect();
    let vars = primes.len();
    let mut num_order = 0usize;
    let mut num_lead = LogPoly::constant(vars, BigRational::one());
    for m in nums {
        match det_lowest(m, s0, &primes) {
            Some((k, c)) => {
                num_order += k;
                num_lead = num_lead.mul(&c);
            }
            None => {
                return DetRatio::Unresolved(format!(
                    "a numerator factor vanishes beyond Taylor order {MAX_TAYLOR_ORDER}"
                ))
            }
        }
    }
    let mut den_order = 0usize;
    let mut den_lead = LogPoly::constant(vars, BigRational::one());
    for m in dens {
        match det_lowest(m, s0, &primes) {
            Some((k, c)) => {
                den_order += k;
                den_lead = den_lead.mul(&c);
            }
            None => {
                return DetRatio::Unresolved(format!(
                    "a denominator factor vanishes beyond Taylor order {MAX_TAYLOR_ORDER}"
                ))
            }
        }
    }
    if num_order > den_order {
        return DetRatio::Finite(BigRational::zero());
    }
    if num_order < den_order {
        return DetRatio::Pole;
    }
    match num_lead.proportionality(&den_lead) {
        Some(c) => DetRatio::Finite(c),
        None => DetRatio::Unresolved("limit exists but is not a rational number".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn powsum_eval() {
        // 2 - 3^{-s} at s = 2 is 2 - 1/9
        let mut p = PowSum::constant(rat(2, 1));
        p.push(-BigRational::one(), 3);
        assert_eq!(p.eval_int(2), rat(17, 9));
        assert_eq!(p.eval_int(-1), -BigRational::one());
    }

    #[test]
    fn powsum_normalizes() {
        let mut p = PowSum::power(rat(1, 1), 5);
        p.push(rat(-1, 1), 5);
        assert!(p.is_zero());
    }

    #[test]
    fn regular_ratio() {
        // num = [[2^{-s}]], den = [[3^{-s}]] at s=1: (1/2)/(1/3) = 3/2
        let mut num = SymMatrix::zero(1);
        num.set(0, 0, PowSum::power(BigRational::one(), 2));
        let mut den = SymMatrix::zero(1);
        den.set(0, 0, PowSum::power(BigRational::one(), 3));
        assert_eq!(det_ratio_at(&num, &den, 1), DetRatio::Finite(rat(3, 2)));
    }

    #[test]
    fn removable_singularity_first_order() {
        // num = [[2^{-s} - 4^{-s}]], den = [[1 - 2^{-s}]] at s = 0: both vanish;
        // num ~ (ln 4 - ln 2) t = (ln 2) t, den ~ (ln 2) t, so the limit is 1.
        let mut num = SymMatrix::zero(1);
        num.set(0, 0, PowSum::power(BigRational::one(), 2));
        num.add_to(0, 0, &PowSum::power(-BigRational::one(), 4));
        let mut den = SymMatrix::zero(1);
        den.set(0, 0, PowSum::one());
        den.add_to(0, 0, &PowSum::power(-BigRational::one(), 2));
        assert_eq!(det_ratio_at(&num, &den, 0), DetRatio::Finite(rat(1, 1)));
    }

    #[test]
    fn removable_singularity_rejects_irrational() {
        // num = [[1 - 3^{-s}]], den = [[1 - 2^{-s}]] at s = 0: limit ln3/ln2
        let mut num = SymMatrix::zero(1);
        num.set(0, 0, PowSum::one());
        num.add_to(0, 0, &PowSum::power(-BigRational::one(), 3));
        let mut den = SymMatrix::zero(1);
        den.set(0, 0, PowSum::one());
        den.add_to(0, 0, &PowSum::power(-BigRational::one(), 2));
        assert!(matches!(
            det_ratio_at(&num, &den, 0),
            DetRatio::Unresolved(_)
        ));
    }

    #[test]
    fn pole_detected() {
        let mut num = SymMatrix::zero(1);
        num.set(0, 0, PowSum::one());
        let mut den = SymMatrix::zero(1);
        den.set(0, 0, PowSum::one());
        den.add_to(0, 0, &PowSum::power(-BigRational::one(), 2));
        assert_eq!(det_ratio_at(&num, &den, 0), DetRatio::Pole);
    }

    #[test]
    fn second_order_singularity() {
        // num = [[(1-2^{-s})^2 expanded as matrix det]], den likewise, ratio 4:
        // use 2x2 diagonal matrices diag(1-2^{-s}, 1-2^{-s}) and
        // diag(1-2^{-s}, (1-2^{-s})/4)... simpler: num = diag(a, a),
        // den = diag(a, a/4), where a = 1 - 2^{-s} vanishes at 0.
        let a = {
            let mut p = PowSum::one();
            p.push(-BigRational::one(), 2);
            p
        };
        let mut num = SymMatrix::zero(2);
        num.set(0, 0, a.clone());
        num.set(1, 1, a.clone());
        let mut den = SymMatrix::zero(2);
        den.set(0, 0, a.clone());
        den.set(1, 1, a.scale(&rat(1, 4)));
        assert_eq!(det_ratio_at(&num, &den, 0), DetRatio::Finite(rat(4, 1)));
    }
}

/// Diagnostic: the first Taylor orders (up to `kmax`) at which det(M(s0+t))
/// has a nonzero coefficient, with per-order timing. Used to size the
/// acceptance instances.
pub fn taylor_order_probe(m: &SymMatrix, s0: i64, kmax: usize) -> Vec<(usize, bool)> {
    let primes = m.all_primes(m);
    let mut out = Vec::new();
    let d0 = m.eval_int(s0).det();
    out.push((0, !num_traits::Zero::is_zero(&d0)));
    if !num_traits::Zero::is_zero(&d0) {
        return out;
    }
    for k in 1..=kmax {
        let c = m.det_taylor_coeff(s0, k, &primes);
        out.push((k, !c.is_zero()));
        if !c.is_zero() {
            break;
        }
    }
    out
}
