//! The zeta function `Z_{Γ,u→w}(s)` of an edge-weighted graph: determinant
//! formula, truncated series with a dual-evaluation check, and the reciprocal.
//!
//! The determinant formula is
//! `Z_{Γ,u→w}(s) = det(I - E(s) + U_{u,w}(s)) / det(I - E(s)) + ε_u(w)`
//! where `E(s)` is the edge-indexed Bass operator, `U` a low-rank
//! perturbation depending on the source and target sites, and `ε` a unit
//! term matching the short paths that the determinant ratio does not see.
//!
//! Every 1-loop pair with equal weights makes numerator and denominator
//! share the analytic factor `1 - n^{-s} + (n-1)^{-s}` (their rows at the
//! loop pair differ by exactly that multiple of `e_l - e_l̄`). The factor
//! vanishes at s = -1, so both matrices are rank-deficient there even though
//! the zeta value is finite. `regularized_ratio` cancels those factors by a
//! simultaneous row replacement before evaluating, and falls back to the
//! exact Taylor-limit engine for whatever degeneracy remains.

use crate::graph::{Site, WeightedGraph};
use crate::limits::{det_ratio_at, DetRatio, PowSum, SymMatrix};
use crate::linalg::{dot, Field, Matrix, Scalar};
use crate::weights::setting_gamma_ok;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("pole: denominator determinant vanishes{}", if *.candidate { " (within floating tolerance)" } else { "" })]
    Pole { candidate: bool },
    #[error("indeterminate 0/0 determinant ratio: {0}")]
    Indeterminate(String),
    #[error("series and operator evaluation disagree: {0}")]
    DualMismatch(String),
    #[error("I - G_u(s) is singular")]
    SingularSystem,
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// Exponent argument: integer exponents run exactly over the rationals,
/// anything else runs in complex floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SArg {
    Int(i64),
    Complex(Complex64),
}

impl SArg {
    pub fn parse(text: &str) -> Option<SArg> {
        if let Ok(v) = text.parse::<i64>() {
            return Some(SArg::Int(v));
        }
        let (re, im) = match text.split_once(',') {
            Some((re, im)) => (re.trim().parse::<f64>().ok()?, im.trim().parse::<f64>().ok()?),
            None => (text.trim().parse::<f64>().ok()?, 0.0),
        };
        Some(SArg::Complex(Complex64::new(re, im)))
    }
}

/// A zeta value together with evaluation flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaValue {
    pub value: Scalar,
    /// The graph fails the convergence setting: the value is the formal
    /// determinant-ratio evaluation, not the sum of a convergent series.
    pub formal: bool,
}

fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Indicator row vector `e_u` over the edges: the unit vector for an edge,
/// the indicator of `t^{-1}(u)` for a vertex.
pub fn e_vec(g: &WeightedGraph, u: Site) -> Vec<bool> {
    let mut v = vec![false; g.edge_count()];
    match u {
        Site::Edge(e) => v[e] = true,
        Site::Vertex(c) => {
            for e in 0..g.edge_count() {
                if g.terminus(e) == c {
                    v[e] = true;
                }
            }
        }
    }
    v
}

/// `e_u + e_ū` for an edge, `e_u` for a vertex.
fn site_vec(g: &WeightedGraph, u: Site) -> Vec<bool> {
    match u {
        Site::Vertex(_) => e_vec(g, u),
        Site::Edge(e) => {
            let mut v = e_vec(g, u);
            v[g.inverse(e)] = true;
            v
        }
    }
}

/// `N_edg(a, b)` for consecutive edges: `ω(b)` minus one on backtracking.
fn n_edg_step(g: &WeightedGraph, a: usize, b: usize) -> u64 {
    if b == g.inverse(a) {
        g.weight(b) - 1
    } else {
        g.weight(b)
    }
}

/// Bass operator `E(s)`: entry `(a, b)` is `N_edg(a,b)^{-s}` when
/// `t(a) = o(b)`, zero otherwise. Returned symbolically in s.
pub fn bass_e(g: &WeightedGraph) -> SymMatrix {
    let ne = g.edge_count();
    let mut m = SymMatrix::zero(ne);
    for a in 0..ne {
        for &b in g.out_edges(g.terminus(a)) {
            m.set(a, b, PowSum::power(BigRational::one(), n_edg_step(g, a, b)));
        }
    }
    m
}

/// Perturbation matrix `U_{u,w}(s)` of the determinant formula.
pub fn perturbation_u(g: &WeightedGraph, u: Site, w: Site) -> SymMatrix {
    let ne = g.edge_count();
    let mut m = SymMatrix::zero(ne);
    let col = site_vec(g, w); // left factor e_w^t resp. (e_w + e_w̄)^t
    match u {
        Site::Vertex(c) => {
            match w {
                // Σ_{a ∈ o^{-1}(u)} ω(a)^{-s} e_w^t · e_a
                Site::Vertex(_) => {
                    for i in 0..ne {
                        if !col[i] {
                            continue;
                        }
                        for &a in g.out_edges(c) {
                            m.add_to(i, a, &PowSum::power(BigRational::one(), g.weight(a)));
                        }
                    }
                }
                // Σ_{a ∈ o^{-1}(u)} ω(a)^{-s} (e_w + e_w̄)^t · e_a E(s)
                Site::Edge(_) => {
                    for i in 0..ne {
                        if !col[i] {
                            continue;
                        }
                        for &a in g.out_edges(c) {
                            for &b in g.out_edges(g.terminus(a)) {
                                let base = g.weight(a) * n_edg_step(g, a, b);
                                m.add_to(i, b, &PowSum::power(BigRational::one(), base));
                            }
                        }
                    }
                }
            }
        }
        Site::Edge(e) => {
            // (e_w or e_w + e_w̄)^t · (e_u + e_ū) E(s)
            let ebar = g.inverse(e);
            for i in 0..ne {
                if !col[i] {
                    continue;
                }
                for &x in &[e, ebar] {
                    for &b in g.out_edges(g.terminus(x)) {
                        m.add_to(i, b, &PowSum::power(BigRational::one(), n_edg_step(g, x, b)));
                    }
                }
            }
        }
    }
    m
}

/// Unit term `ε_u(w)`, symbolically in s. It is the integer of the four-case
/// table except in the vertex-to-edge case, where matching the series
/// requires `Σ_{b ∈ {w,w̄} ∩ o^{-1}(u)} ω(b)^{-s} - 1` (the length-one paths
/// the determinant ratio does not capture); at s = -1 this reduces to the
/// tabulated `ω(w) - 1` for non-loop targets.
pub fn epsilon_term(g: &WeightedGraph, u: Site, w: Site) -> PowSum {
    match (u, w) {
        (Site::Vertex(c), Site::Vertex(d)) => {
            PowSum::constant(rat_int(if c == d { 1 } else { 0 } - 1))
        }
        (Site::Vertex(c), Site::Edge(f)) => {
            let mut p = PowSum::constant(rat_int(-1));
            let fbar = g.inverse(f);
            if g.origin(f) == c {
                p = p.add(&PowSum::power(BigRational::one(), g.weight(f)));
            }
            if g.origin(fbar) == c {
                p = p.add(&PowSum::power(BigRational::one(), g.weight(fbar)));
            }
            p
        }
        (Site::Edge(e), Site::Vertex(d)) => {
            let hit = g.origin(e) == d || g.terminus(e) == d;
            PowSum::constant(rat_int(if hit { 1 } else { 0 } - 1))
        }
        (Site::Edge(e), Site::Edge(f)) => {
            let hit = f == e || f == g.inverse(e);
            PowSum::constant(rat_int(if hit { 1 } else { 0 } - 1))
        }
    }
}

/// Unreduced numerator `I - E(s) + U_{u,w}(s)` and denominator `I - E(s)`.
pub fn zeta_matrices_raw(g: &WeightedGraph, u: Site, w: Site) -> (SymMatrix, SymMatrix) {
    let e = bass_e(g);
    let ui = perturbation_u(g, u, w);
    let ident = SymMatrix::identity(g.edge_count());
    let den = ident.sub_matrix(&e);
    let mut num = den.clone();
    for i in 0..g.edge_count() {
        for j in 0..g.edge_count() {
            num.add_to(i, j, ui.get(i, j));
        }
    }
    (num, den)
}

/// Numerator and denominator matrices of the determinant formula, with the
/// common analytic factor of every equal-weight 1-loop pair cancelled by the
/// simultaneous row replacement described in the module docs. The reduction
/// divides both determinants by the same factor, so only their ratio is
/// meaningful afterwards.
pub fn zeta_matrices(g: &WeightedGraph, u: Site, w: Site) -> (SymMatrix, SymMatrix) {
    let (mut num, mut den) = zeta_matrices_raw(g, u, w);
    for l in 0..g.edge_count() {
        let lbar = g.inverse(l);
        if l < lbar && g.is_loop(l) && g.weight(l) == g.weight(lbar) {
            let n = g.weight(l);
            // row_l - row_l̄ equals φ(n,s) · (e_l - e_l̄) with
            // φ(n,s) = 1 - n^{-s} + (n-1)^{-s}, in both matrices
            debug_assert!({
                let mut phi = PowSum::one();
                phi = phi.add(&PowSum::power(-BigRational::one(), n));
                phi = phi.add(&PowSum::power(BigRational::one(), n - 1));
                let diff = den.row_difference(l, lbar);
                let diff_num = num.row_difference(l, lbar);
                (0..g.edge_count()).all(|j| {
                    let expect = if j == l {
                        phi.clone()
                    } else if j == lbar {
                        phi.scale(&-BigRational::one())
                    } else {
                        PowSum::zero()
                    };
                    diff[j] == expect && diff_num[j] == expect
                })
            });
            den.set_signed_indicator_row(lbar, l, lbar);
            num.set_signed_indicator_row(lbar, l, lbar);
        }
    }
    (num, den)
}

const FLOAT_POLE_EPS: f64 = 1e-12;

fn float_pole_threshold<F: Field>(m: &Matrix<F>) -> f64 {
    FLOAT_POLE_EPS * m.max_mag().max(1.0).powi(m.dim() as i32)
}

/// `Z_{Γ,u→w}(s)` by the determinant formula. Integer s evaluates exactly
/// over the rationals (removable singularities included); otherwise the
/// matrices are evaluated in complex floating point, with near-vanishing
/// denominators reported as pole candidates.
pub fn zeta_det(g: &WeightedGraph, u: Site, w: Site, s: &SArg) -> Result<ZetaValue, ZetaError> {
    let formal = !setting_gamma_ok(g);
    let (num, den) = zeta_matrices(g, u, w);
    let eps = epsilon_term(g, u, w);
    match *s {
        SArg::Int(s0) => match det_ratio_at(&num, &den, s0) {
            DetRatio::Finite(v) => Ok(ZetaValue {
                value: Scalar::Exact(v + eps.eval_int(s0)),
                formal,
            }),
            DetRatio::Pole => Err(ZetaError::Pole { candidate: false }),
            DetRatio::Unresolved(msg) => Err(ZetaError::Indeterminate(msg)),
        },
        SArg::Complex(s0) => {
            let nm = num.eval_complex(s0);
            let dm = den.eval_complex(s0);
            let dd = dm.det();
            let nd = nm.det();
            let thr = float_pole_threshold(&dm);
            if dd.norm() < thr {
                return if nd.norm() < float_pole_threshold(&nm) {
                    Err(ZetaError::Indeterminate(
                        "both determinants within floating tolerance of zero".into(),
                    ))
                } else {
                    Err(ZetaError::Pole { candidate: true })
                };
            }
            Ok(ZetaValue {
                value: Scalar::Float(nd / dd + eps.eval_complex(s0)),
                formal,
            })
        }
    }
}

/// `n^{-s}` in the scalar domain picked by `s`.
fn pow_in_mode(n: &BigUint, s: &SArg) -> Scalar {
    match *s {
        SArg::Int(s0) => Scalar::Exact(crate::linalg::rational_power(n, s0)),
        SArg::Complex(s0) => Scalar::Float(crate::linalg::complex_power(n, s0)),
    }
}

/// Sum over paths of length <= `horizon` from `u` ending at `w`'s site set,
/// weighted by `N_vert^{-s}` (vertex source) or `N_edg^{-s}` (edge source),
/// unit terms included. Dynamic programming over (last edge, weight) states.
fn series_by_paths(g: &WeightedGraph, u: Site, w: Site, s: &SArg, horizon: usize) -> Scalar {
    let ends_at = |e: usize| -> bool {
        match w {
            Site::Vertex(v) => g.terminus(e) == v,
            Site::Edge(f) => e == f || e == g.inverse(f),
        }
    };
    let mut acc_exact = BigRational::zero();
    let mut acc_float = Complex64::new(0.0, 0.0);
    let mut add = |weight: &BigUint, count: &BigUint| {
        match pow_in_mode(weight, s) {
            Scalar::Exact(v) => {
                acc_exact += v * BigRational::from_integer(BigInt::from(count.clone()))
            }
            Scalar::Float(v) => acc_float += v * count.to_f64().unwrap_or(f64::NAN),
        }
    };

    let one = BigUint::one();
    // unit terms (see `epsilon_term` for the edge-source convention)
    match (u, w) {
        (Site::Vertex(c), Site::Vertex(d)) => {
            if c == d {
                add(&one, &one);
            }
        }
        (Site::Vertex(_), Site::Edge(_)) => {}
        (Site::Edge(e), Site::Vertex(d)) => {
            if g.origin(e) == d || g.terminus(e) == d {
                add(&one, &one);
            }
        }
        (Site::Edge(e), Site::Edge(f)) => {
            if f == e || f == g.inverse(e) {
                add(&one, &one);
            }
        }
    }

    let mut layer: BTreeMap<(usize, BigUint), BigUint> = BTreeMap::new();
    match u {
        Site::Vertex(c) => {
            if horizon >= 1 {
                for &e in g.out_edges(c) {
                    *layer
                        .entry((e, BigUint::from(g.weight(e))))
                        .or_insert_with(BigUint::zero) += &one;
                }
                for ((e, weight), count) in &layer {
                    if ends_at(*e) {
                        add(weight, count);
                    }
                }
            }
        }
        Site::Edge(e) => {
            layer.insert((e, one.clone()), one.clone());
            layer.insert((g.inverse(e), one.clone()), one.clone());
        }
    }
    let mut len = 1usize;
    while !layer.is_empty() && len < horizon {
        let mut next: BTreeMap<(usize, BigUint), BigUint> = BTreeMap::new();
        for ((e, weight), count) in &layer {
            for &f in g.out_edges(g.terminus(*e)) {
                let nw = weight * BigUint::from(n_edg_step(g, *e, f));
                *next.entry((f, nw)).or_insert_with(BigUint::zero) += count;
            }
        }
        len += 1;
        for ((e, weight), count) in &next {
            if ends_at(*e) {
                add(weight, count);
            }
        }
        layer = next;
    }
    match s {
        SArg::Int(_) => Scalar::Exact(acc_exact),
        SArg::Complex(_) => Scalar::Float(acc_float),
    }
}

/// The same truncation through the Bass operator: unit terms plus boundary
/// vectors against a partial Neumann sum of `E(s)`.
fn series_by_operator(g: &WeightedGraph, u: Site, w: Site, s: &SArg, horizon: usize) -> Scalar {
    match *s {
        SArg::Int(s0) => Scalar::Exact(series_operator_in::<BigRational>(
            g,
            u,
            w,
            &|n| crate::linalg::rational_power(&BigUint::from(n), s0),
            horizon,
        )),
        SArg::Complex(s0) => Scalar::Float(series_operator_in::<Complex64>(
            g,
            u,
            w,
            &|n| crate::linalg::complex_power(&BigUint::from(n), s0),
            horizon,
        )),
    }
}

fn series_operator_in<F: Field>(
    g: &WeightedGraph,
    u: Site,
    w: Site,
    pow: &dyn Fn(u64) -> F,
    horizon: usize,
) -> F {
    let ne = g.edge_count();
    let e_mat = Matrix::from_fn(ne, |a, b| {
        if g.terminus(a) == g.origin(b) {
            pow(n_edg_step(g, a, b))
        } else {
            F::zero()
        }
    });
    let target = site_vec(g, w);
    let target_f: Vec<F> = target
        .iter()
        .map(|&b| if b { F::one() } else { F::zero() })
        .collect();
    let mut acc = F::zero();
    match u {
        Site::Vertex(c) => {
            // unit
            if let Site::Vertex(d) = w {
                if c == d {
                    acc = acc.fadd(&F::one());
                }
            }
            if horizon >= 1 {
                let source: Vec<F> = (0..ne)
                    .map(|a| {
                        if g.origin(a) == c {
                            pow(g.weight(a))
                        } else {
                            F::zero()
                        }
                    })
                    .collect();
                let neumann = e_mat.neumann_partial(horizon - 1);
                let row = neumann.row_mul(&source);
                acc = acc.fadd(&dot(&row, &target_f));
            }
        }
        Site::Edge(e) => {
            let hit = match w {
                Site::Vertex(d) => g.origin(e) == d || g.terminus(e) == d,
                Site::Edge(f) => f == e || f == g.inverse(e),
            };
            if hit {
                acc = acc.fadd(&F::one());
            }
            if horizon >= 2 {
                let mut source = vec![F::zero(); ne];
                source[e] = F::one();
                source[g.inverse(e)] = F::one();
                let after_one = e_mat.row_mul(&source);
                let neumann = e_mat.neumann_partial(horizon - 2);
                let row = neumann.row_mul(&after_one);
                acc = acc.fadd(&dot(&row, &target_f));
            }
        }
    }
    acc
}

/// Partial sum of the zeta series over paths of length <= `horizon`,
/// computed both by direct path enumeration and through the Bass operator.
/// The two evaluations must agree (exactly at integer s); their common value
/// is returned.
pub fn zeta_series(
    g: &WeightedGraph,
    u: Site,
    w: Site,
    s: &SArg,
    horizon: usize,
) -> Result<Scalar, ZetaError> {
    let by_paths = series_by_paths(g, u, w, s, horizon);
    let by_operator = series_by_operator(g, u, w, s, horizon);
    match (&by_paths, &by_operator) {
        (Scalar::Exact(a), Scalar::Exact(b)) => {
            if a != b {
                return Err(ZetaError::DualMismatch(format!("paths {a} vs operator {b}")));
            }
        }
        (Scalar::Float(a), Scalar::Float(b)) => {
            let scale = a.norm().max(b.norm()).max(1.0);
            if (a - b).norm() > 1e-9 * scale {
                return Err(ZetaError::DualMismatch(format!(
                    "paths {a} vs operator {b}"
                )));
            }
        }
        _ => unreachable!("both evaluations run in the mode of s"),
    }
    Ok(by_operator)
}

/// Reciprocal `Z_{Γ,u→u}(s)^{-1}` through the resolvent formula
/// `1 - Σ_{a∈o^{-1}(c)} ω(a)^{-s} e_a (I - G_c(s))^{-1} e_c^t` (vertex case)
/// resp. `1 - (e_a+e_ā) E(s) (I - G_a(s))^{-1} (e_a+e_ā)^t` (edge case),
/// where `G_u(s) = E(s) - U_{u,u}(s)`.
///
/// When `I - G_u(s)` is singular (which happens with equal-weight loops at
/// s = -1) the algebraically identical determinant form
/// `det(I - E(s)) / det(I - E(s) + U_{u,u}(s))` is evaluated instead through
/// the regularized ratio, which resolves the removable singularity.
pub fn zeta_reciprocal(g: &WeightedGraph, u: Site, s: &SArg) -> Result<Scalar, ZetaError> {
    // the resolvent solve needs the true I - G_u = I - E + U_{u,u};
    // the loop-reduced pair is only valid as a determinant ratio
    let (num, _) = zeta_matrices_raw(g, u, u);
    let (red_num, red_den) = zeta_matrices(g, u, u);
    // right-hand side of the resolvent system: e_c^t for a vertex,
    // (e_a + e_ā)^t for an edge
    let rhs_vec = match u {
        Site::Vertex(_) => e_vec(g, u),
        Site::Edge(_) => site_vec(g, u),
    };
    match *s {
        SArg::Int(s0) => {
            let ig = num.eval_int(s0);
            let rhs: Vec<BigRational> = rhs_vec
                .iter()
                .map(|&b| if b { BigRational::one() } else { BigRational::zero() })
                .collect();
            if let Ok(x) = ig.solve(&rhs) {
                let lead = reciprocal_lead_exact(g, u, s0);
                let mut acc = BigRational::one();
                for (c, xi) in lead.iter().zip(&x) {
                    acc -= c * xi;
                }
                return Ok(Scalar::Exact(acc));
            }
            // singular resolvent: evaluate the determinant form with the
            // removable factors cancelled
            match det_ratio_at(&red_den, &red_num, s0) {
                DetRatio::Finite(v) => Ok(Scalar::Exact(v)),
                DetRatio::Pole => Err(ZetaError::Pole { candidate: false }),
                DetRatio::Unresolved(msg) => Err(ZetaError::Indeterminate(msg)),
            }
        }
        SArg::Complex(s0) => {
            let ig = num.eval_complex(s0);
            let rhs: Vec<Complex64> = rhs_vec
                .iter()
                .map(|&b| {
                    if b {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            match ig.solve(&rhs) {
                Ok(x) => {
                    let lead = reciprocal_lead_float(g, u, s0);
                    let mut acc = Complex64::new(1.0, 0.0);
                    for (c, xi) in lead.iter().zip(&x) {
                        acc -= c * xi;
                    }
                    Ok(Scalar::Float(acc))
                }
                Err(_) => {
                    let nd = red_den.eval_complex(s0);
                    let dd = red_num.eval_complex(s0);
                    let d = dd.det();
                    if d.norm() < float_pole_threshold(&dd) {
                        Err(ZetaError::Pole { candidate: true })
                    } else {
                        Ok(Scalar::Float(nd.det() / d))
                    }
                }
            }
        }
    }
}

fn reciprocal_lead_exact(g: &WeightedGraph, u: Site, s0: i64) -> Vec<BigRational> {
    reciprocal_lead(g, u, &|n| {
        crate::linalg::rational_power(&BigUint::from(n), s0)
    })
}

fn reciprocal_lead_float(g: &WeightedGraph, u: Site, s0: Complex64) -> Vec<Complex64> {
    reciprocal_lead(g, u, &|n| {
        crate::linalg::complex_power(&BigUint::from(n), s0)
    })
}

/// Leading row vector of the resolvent formula: `Σ ω(a)^{-s} e_a` for a
/// vertex, `(e_a + e_ā) E(s)` for an edge.
fn reciprocal_lead<F: Field>(g: &WeightedGraph, u: Site, pow: &dyn Fn(u64) -> F) -> Vec<F> {
    let ne = g.edge_count();
    match u {
        Site::Vertex(c) => (0..ne)
            .map(|a| {
                if g.origin(a) == c {
                    pow(g.weight(a))
                } else {
                    F::zero()
                }
            })
            .collect(),
        Site::Edge(e) => {
            let mut acc = vec![F::zero(); ne];
            for &x in &[e, g.inverse(e)] {
                for &b in g.out_edges(g.terminus(x)) {
                    acc[b] = acc[b].fadd(&pow(n_edg_step(g, x, b)));
                }
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::shapes::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn exact(g: &WeightedGraph, u: Site, w: Site, s: i64) -> BigRational {
        zeta_det(g, u, w, &SArg::Int(s))
            .unwrap()
            .value
            .as_exact()
            .unwrap()
            .clone()
    }

    /// Closed form for the 1-segment: Z_{c→c} and Z_{a→a} with
    /// ω(a) = α+1, ω(ā) = β+1.
    fn segment_closed_cc(alpha: i64, beta: i64, s: i64) -> BigRational {
        let p = |n: i64| crate::linalg::rational_power(&BigUint::from(n as u64), s);
        let num = BigRational::one() + (p(alpha + 1) - p(alpha)) * p(beta);
        let den = BigRational::one() - p(alpha) * p(beta);
        num / den
    }

    fn segment_closed_aa(alpha: i64, beta: i64, s: i64) -> BigRational {
        let p = |n: i64| crate::linalg::rational_power(&BigUint::from(n as u64), s);
        let num = (BigRational::one() + p(alpha)) * (BigRational::one() + p(beta));
        let den = BigRational::one() - p(alpha) * p(beta);
        num / den
    }

    #[test]
    fn segment_matches_closed_forms() {
        for (wa, wb) in [(3i64, 3i64), (4, 3), (5, 2)] {
            let g = segment(wa as u64, wb as u64);
            let c = g.vertex("c").unwrap();
            let a = g.edge("a").unwrap();
            for s in [-1, 2, 3] {
                assert_eq!(
                    exact(&g, Site::Vertex(c), Site::Vertex(c), s),
                    segment_closed_cc(wa - 1, wb - 1, s),
                    "c->c at s={s} on segment({wa},{wb})"
                );
                assert_eq!(
                    exact(&g, Site::Edge(a), Site::Edge(a), s),
                    segment_closed_aa(wa - 1, wb - 1, s),
                    "a->a at s={s}"
                );
            }
        }
    }

    #[test]
    fn sl2_style_edge_zeta() {
        // α = β = p: Z_{a→a}(s) = (1 + p^{-s}) / (1 - p^{-s})
        for p in [2i64, 3, 5] {
            let g = segment((p + 1) as u64, (p + 1) as u64);
            let a = g.edge("a").unwrap();
            for s in [2i64, 3] {
                let got = exact(&g, Site::Edge(a), Site::Edge(a), s);
                let ps = crate::linalg::rational_power(&BigUint::from(p as u64), s);
                let want = (BigRational::one() + ps.clone()) / (BigRational::one() - ps);
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn segment_value_at_one() {
        // α = β = 2 at s = 1: (1+1/2)^2 / (1 - 1/4) = 3
        let g = segment(3, 3);
        let a = g.edge("a").unwrap();
        assert_eq!(exact(&g, Site::Edge(a), Site::Edge(a), 1), rat(3, 1));
    }

    #[test]
    fn loop_matches_closed_form_and_survives_minus_one() {
        // balanced 1-loop: Z_{c→c}(s) = (1 - α^{-s} + (α+1)^{-s}) /
        //                               (1 - α^{-s} - (α+1)^{-s})
        for alpha in [2i64, 3] {
            let g = bouquet(&[(alpha + 1) as u64]);
            let c = 0;
            for s in [-1i64, 2, 3] {
                let p = |n: i64| crate::linalg::rational_power(&BigUint::from(n as u64), s);
                let want = (BigRational::one() - p(alpha) + p(alpha + 1))
                    / (BigRational::one() - p(alpha) - p(alpha + 1));
                assert_eq!(exact(&g, Site::Vertex(c), Site::Vertex(c), s), want);
            }
        }
        // at s = -1 with α = 2 the value is (1-2+3)/(1-2-3) = -2/4 = -1/2
        let g = bouquet(&[3]);
        assert_eq!(exact(&g, Site::Vertex(0), Site::Vertex(0), -1), rat(-1, 2));
    }

    #[test]
    fn loop_edge_closed_form() {
        let g = bouquet(&[3]);
        let a = g.edge("a0").unwrap();
        for s in [-1i64, 2, 3] {
            let p = |n: i64| crate::linalg::rational_power(&BigUint::from(n as u64), s);
            let want = (BigRational::one() + p(2) + p(3))
                / (BigRational::one() - p(2) - p(3));
            assert_eq!(exact(&g, Site::Edge(a), Site::Edge(a), s), want);
        }
    }

    #[test]
    fn epsilon_values() {
        let g = segment_plus_loop(3, 3, 4);
        for v in 0..g.vertex_count() {
            assert_eq!(
                epsilon_term(&g, Site::Vertex(v), Site::Vertex(v)).eval_int(2),
                BigRational::zero()
            );
        }
        for e in 0..g.edge_count() {
            assert_eq!(
                epsilon_term(&g, Site::Edge(e), Site::Edge(e)).eval_int(2),
                BigRational::zero()
            );
        }
        // vertex source, adjacent non-loop edge target, at s = -1: ω(w) - 1
        let a = g.edge("a").unwrap();
        let c = g.origin(a);
        assert_eq!(
            epsilon_term(&g, Site::Vertex(c), Site::Edge(a)).eval_int(-1),
            rat(g.weight(a) as i64 - 1, 1)
        );
    }

    #[test]
    fn perturbation_on_segment() {
        // U_{c,c}(s) has the single nonzero entry (ā, a) = ω(a)^{-s}
        let g = segment(3, 4);
        let a = g.edge("a").unwrap();
        let abar = g.inverse(a);
        let c = g.origin(a);
        let u = perturbation_u(&g, Site::Vertex(c), Site::Vertex(c));
        for i in 0..2 {
            for j in 0..2 {
                let want = if (i, j) == (abar, a) {
                    PowSum::power(BigRational::one(), 3)
                } else {
                    PowSum::zero()
                };
                assert_eq!(*u.get(i, j), want);
            }
        }
    }

    #[test]
    fn series_dual_evaluation_and_convergence() {
        let g = segment(3, 3);
        let c = g.vertex("c").unwrap();
        // L = 2 at s = 1: 1 + (a,ā) with N_vert = 6
        let v = zeta_series(&g, Site::Vertex(c), Site::Vertex(c), &SArg::Int(1), 2).unwrap();
        assert_eq!(v.as_exact().unwrap(), &rat(7, 6));
        // horizon 0 keeps only the unit term
        let v0 = zeta_series(&g, Site::Vertex(c), Site::Vertex(c), &SArg::Int(3), 0).unwrap();
        assert_eq!(v0.as_exact().unwrap(), &BigRational::one());
        // converges to the determinant value at s = 3
        let det = zeta_det(&g, Site::Vertex(c), Site::Vertex(c), &SArg::Int(3)).unwrap();
        let det = det.value.as_exact().unwrap().to_f64().unwrap();
        let mut prev_gap = f64::INFINITY;
        for horizon in [4usize, 8, 12] {
            let sv = zeta_series(&g, Site::Vertex(c), Site::Vertex(c), &SArg::Int(3), horizon)
                .unwrap();
            let gap = (sv.as_exact().unwrap().to_f64().unwrap() - det).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-9);
    }

    #[test]
    fn series_matches_det_for_mixed_sites() {
        // the s-dependent ε correction in the vertex-to-edge case is what
        // makes these agree
        let g = segment_plus_loop(3, 4, 3);
        let s = SArg::Int(4);
        for u in g.sites() {
            for w in g.sites() {
                let det = zeta_det(&g, u, w, &s).unwrap().value;
                let ser = zeta_series(&g, u, w, &s, 40).unwrap();
                let gap = (det.as_float().unwrap() - ser.as_float().unwrap()).norm();
                assert!(
                    gap < 1e-9,
                    "site pair {:?} -> {:?}: det {det:?} vs series {ser:?}",
                    g.site_name(u),
                    g.site_name(w)
                );
            }
        }
    }

    #[test]
    fn reciprocal_consistency() {
        let g = segment(3, 2);
        let s = SArg::Int(2);
        for u in g.sites() {
            let z = zeta_det(&g, u, u, &s).unwrap().value;
            let r = zeta_reciprocal(&g, u, &s).unwrap();
            let prod = z.as_exact().unwrap() * r.as_exact().unwrap();
            assert_eq!(prod, BigRational::one());
        }
    }

    #[test]
    fn reciprocal_at_minus_one_on_loop() {
        // Z_{c→c}(-1) = -1/2, so the reciprocal is -2
        let g = bouquet(&[3]);
        let r = zeta_reciprocal(&g, Site::Vertex(0), &SArg::Int(-1)).unwrap();
        assert_eq!(r.as_exact().unwrap(), &rat(-2, 1));
        // segment ω ≡ 3 at s = -1: Z^{-1} = -1
        let g = segment(3, 3);
        let c = g.vertex("c").unwrap();
        let r = zeta_reciprocal(&g, Site::Vertex(c), &SArg::Int(-1)).unwrap();
        assert_eq!(r.as_exact().unwrap(), &rat(-1, 1));
    }

    #[test]
    fn edge_symmetry() {
        // Z_{b→b} = Z_{b̄→b̄}
        let g = segment_plus_loop(3, 4, 3);
        for e in 0..g.edge_count() {
            let z1 = exact(&g, Site::Edge(e), Site::Edge(e), 2);
            let z2 = exact(&g, Site::Edge(g.inverse(e)), Site::Edge(g.inverse(e)), 2);
            assert_eq!(z1, z2);
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let g = segment_plus_loop(3, 4, 3);
        let c = g.vertex("c").unwrap();
        let ex = exact(&g, Site::Vertex(c), Site::Vertex(c), 2);
        let fl = zeta_det(
            &g,
            Site::Vertex(c),
            Site::Vertex(c),
            &SArg::Complex(Complex64::new(2.0, 0.0)),
        )
        .unwrap()
        .value;
        let gap = (fl.as_float().unwrap() - Complex64::new(ex.to_f64().unwrap(), 0.0)).norm();
        assert!(gap < 1e-12);
    }

    #[test]
    fn formal_flag_set_when_setting_fails() {
        // balanced weight-2 loop: violates the setting but the determinant
        // ratio is still finite at s = 2
        let g = bouquet(&[2]);
        let z = zeta_det(&g, Site::Vertex(0), Site::Vertex(0), &SArg::Int(2)).unwrap();
        assert!(z.formal);
    }

    #[test]
    fn pole_reported_exactly() {
        // segment α = β = 1... not in setting; use s where denominator
        // vanishes: α = β = 2 (ω ≡ 3): det(I - E) = 1 - (αβ)^{-s} = 0 at s = 0,
        // numerator det(I-E+U_cc) at s=0 is 1 - 4 + 2 = ... compute: entries
        // at s=0 are all 1 where nonzero.
        let g = segment(3, 3);
        let c = g.vertex("c").unwrap();
        match zeta_det(&g, Site::Vertex(c), Site::Vertex(c), &SArg::Int(0)) {
            Err(ZetaError::Pole { candidate: false }) => {}
            other => panic!("expected exact pole, got {other:?}"),
        }
    }
}
