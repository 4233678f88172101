//! Path weights on an edge-weighted graph and brute-force Dirichlet
//! coefficient tables.
//!
//! The weight of a path counts its geodesic lifts to the covering tree:
//! for `p = (a_1, ..., a_n)` the edge-based weight is
//! `N_edg(p) = prod_{i=1}^{n-1} (ω(a_{i+1}) - [a_{i+1} = inverse(a_i)])`
//! (length for paths of length <= 1) and the vertex-based weight is
//! `N_vert(p) = ω(a_1) · N_edg(p)` (1 for the trivial path).

use crate::graph::{Path, Site, WeightedGraph};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("edge {0:?} has weight {1} < 2, path lifting is not guaranteed")]
    WeightBelowTwo(String, u64),
    #[error("graph violates the convergence setting (need ω >= 2 everywhere and max(ω(a), ω(ā)) >= 3 per pair)")]
    SettingViolated,
    #[error("no k <= {0} satisfies the (*_k) property")]
    NoStarK(usize),
}

/// Step factor `ω(b) - [b = inverse(a)]` for consecutive edges `a, b`.
fn step_factor(g: &WeightedGraph, a: usize, b: usize) -> u64 {
    if b == g.inverse(a) {
        g.weight(b) - 1
    } else {
        g.weight(b)
    }
}

/// `N_edg`: geodesic lifts of `p` starting from a fixed edge over its first edge.
pub fn n_edg(g: &WeightedGraph, p: &Path) -> BigUint {
    debug_assert!(p.is_valid(g));
    if p.len() <= 1 {
        return BigUint::from(p.len());
    }
    let mut acc = BigUint::one();
    for w in p.edges.windows(2) {
        acc *= BigUint::from(step_factor(g, w[0], w[1]));
    }
    acc
}

/// `N_vert`: geodesic lifts of `p` starting from a fixed vertex over its start.
pub fn n_vert(g: &WeightedGraph, p: &Path) -> BigUint {
    if p.is_empty() {
        return BigUint::one();
    }
    BigUint::from(g.weight(p.edges[0])) * n_edg(g, p)
}

/// True iff `ω(EΓ) ⊆ Z≥2` and every pair has a member of weight >= 3
/// (the convergence setting: equivalent to polynomial double-coset growth).
pub fn setting_gamma_ok(g: &WeightedGraph) -> bool {
    (0..g.edge_count()).all(|e| g.weight(e) >= 2)
        && (0..g.edge_count()).all(|e| g.weight(e) >= 3 || g.weight(g.inverse(e)) >= 3)
}

/// Property (*_k): every path of length k+1 has `N_edg >= 2`. Requires
/// `ω ⊆ Z≥2` so that every path lifts to a geodesic.
///
/// The search is an exhaustive walk over length-(k+1) paths, pruned as soon
/// as the running product reaches 2 (step factors are >= 1 when ω >= 2, so
/// the product never decreases). A weight-1 step is a backtrack onto a
/// weight-2 edge, so weight-1 prefixes extend deterministically and the walk
/// stays linear in k.
pub fn star_k_wlit(g: &WeightedGraph, k: usize) -> Result<bool, WeightError> {
    for e in 0..g.edge_count() {
        if g.weight(e) < 2 {
            return Err(WeightError::WeightBelowTwo(
                g.edge_name(e).to_string(),
                g.weight(e),
            ));
        }
    }
    // look for a path (a_1, ..., a_{k+1}) whose k step factors are all 1
    'first: for a in 0..g.edge_count() {
        let mut cur = a;
        for _ in 0..k {
            let back = g.inverse(cur);
            if g.weight(back) == 2 {
                cur = back;
            } else {
                continue 'first;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Smallest k with property (*_k), searched up to `(|EΓ|)^2 + 2`.
pub fn smallest_star_k(g: &WeightedGraph) -> Result<usize, WeightError> {
    let cap = g.edge_count() * g.edge_count() + 2;
    for k in 1..=cap {
        if star_k_wlit(g, k)? {
            return Ok(k);
        }
    }
    Err(WeightError::NoStarK(cap))
}

/// Table of Dirichlet coefficients `a_n` (double cosets of size n) and
/// `b_n = n · a_n` (cosets), for 1 <= n <= n_max, zero entries omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub n_max: u64,
    pub a: BTreeMap<u64, BigUint>,
}

impl CoefficientTable {
    pub fn a_n(&self, n: u64) -> BigUint {
        self.a.get(&n).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn b_n(&self, n: u64) -> BigUint {
        self.a_n(n) * BigUint::from(n)
    }

    /// Tab-separated `n a_n b_n` lines, sorted by n, zero rows omitted.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (n, a) in &self.a {
            if !a.is_zero() {
                out.push_str(&format!("{n}\t{a}\t{}\n", a * BigUint::from(*n)));
            }
        }
        out
    }
}

/// Dirichlet coefficients of the zeta series from `u` to `w`: `a_n` counts
/// paths in `P_Γ(u → W)` of weight n, where the weight is `N_vert` when `u`
/// is a vertex and `N_edg` when `u` is an edge (in which case paths of
/// length < 2 are replaced by the unit terms, which land in `a_1`).
///
/// Enumeration is complete because under the setting every length-l path has
/// weight at least `2^((l-k)/k)` for the smallest k with (*_k); the dynamic
/// programming below simply runs until every running weight exceeds n_max.
pub fn dirichlet_coefficients(
    g: &WeightedGraph,
    u: Site,
    w: Site,
    n_max: u64,
) -> Result<CoefficientTable, WeightError> {
    if !setting_gamma_ok(g) {
        return Err(WeightError::SettingViolated);
    }
    // guarantees the DP terminates; the value of k is not otherwise used
    let _k = smallest_star_k(g)?;
    let mut a: BTreeMap<u64, BigUint> = BTreeMap::new();
    for (weight, _len, count) in coefficient_stream(g, u, w, n_max, usize::MAX) {
        *a.entry(weight).or_insert_with(BigUint::zero) += count;
    }
    a.retain(|_, v| !v.is_zero());
    Ok(CoefficientTable { n_max, a })
}

/// Coefficients of the length-truncated series: weight -> count over paths of
/// length <= max_len (unit terms included). Used to cross-check series
/// evaluation term by term.
pub fn truncated_coefficients(
    g: &WeightedGraph,
    u: Site,
    w: Site,
    n_max: u64,
    max_len: usize,
) -> BTreeMap<u64, BigUint> {
    let mut acc: BTreeMap<u64, BigUint> = BTreeMap::new();
    for (weight, _len, count) in coefficient_stream(g, u, w, n_max, max_len) {
        *acc.entry(weight).or_insert_with(BigUint::zero) += count;
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// Shared dynamic program: counts paths from `u` ending at `w`'s site set,
/// grouped by (weight, length), with weights capped at n_max and lengths at
/// max_len. States are (last edge, accumulated weight); counts are exact.
fn coefficient_stream(
    g: &WeightedGraph,
    u: Site,
    w: Site,
    n_max: u64,
    max_len: usize,
) -> Vec<(u64, usize, BigUint)> {
    let mut out: Vec<(u64, usize, BigUint)> = Vec::new();
    let ends_at = |e: usize| -> bool {
        match w {
            Site::Vertex(v) => g.terminus(e) == v,
            Site::Edge(f) => e == f || e == g.inverse(f),
        }
    };

    // unit terms
    match (u, w) {
        (Site::Vertex(v), Site::Vertex(t)) => {
            if v == t {
                out.push((1, 0, BigUint::one()));
            }
        }
        (Site::Vertex(_), Site::Edge(_)) => {}
        (Site::Edge(e), Site::Vertex(t)) => {
            if g.origin(e) == t || g.terminus(e) == t {
                out.push((1, 0, BigUint::one()));
            }
        }
        (Site::Edge(e), Site::Edge(f)) => {
            if f == e || f == g.inverse(e) {
                out.push((1, 0, BigUint::one()));
            }
        }
    }

    // seed layer: length-1 paths (counted only from a vertex source; for an
    // edge source they are the unit terms above and only serve as prefixes)
    let mut layer: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
    match u {
        Site::Vertex(v) => {
            for &e in g.out_edges(v) {
                let weight = g.weight(e);
                if weight <= n_max {
                    *layer.entry((e, weight)).or_insert_with(BigUint::zero) += BigUint::one();
                }
            }
            if max_len >= 1 {
                for (&(e, weight), count) in &layer {
                    if ends_at(e) {
                        out.push((weight, 1, count.clone()));
                    }
                }
            }
        }
        Site::Edge(e) => {
            layer.insert((e, 1), BigUint::one());
            layer.insert((g.inverse(e), 1), BigUint::one());
        }
    }

    let mut len = 1usize;
    while !layer.is_empty() && len < max_len {
        let mut next: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
        for (&(e, weight), count) in &layer {
            for &f in g.out_edges(g.terminus(e)) {
                let new_weight = weight.checked_mul(step_factor(g, e, f));
                match new_weight {
                    Some(nw) if nw <= n_max => {
                        *next.entry((f, nw)).or_insert_with(BigUint::zero) += count.clone();
                    }
                    _ => {}
                }
            }
        }
        len += 1;
        for (&(e, weight), count) in &next {
            if ends_at(e) {
                out.push((weight, len, count.clone()));
            }
        }
        layer = next;
    }
    out
}

/// Cumulative coefficient counts and the largest least-squares slope of
/// `log Σ_{m<=n} a_m` against `log n` over the tabulated range. Used for the
/// empirical polynomial-growth check.
pub fn cumulative_log_slope(table: &CoefficientTable) -> Option<f64> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut cumulative = BigUint::zero();
    for (&n, a) in &table.a {
        cumulative += a;
        if n >= 2 {
            points.push(((n as f64).ln(), cumulative.to_f64()?.ln()));
        }
    }
    if points.len() < 2 {
        return Some(0.0);
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Path;
    use crate::instances::shapes::*;

    #[test]
    fn weights_on_short_paths() {
        let g = segment(3, 3);
        let a = g.edge("a").unwrap();
        let c = g.origin(a);
        let trivial = Path::trivial(c);
        assert_eq!(n_edg(&g, &trivial), BigUint::from(0u32));
        assert_eq!(n_vert(&g, &trivial), BigUint::from(1u32));
        let back = Path {
            start: c,
            edges: vec![a, g.inverse(a)],
        };
        // ω(ā) - 1 = 2
        assert_eq!(n_edg(&g, &back), BigUint::from(2u32));
        assert_eq!(n_vert(&g, &back), BigUint::from(6u32));
    }

    #[test]
    fn n_vert_multiplies_first_weight() {
        let g = path3(3, 3, 4, 4);
        let a = g.edge("a").unwrap();
        let b = g.edge("b").unwrap();
        let p = Path {
            start: g.origin(a),
            edges: vec![a, b],
        };
        assert_eq!(n_edg(&g, &p), BigUint::from(4u32));
        assert_eq!(n_vert(&g, &p), BigUint::from(12u32));
    }

    #[test]
    fn multiplicative_decomposition() {
        // N_edg(p·q) = N_edg(p) · N_edg(last(p), first(q)) · N_edg(q)
        let g = segment_plus_loop(3, 4, 5);
        for p in g.enumerate_paths(crate::graph::Site::Vertex(0), 3) {
            if p.is_empty() {
                continue;
            }
            for q in g.enumerate_paths(crate::graph::Site::Vertex(p.terminus(&g)), 3) {
                if q.is_empty() {
                    continue;
                }
                let joint = p.compose(&g, &q).unwrap();
                let link = Path {
                    start: g.origin(*p.edges.last().unwrap()),
                    edges: vec![*p.edges.last().unwrap(), q.edges[0]],
                };
                assert_eq!(
                    n_edg(&g, &joint),
                    n_edg(&g, &p) * n_edg(&g, &link) * n_edg(&g, &q)
                );
            }
        }
    }

    #[test]
    fn star_k_closed_form() {
        // ω ≡ 3: (*_1) holds
        assert!(star_k_wlit(&segment(3, 3), 1).unwrap());
        // ω ≡ 2: no (*_k) at all
        assert!(!star_k_wlit(&segment(2, 2), 2).unwrap());
        // mixed 3/2: (*_2) but not (*_1)
        let g = segment(3, 2);
        assert!(!star_k_wlit(&g, 1).unwrap());
        assert!(star_k_wlit(&g, 2).unwrap());
        assert_eq!(smallest_star_k(&g).unwrap(), 2);
        // monotone in k
        assert!(star_k_wlit(&g, 3).unwrap());
    }

    #[test]
    fn star_k_requires_lifting() {
        let mut err_seen = false;
        let g = segment(1, 3);
        if let Err(WeightError::WeightBelowTwo(name, w)) = star_k_wlit(&g, 1) {
            err_seen = true;
            assert_eq!(name, "a");
            assert_eq!(w, 1);
        }
        assert!(err_seen);
    }

    #[test]
    fn setting_gamma_cases() {
        assert!(!setting_gamma_ok(&segment(2, 2)));
        assert!(setting_gamma_ok(&segment(2, 3)));
        assert!(!setting_gamma_ok(&segment(1, 5)));
        assert!(setting_gamma_ok(&bouquet(&[3, 4])));
    }

    #[test]
    fn coefficients_on_segment() {
        let g = segment(3, 3);
        let c = g.vertex("c").unwrap();
        let table =
            dirichlet_coefficients(&g, Site::Vertex(c), Site::Vertex(c), 100).unwrap();
        // trivial path only
        assert_eq!(table.a_n(1), BigUint::one());
        // (a) ends at d, not c
        assert_eq!(table.a_n(3), BigUint::zero());
        // (a, ā) has N_vert = 6
        assert_eq!(table.a_n(6), BigUint::one());
        assert_eq!(table.b_n(6), BigUint::from(6u32));
    }

    #[test]
    fn coefficient_table_serialization() {
        let g = segment(3, 3);
        let c = g.vertex("c").unwrap();
        let table = dirichlet_coefficients(&g, Site::Vertex(c), Site::Vertex(c), 40).unwrap();
        let tsv = table.to_tsv();
        let first = tsv.lines().next().unwrap();
        assert_eq!(first, "1\t1\t1");
        for line in tsv.lines() {
            let cols: Vec<&str> = line.split('\t').collect();
            assert_eq!(cols.len(), 3);
        }
    }

    #[test]
    fn edge_source_units_land_in_a1() {
        let g = segment(3, 3);
        let a = g.edge("a").unwrap();
        let table = dirichlet_coefficients(&g, Site::Edge(a), Site::Edge(a), 50).unwrap();
        // unit term for w in {a, ā}
        assert_eq!(table.a_n(1), BigUint::one());
        // (a, ā) and (ā, a) both have N_edg = 2
        assert_eq!(table.a_n(2), BigUint::from(2u32));
    }

    #[test]
    fn setting_enforced() {
        let g = segment(2, 2);
        assert_eq!(
            dirichlet_coefficients(&g, Site::Vertex(0), Site::Vertex(0), 10).unwrap_err(),
            WeightError::SettingViolated
        );
    }
}
