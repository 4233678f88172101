//! Splitting and reduction formulas for the reciprocal zeta value: cutting
//! the graph at a vertex or along a segment, removing a terminal segment,
//! and removing a 1-loop. Each verifier recomputes both sides independently
//! and returns them for the caller to compare.

use crate::graph::{Site, WeightedGraph};
use crate::linalg::{Field, Scalar};
use crate::weights::setting_gamma_ok;
use crate::zeta::{zeta_reciprocal, SArg, ZetaError};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// One verified identity: both sides, evaluated independently.
#[derive(Debug, Clone)]
pub struct SplitCheck {
    pub label: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl SplitCheck {
    pub fn holds(&self) -> bool {
        match (&self.lhs, &self.rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (a, b) => match (a.as_float(), b.as_float()) {
                (Some(x), Some(y)) => (x - y).norm() <= 1e-10 * x.norm().max(y.norm()).max(1.0),
                _ => false,
            },
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), SplitError> {
    if cond {
        Ok(())
    } else {
        Err(SplitError::Hypothesis(msg.to_string()))
    }
}

fn edge_ids(g: &WeightedGraph, names: &[String]) -> Result<Vec<usize>, SplitError> {
    let mut out = Vec::new();
    for n in names {
        let e = g
            .edge(n)
            .ok_or_else(|| SplitError::Hypothesis(format!("unknown edge {n:?}")))?;
        out.push(e);
        out.push(g.inverse(e));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn vertex_span(g: &WeightedGraph, edges: &[usize]) -> BTreeSet<usize> {
    edges
        .iter()
        .flat_map(|&e| [g.origin(e), g.terminus(e)])
        .collect()
}

fn zrec_on(g: &WeightedGraph, u: Site, s: &SArg) -> Result<Scalar, SplitError> {
    Ok(zeta_reciprocal(g, u, s)?)
}

fn zrec_on_subgraph(
    g: &WeightedGraph,
    edges: &[usize],
    keep_vertex: usize,
    u: Site,
    s: &SArg,
) -> Result<Scalar, SplitError> {
    let sub = g.subgraph(edges, &[keep_vertex])?;
    let u_sub = g.transfer_site(u, &sub)?;
    zrec_on(&sub, u_sub, s)
}

/// `Z_{Γ,c→c}^{-1} = Z_{Γ1,c→c}^{-1} + Z_{Γ2,c→c}^{-1} - 1` for subgraphs
/// meeting exactly in the vertex c.
pub fn split_at_vertex(
    g: &WeightedGraph,
    part1: &[String],
    part2: &[String],
    at: &str,
    s: &SArg,
) -> Result<Vec<SplitCheck>, SplitError> {
    require(setting_gamma_ok(g), "graph fails the convergence setting")?;
    let c = g
        .vertex(at)
        .ok_or_else(|| SplitError::Hypothesis(format!("unknown vertex {at:?}")))?;
    let e1 = edge_ids(g, part1)?;
    let e2 = edge_ids(g, part2)?;
    require(
        e1.iter().all(|e| !e2.contains(e)),
        "parts share an edge",
    )?;
    require(
        e1.len() + e2.len() == g.edge_count(),
        "parts do not cover the edge set",
    )?;
    let shared: Vec<usize> = vertex_span(g, &e1)
        .intersection(&vertex_span(g, &e2))
        .copied()
        .collect();
    require(
        shared == vec![c] || (shared.is_empty() && (e1.is_empty() || e2.is_empty())),
        "parts meet in more than the splitting vertex",
    )?;
    let lhs = zrec_on(g, Site::Vertex(c), s)?;
    let z1 = zrec_on_subgraph(g, &e1, c, Site::Vertex(c), s)?;
    let z2 = zrec_on_subgraph(g, &e2, c, Site::Vertex(c), s)?;
    let rhs = scalar_add(&scalar_add(&z1, &z2), &scalar_int(-1, s));
    Ok(vec![SplitCheck {
        label: format!("vertex split at {at}"),
        lhs,
        rhs,
    }])
}

/// Overlapping form: `Z_Γ^{-1} = Z_{Γ1}^{-1} + Z_{Γ2}^{-1} - Z_{Γ1∩Γ2}^{-1}`
/// at c, for Γi containing the two halves Λi of a vertex split.
pub fn split_at_vertex_overlap(
    g: &WeightedGraph,
    lambda1: &[String],
    lambda2: &[String],
    gamma1: &[String],
    gamma2: &[String],
    at: &str,
    s: &SArg,
) -> Result<Vec<SplitCheck>, SplitError> {
    require(setting_gamma_ok(g), "graph fails the convergence setting")?;
    let c = g
        .vertex(at)
        .ok_or_else(|| SplitError::Hypothesis(format!("unknown vertex {at:?}")))?;
    let l1 = edge_ids(g, lambda1)?;
    let l2 = edge_ids(g, lambda2)?;
    let g1 = edge_ids(g, gamma1)?;
    let g2 = edge_ids(g, gamma2)?;
    require(
        l1.iter().all(|e| !l2.contains(e)) && l1.len() + l2.len() == g.edge_count(),
        "halves do not partition the edge set",
    )?;
    let shared: Vec<usize> = vertex_span(g, &l1)
        .intersection(&vertex_span(g, &l2))
        .copied()
        .collect();
    require(shared == vec![c], "halves meet in more than the splitting vertex")?;
    require(
        l1.iter().all(|e| g1.contains(e)) && l2.iter().all(|e| g2.contains(e)),
        "enlarged parts do not contain their halves",
    )?;
    let inter: Vec<usize> = g1.iter().filter(|e| g2.contains(e)).copied().collect();
    let lhs = zrec_on(g, Site::Vertex(c), s)?;
    let z1 = zrec_on_subgraph(g, &g1, c, Site::Vertex(c), s)?;
    let z2 = zrec_on_subgraph(g, &g2, c, Site::Vertex(c), s)?;
    let z3 = zrec_on_subgraph(g, &inter, c, Site::Vertex(c), s)?;
    let rhs = scalar_sub(&scalar_add(&z1, &z2), &z3);
    Ok(vec![SplitCheck {
        label: format!("overlapping vertex split at {at}"),
        lhs,
        rhs,
    }])
}

/// `Z_{Γ,a→a}^{-1} = Z_{Γ1,a→a}^{-1} + Z_{Γ2,a→a}^{-1} - Z_{Γ3,a→a}^{-1}`
/// where Γ3 = Γ1 ∩ Γ2 is the 1-segment {a, ā}.
pub fn split_at_edge(
    g: &WeightedGraph,
    part1: &[String],
    part2: &[String],
    bridge: &str,
    s: &SArg,
) -> Result<Vec<SplitCheck>, SplitError> {
    require(setting_gamma_ok(g), "graph fails the convergence setting")?;
    let a = g
        .edge(bridge)
        .ok_or_else(|| SplitError::Hypothesis(format!("unknown edge {bridge:?}")))?;
    require(!g.is_loop(a), "bridge edge is a loop, not a 1-segment")?;
    let e1 = edge_ids(g, part1)?;
    let e2 = edge_ids(g, part2)?;
    let inter: Vec<usize> = e1.iter().filter(|e| e2.contains(e)).copied().collect();
    require(
        inter == {
            let mut v = vec![a, g.inverse(a)];
            v.sort();
            v
        },
        "parts do not intersect in exactly the bridge segment",
    )?;
    let all: BTreeSet<usize> = e1.iter().chain(&e2).copied().collect();
    require(all.len() == g.edge_count(), "parts do not cover the edge set")?;
    let shared: Vec<usize> = vertex_span(g, &e1)
        .intersection(&vertex_span(g, &e2))
        .copied()
        .collect();
    let mut seg = vec![g.origin(a), g.terminus(a)];
    seg.sort();
    require(shared == seg, "parts meet outside the bridge endpoints")?;
    let lhs = zrec_on(g, Site::Edge(a), s)?;
    let z1 = zrec_on_subgraph(g, &e1, g.origin(a), Site::Edge(a), s)?;
    let z2 = zrec_on_subgraph(g, &e2, g.origin(a), Site::Edge(a), s)?;
    let z3 = zrec_on_subgraph(g, &[a], g.origin(a), Site::Edge(a), s)?;
    let rhs = scalar_sub(&scalar_add(&z1, &z2), &z3);
    Ok(vec![SplitCheck {
        label: format!("edge split along {bridge}"),
        lhs,
        rhs,
    }])
}

/// Overlapping form of the edge split.
#[allow(clippy::too_many_arguments)]
pub fn split_at_edge_overlap(
    g: &WeightedGraph,
    lambda1: &[String],
    lambda2: &[String],
    gamma1: &[String],
    gamma2: &[String],
    bridge: &str,
    s: &SArg,
) -> Result<Vec<SplitCheck>, SplitError> {
    require(setting_gamma_ok(g), "graph fails the convergence setting")?;
    let a = g
        .edge(bridge)
        .ok_or_else(|| SplitError::Hypothesis(format!("unknown edge {bridge:?}")))?;
    require(!g.is_loop(a), "bridge edge is a loop, not a 1-segment")?;
    let l1 = edge_ids(g, lambda1)?;
    let l2 = edge_ids(g, lambda2)?;
    let g1 = edge_ids(g, gamma1)?;
    let g2 = edge_ids(g, gamma2)?;
    let inter_l: Vec<usize> = l1.iter().filter(|e| l2.contains(e)).copied().collect();
    let mut seg = vec![a, g.inverse(a)];
    seg.sort();
    require(inter_l == seg, "halves do not intersect in the bridge segment")?;
    require(
        l1.iter().all(|e| g1.contains(e)) && l2.iter().all(|e| g2.contains(e)),
        "enlarged parts do not contain their halves",
    )?;
    let all: BTreeSet<usize> = l1.iter().chain(&l2).copied().collect();
    require(all.len() == g.edge_count(), "halves do not cover the edge set")?;
    let inter: Vec<usize> = g1.iter().filter(|e| g2.contains(e)).copied().collect();
    let lhs = zrec_on(g, Site::Edge(a), s)?;
    let z1 = zrec_on_subgraph(g, &g1, g.origin(a), Site::Edge(a), s)?;
    let z2 = zrec_on_subgraph(g, &g2, g.origin(a), Site::Edge(a), s)?;
    let z3 = zrec_on_subgraph(g, &inter, g.origin(a), Site::Edge(a), s)?;
    let rhs = scalar_sub(&scalar_add(&z1, &z2), &z3);
    Ok(vec![SplitCheck {
        label: format!("overlapping edge split along {bridge}"),
        lhs,
        rhs,
    }])
}

/// Terminal-segment reduction: for `a` with `o(a) = c` terminal and
/// `t(a) = d`, express `Z_{Γ,c→c}^{-1}` and `Z_{Γ,a→a}^{-1}` through
/// `Z_{Λ,d→d}^{-1}` on the graph Λ with a, ā and c removed.
pub fn split_terminal_segment(
    g: &WeightedGraph,
    edge: &str,
    s: &SArg,
) -> Result<Vec<SplitCheck>, SplitError> {
    require(setting_gamma_ok(g), "graph fails the convergence setting")?;
    let a = g
        .edge(edge)
        .ok_or_else(|| SplitError::Hypothesis(format!("unknown edge {edge:?}")))?;
    let c = g.origin(a);
    let d = g.terminus(a);
    require(c != d, "segment edge is a loop")?;
    require(g.out_edges(c) == &[a][..], "origin of the segment is not terminal")?;
    let lambda_edges: Vec<usize> = (0..g.edge_count())
        .filter(|&e| e != a && e != g.inverse(a))
        .collect();
    let zl = zrec_on_subgraph(g, &lambda_edges, d, Site::Vertex(d), s)?;
    let lhs_c = zrec_on(g, Site::Vertex(c), s)?;
    let lhs_a = zrec_on(g, Site::Edge(a), s)?;
    let (rhs_c, rhs_a) = match s {
        SArg::Int(s0) => {
            let zl = zl.as_exact().expect("exact mode").clone();
            let (c_v, a_v) = terminal_formula(
                g.weight(a) - 1,
                g.weight(g.inverse(a)) - 1,
                &zl,
                &|n| crate::linalg::rational_power(&BigUint::from(n), *s0),
            );
            (Scalar::Exact(c_v), Scalar::Exact(a_v))
        }
        SArg::Complex(s0) => {
            let zl = zl.as_float().expect("float mode");
            let (c_v, a_v) = terminal_formula(
                g.weight(a) - 1,
                g.weight(g.inverse(a)) - 1,
                &zl,
                &|n| crate::linalg::complex_power(&BigUint::from(n), *s0),
            );
            (Scalar::Float(c_v), Scalar::Float(a_v))
        }
    };
    Ok(vec![
        SplitCheck {
            label: format!("terminal segment {edge}, vertex form"),
            lhs: lhs_c,
            rhs: rhs_c,
        },
        SplitCheck {
            label: format!("terminal segment {edge}, edge form"),
            lhs: lhs_a,
            rhs: rhs_a,
        },
    ])
}

/// Both reduction formulas of the terminal-segment proposition, with
/// ω(a) = α+1, ω(ā) = β+1 and ξ(x,s) = (x+1)^{-s} - x^{-s}.
fn terminal_formula<F: Field>(
    alpha: u64,
    beta: u64,
    z_lambda: &F,
    pow: &dyn Fn(u64) -> F,
) -> (F, F) {
    let one = F::one();
    let xi_a = pow(alpha + 1).fsub(&pow(alpha));
    let xi_b = pow(beta + 1).fsub(&pow(beta));
    let num = one
        .fadd(&pow(alpha).fmul(&xi_b))
        .fmul(z_lambda)
        .fsub(&pow(alpha).fmul(&pow(beta + 1)));
    let den_c = one
        .fsub(&xi_a.fmul(&xi_b))
        .fmul(z_lambda)
        .fadd(&xi_a.fmul(&pow(beta + 1)));
    let den_a = one.fadd(&pow(alpha)).fmul(
        &one.fsub(&xi_b)
            .fmul(z_lambda)
            .fadd(&pow(beta + 1)),
    );
    (
        num.fdiv(&den_c).expect("nonzero denominator"),
        num.fdiv(&den_a).expect("nonzero denominator"),
    )
}

/// Loop reduction: for a 1-loop `a` at c, express `Z_{Γ,a→a}^{-1}` through
/// `Z_{Λ,c→c}^{-1}` on Λ = Γ minus the loop pair.
pub fn split_loop(g: &WeightedGraph, edge: &str, s: &SArg) -> Result<Vec<SplitCheck>, SplitError> {
    require(setting_gamma_ok(g), "graph fails the convergence setting")?;
    let a = g
        .edge(edge)
        .ok_or_else(|| SplitError::Hypothesis(format!("unknown edge {edge:?}")))?;
    require(g.is_loop(a), "edge is not a loop")?;
    let c = g.origin(a);
    let lambda_edges: Vec<usize> = (0..g.edge_count())
        .filter(|&e| e != a && e != g.inverse(a))
        .collect();
    require(!lambda_edges.is_empty(), "nothing remains after removing the loop")?;
    let zl = zrec_on_subgraph(g, &lambda_edges, c, Site::Vertex(c), s)?;
    let lhs = zrec_on(g, Site::Edge(a), s)?;
    let rhs = match s {
        SArg::Int(s0) => {
            let zl = zl.as_exact().expect("exact mode").clone();
            Scalar::Exact(loop_formula(
                g.weight(a) - 1,
                g.weight(g.inverse(a)) - 1,
                &zl,
                &|n| crate::linalg::rational_power(&BigUint::from(n), *s0),
            ))
        }
        SArg::Complex(s0) => {
            let zl = zl.as_float().expect("float mode");
            Scalar::Float(loop_formula(
                g.weight(a) - 1,
                g.weight(g.inverse(a)) - 1,
                &zl,
                &|n| crate::linalg::complex_power(&BigUint::from(n), *s0),
            ))
        }
    };
    Ok(vec![SplitCheck {
        label: format!("loop reduction at {edge}"),
        lhs,
        rhs,
    }])
}

/// Loop reduction formula with ω(a) = α+1, ω(ā) = β+1. For α = β the
/// common factor `1 + α^{-s} - (α+1)^{-s}` of numerator and denominator is
/// cancelled first (it vanishes at s = -1, where the balanced formula still
/// has a finite value).
fn loop_formula<F: Field>(alpha: u64, beta: u64, z_lambda: &F, pow: &dyn Fn(u64) -> F) -> F {
    let one = F::one();
    if alpha == beta {
        let two = F::from_i64(2);
        let num = one
            .fsub(&pow(alpha))
            .fadd(&pow(alpha + 1))
            .fmul(z_lambda)
            .fsub(&two.fmul(&pow(alpha + 1)));
        let den = one
            .fadd(&pow(alpha))
            .fsub(&pow(alpha + 1))
            .fmul(z_lambda)
            .fadd(&two.fmul(&pow(alpha + 1)));
        return num.fdiv(&den).expect("nonzero denominator");
    }
    let xi1 = one.fsub(
        &pow(alpha)
            .fsub(&pow(alpha + 1))
            .fmul(&pow(beta).fsub(&pow(beta + 1))),
    );
    let xi2 = one
        .fadd(&pow(alpha))
        .fsub(&pow(alpha + 1))
        .fmul(&one.fadd(&pow(beta)).fsub(&pow(beta + 1)));
    let eta = pow(alpha)
        .fadd(&one)
        .fmul(&pow(beta + 1))
        .fadd(&pow(alpha + 1).fmul(&pow(beta).fadd(&one)))
        .fsub(&F::from_i64(2).fmul(&pow(alpha + 1)).fmul(&pow(beta + 1)));
    let num = xi1.fmul(z_lambda).fsub(&eta);
    let den = xi2.fmul(z_lambda).fadd(&eta);
    num.fdiv(&den).expect("nonzero denominator")
}

fn scalar_int(v: i64, s: &SArg) -> Scalar {
    match s {
        SArg::Int(_) => Scalar::Exact(BigRational::from_integer(v.into())),
        SArg::Complex(_) => Scalar::Float(Complex64::new(v as f64, 0.0)),
    }
}

fn scalar_add(a: &Scalar, b: &Scalar) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(x + y),
        (x, y) => Scalar::Float(x.as_float().unwrap() + y.as_float().unwrap()),
    }
}

fn scalar_sub(a: &Scalar, b: &Scalar) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(x - y),
        (x, y) => Scalar::Float(x.as_float().unwrap() - y.as_float().unwrap()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{self, shapes, Rng};

    #[test]
    fn two_petal_bouquet_vertex_split() {
        // split a 2-petal bouquet into its two loops
        let g = shapes::bouquet(&[3, 4]);
        for s in [-1i64, 2, 3] {
            let checks = split_at_vertex(
                &g,
                &["a0".to_string()],
                &["a1".to_string()],
                "c",
                &SArg::Int(s),
            )
            .unwrap();
            for c in checks {
                assert!(c.holds(), "{} at s={s}: {:?} vs {:?}", c.label, c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn terminal_segment_on_segment_plus_loop() {
        let g = shapes::segment_plus_loop(3, 3, 3);
        for s in [-1i64, 2, 3] {
            let checks = split_terminal_segment(&g, "a", &SArg::Int(s)).unwrap();
            for c in checks {
                assert!(c.holds(), "{} at s={s}: {:?} vs {:?}", c.label, c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn loop_reduction_on_segment_plus_loop() {
        let g = shapes::segment_plus_loop(3, 4, 3);
        for s in [-1i64, 2, 3] {
            let checks = split_loop(&g, "l", &SArg::Int(s)).unwrap();
            for c in checks {
                assert!(c.holds(), "{} at s={s}: {:?} vs {:?}", c.label, c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn random_instances_hold_exactly() {
        let mut rng = Rng::new(11);
        for _ in 0..6 {
            let vs = instances::random_vertex_split(&mut rng);
            for s in [-1i64, 2, 3] {
                for c in
                    split_at_vertex(&vs.graph, &vs.part1, &vs.part2, &vs.at, &SArg::Int(s)).unwrap()
                {
                    assert!(c.holds(), "{} srand: {:?} vs {:?}", c.label, c.lhs, c.rhs);
                }
            }
            let es = instances::random_edge_split(&mut rng);
            for s in [-1i64, 2, 3] {
                for c in
                    split_at_edge(&es.graph, &es.part1, &es.part2, &es.bridge, &SArg::Int(s))
                        .unwrap()
                {
                    assert!(c.holds(), "{}: {:?} vs {:?}", c.label, c.lhs, c.rhs);
                }
            }
        }
    }

    #[test]
    fn hypothesis_violations_reported() {
        let g = shapes::segment_plus_loop(3, 3, 3);
        // loop reduction on a non-loop
        assert!(matches!(
            split_loop(&g, "a", &SArg::Int(2)),
            Err(SplitError::Hypothesis(_))
        ));
        // terminal segment whose origin is not terminal
        let g2 = shapes::triangle(3);
        assert!(matches!(
            split_terminal_segment(&g2, "p", &SArg::Int(2)),
            Err(SplitError::Hypothesis(_))
        ));
    }

    #[test]
    fn complex_mode_agrees() {
        let g = shapes::segment_plus_loop(3, 4, 3);
        let s = SArg::Complex(Complex64::new(1.5, 0.7));
        for c in split_loop(&g, "l", &s).unwrap() {
            assert!(c.holds(), "{}: {:?} vs {:?}", c.label, c.lhs, c.rhs);
        }
    }
}
