//! Cross-module identities: the colour-space determinant formula against the
//! edge-space one on companion diagrams, the projective-line diagram's closed
//! form, the companion invariance of the evaluation at -1, and the dual
//! series evaluations.

use dczeta::graph::Site;
use dczeta::instances::{
    diagram_with_groups, full_symmetric_diagram, random_mixed_diagram, shapes, GroupKind, Rng,
};
use dczeta::lad::{LocalActionDiagram, RootSite};
use dczeta::linalg::rational_power;
use dczeta::zeta::{zeta_det, SArg};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

fn root_sites(d: &LocalActionDiagram, c0: usize) -> Vec<RootSite> {
    let mut out = vec![RootSite::Root];
    for &x in d.colors_at_vertex(c0) {
        out.push(RootSite::Color(x));
    }
    out
}

fn projected(d: &LocalActionDiagram, c0: usize, r: RootSite) -> Site {
    match r {
        RootSite::Root => Site::Vertex(c0),
        RootSite::Color(x) => Site::Edge(d.edge_of(x)),
    }
}

#[test]
fn companion_diagram_matches_graph_zeta() {
    // one-pair diagrams at every integer point including the removable
    // singularity at s = -1; the larger two-pair diagram away from it
    let cases: Vec<(dczeta::WeightedGraph, Vec<i64>)> = vec![
        (shapes::segment(3, 3), vec![-1, 2, 3]),
        (shapes::segment(4, 3), vec![-1, 2, 3]),
        (shapes::bouquet(&[3]), vec![-1, 2, 3]),
        (shapes::segment_plus_loop(3, 3, 3), vec![2, 3]),
    ];
    for (g, svals) in cases {
        let (d, inv) = full_symmetric_diagram(&g);
        let c0 = 0;
        let pairs: Vec<_> = root_sites(&d, c0)
            .into_iter()
            .flat_map(|r| g.sites().into_iter().map(move |u| (r, u)))
            .collect();
        for s in svals {
            let batch = d
                .zeta_pclosed_batch(&inv, c0, &pairs, &SArg::Int(s))
                .unwrap();
            for ((r, u), lhs) in pairs.iter().zip(batch) {
                let lhs = lhs.unwrap_or_else(|e| {
                    panic!("pclosed s={s} r={r:?} u={}: {e}", g.site_name(*u))
                });
                let rhs = zeta_det(&g, projected(&d, c0, *r), *u, &SArg::Int(s)).unwrap();
                assert_eq!(
                    lhs.value.as_exact().unwrap(),
                    rhs.value.as_exact().unwrap(),
                    "s={s} r={r:?} u={}",
                    g.site_name(*u)
                );
            }
        }
    }
}

/// PSL_2(F_3) acting on the 4 points of the projective line, on both sides
/// of a 1-segment: the edge-to-edge zeta is `(1 + p^{-s}) / (1 - p^{-s})`.
#[test]
fn projective_line_diagram_closed_form() {
    // points a0=0, a1=1, a2=2, a3=inf; z -> z+1 is (a0 a1 a2),
    // z -> -1/z is (a0 a3)(a1 a2)
    let text = r#"{
      "vertices": ["c", "d"],
      "edges": [
        {"name":"a","origin":"c","terminus":"d","inverse":"b","colors":["a0","a1","a2","a3"]},
        {"name":"b","origin":"d","terminus":"c","inverse":"a","colors":["b0","b1","b2","b3"]}
      ],
      "groups": {
        "c": {"generators": [
            {"a0":"a1","a1":"a2","a2":"a0"},
            {"a0":"a3","a3":"a0","a1":"a2","a2":"a1"}
        ]},
        "d": {"generators": [
            {"b0":"b1","b1":"b2","b2":"b0"},
            {"b0":"b3","b3":"b0","b1":"b2","b2":"b1"}
        ]}
      }
    }"#;
    let (d, inv) = LocalActionDiagram::from_json(text).unwrap();
    assert_eq!(d.group(0).order().unwrap(), 12);
    for c in 0..2 {
        assert!(d.condition_diamond(c).unwrap());
    }
    let g = d.graph().clone();
    let c0 = g.vertex("c").unwrap();
    let a = g.edge("a").unwrap();
    let x = d.colors_of_edge(a)[0];
    let p = BigUint::from(3u32);
    for s in [-1i64, 2, 3] {
        let z = d
            .zeta_pclosed(&inv, c0, RootSite::Color(x), Site::Edge(a), &SArg::Int(s))
            .unwrap();
        let ps = rational_power(&p, s);
        let want = (BigRational::one() + ps.clone()) / (BigRational::one() - ps);
        assert_eq!(z.value.as_exact().unwrap(), &want, "s={s}");
    }
}

/// The evaluation at s = -1 does not depend on the local groups, only on the
/// colour sets, the graph and the inversion.
#[test]
fn minus_one_value_ignores_groups() {
    // deterministic mixed diagram on a segment: cyclic on one side
    let g = shapes::segment(3, 3);
    let (d, inv) = diagram_with_groups(&g, |v| {
        if v == 0 {
            GroupKind::FullSymmetric
        } else {
            GroupKind::Cyclic
        }
    });
    let companion = d.wlit_companion();
    let c0 = 0;
    for &r in &root_sites(&d, c0) {
        for u in g.sites() {
            let lhs = d.zeta_pclosed(&inv, c0, r, u, &SArg::Int(-1));
            let rhs = companion.zeta_pclosed(&inv, c0, r, u, &SArg::Int(-1));
            match (lhs, rhs) {
                (Ok(l), Ok(rv)) => assert_eq!(
                    l.value.as_exact().unwrap(),
                    rv.value.as_exact().unwrap(),
                    "r={r:?} u={}",
                    g.site_name(u)
                ),
                (l, rv) => panic!("r={r:?} u={}: {l:?} vs {rv:?}", g.site_name(u)),
            }
        }
    }
    // and on seeded mixed diagrams
    let mut rng = Rng::new(21);
    for _ in 0..3 {
        let (d, inv) = random_mixed_diagram(&mut rng);
        let companion = d.wlit_companion();
        let g = d.graph();
        let c0 = 0;
        for &r in &root_sites(&d, c0) {
            for u in g.sites() {
                let lhs = d.zeta_pclosed(&inv, c0, r, u, &SArg::Int(-1));
                let rhs = companion.zeta_pclosed(&inv, c0, r, u, &SArg::Int(-1));
                match (lhs, rhs) {
                    (Ok(l), Ok(rv)) => assert_eq!(
                        l.value.as_exact().unwrap(),
                        rv.value.as_exact().unwrap()
                    ),
                    (Err(_), Err(_)) => {}
                    (l, rv) => panic!("r={r:?} u={}: {l:?} vs {rv:?}", g.site_name(u)),
                }
            }
        }
    }
}

#[test]
fn pclosed_series_dual_and_convergence() {
    let g = shapes::segment(3, 3);
    let (d, inv) = full_symmetric_diagram(&g);
    let c0 = 0;
    let s = SArg::Int(2);
    for &r in &root_sites(&d, c0) {
        for u in g.sites() {
            // dual evaluation agrees internally (checked inside), and the
            // partial sums approach the determinant value
            let det = d.zeta_pclosed(&inv, c0, r, u, &s).unwrap();
            let det = num_traits::ToPrimitive::to_f64(det.value.as_exact().unwrap()).unwrap();
            let mut gaps = Vec::new();
            for horizon in [4usize, 8, 12] {
                let partial = d.zeta_pclosed_series(&inv, c0, r, u, &s, horizon).unwrap();
                let partial =
                    num_traits::ToPrimitive::to_f64(partial.as_exact().unwrap()).unwrap();
                gaps.push((det - partial).abs());
            }
            assert!(gaps[2] < gaps[0] || gaps[2] < 1e-12, "{gaps:?}");
            assert!(gaps[2] < 1e-4, "r={r:?} u={} gaps {gaps:?}", g.site_name(u));
        }
    }
}

/// The series coefficients of the graph zeta match the brute-force
/// coefficient tables on the shared range.
#[test]
fn coefficients_match_series_expansion() {
    let g = shapes::segment_plus_loop(3, 4, 3);
    for u in g.sites() {
        for w in g.sites() {
            let table = dczeta::weights::dirichlet_coefficients(&g, u, w, 64).unwrap();
            // horizon 12 with (*_2) covers every weight up to 2^(12/2 - 1) = 32
            let truncated = dczeta::weights::truncated_coefficients(&g, u, w, u64::MAX, 12);
            for n in 1..=32u64 {
                let from_table = table.a_n(n);
                let from_series = truncated
                    .get(&n)
                    .cloned()
                    .unwrap_or_else(num_traits::Zero::zero);
                assert_eq!(
                    from_table,
                    from_series,
                    "n={n} u={} w={}",
                    g.site_name(u),
                    g.site_name(w)
                );
            }
        }
    }
}
