//! Property tests over randomized graphs and matrices.

use dczeta::graph::Site;
use dczeta::instances::{self, Rng};
use dczeta::linalg::Matrix;
use dczeta::weights::{n_edg, n_vert};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Reversal is an involution and preserves length and validity.
    #[test]
    fn path_reverse_involution(seed in 0u64..10_000) {
        let mut rng = Rng::new(seed);
        let g = instances::random_setting_graph(&mut rng, 5, 2, 5);
        let start = Site::Vertex(rng.below(g.vertex_count() as u64) as usize);
        for p in g.enumerate_paths(start, 4) {
            let rev = p.reverse(&g);
            prop_assert!(rev.is_valid(&g));
            prop_assert_eq!(rev.len(), p.len());
            prop_assert_eq!(&rev.reverse(&g), &p);
        }
    }

    /// The edge weight of a concatenation splits as
    /// N_edg(p)·N_edg(link)·N_edg(q).
    #[test]
    fn edge_weight_multiplicative(seed in 0u64..10_000) {
        let mut rng = Rng::new(seed);
        let g = instances::random_setting_graph(&mut rng, 4, 2, 5);
        let start = Site::Vertex(rng.below(g.vertex_count() as u64) as usize);
        for p in g.enumerate_paths(start, 3) {
            if p.is_empty() { continue; }
            let mid = p.terminus(&g);
            for q in g.enumerate_paths(Site::Vertex(mid), 2) {
                if q.is_empty() { continue; }
                let joint = p.compose(&g, &q).unwrap();
                let link = dczeta::Path {
                    start: g.origin(*p.edges.last().unwrap()),
                    edges: vec![*p.edges.last().unwrap(), q.edges[0]],
                };
                prop_assert_eq!(
                    n_edg(&g, &joint),
                    n_edg(&g, &p) * n_edg(&g, &link) * n_edg(&g, &q)
                );
            }
        }
    }

    /// Fundamental cycle count equals |EΓ|/2 - (|VΓ| - 1), and every basis
    /// cycle is closed.
    #[test]
    fn cycle_basis_size(seed in 0u64..10_000) {
        let mut rng = Rng::new(seed);
        let g = instances::random_setting_graph(&mut rng, 6, 2, 5);
        let cycles = g.fundamental_cycles();
        prop_assert_eq!(cycles.len(), g.edge_count() / 2 - (g.vertex_count() - 1));
        for c in &cycles {
            prop_assert!(c.is_valid(&g));
            prop_assert_eq!(c.terminus(&g), c.start);
        }
    }

    /// N_vert counts covering-tree lifts: at radius one it is the weight of
    /// the single edge, and summed over all paths of a given length it
    /// reproduces the branching of the covering tree.
    #[test]
    fn vertex_weight_counts_branching(seed in 0u64..10_000) {
        let mut rng = Rng::new(seed);
        let g = instances::random_setting_graph(&mut rng, 4, 2, 4);
        let v = rng.below(g.vertex_count() as u64) as usize;
        // depth-2 lift count: Σ over depth-2 paths of N_vert equals
        // Σ_{a ∈ o^{-1}(v)} ω(a) · Σ_{b ∈ o^{-1}(t(a))} (ω(b) - [b = ā])
        let by_paths: num_bigint::BigUint = g
            .enumerate_paths(Site::Vertex(v), 2)
            .iter()
            .filter(|p| p.len() == 2)
            .map(|p| n_vert(&g, p))
            .sum();
        let mut direct = num_bigint::BigUint::from(0u32);
        for &a in g.out_edges(v) {
            for &b in g.out_edges(g.terminus(a)) {
                let step = if b == g.inverse(a) { g.weight(b) - 1 } else { g.weight(b) };
                direct += num_bigint::BigUint::from(g.weight(a) * step);
            }
        }
        prop_assert_eq!(by_paths, direct);
    }

    /// Determinant-lemma ratio against the determinant quotient on random
    /// rational matrices.
    #[test]
    fn mdl_matches_quotient(entries in proptest::collection::vec(-6i64..6, 9),
                            us in proptest::collection::vec(-4i64..4, 3),
                            vs in proptest::collection::vec(-4i64..4, 3)) {
        let m = Matrix::from_fn(3, |i, j| rat(entries[3 * i + j], 1));
        if m.det() == rat(0, 1) {
            return Ok(());
        }
        let u: Vec<BigRational> = us.iter().map(|&x| rat(x, 2)).collect();
        let v: Vec<BigRational> = vs.iter().map(|&x| rat(x, 3)).collect();
        let lhs = m.mdl_ratio(&u, &v).unwrap();
        let rhs = m.add_outer(&u, &v).det() / m.det();
        prop_assert_eq!(lhs, rhs);
    }

    /// (I - m)·neumann_partial(m, L) = I - m^{L+1} identically.
    #[test]
    fn neumann_telescopes(entries in proptest::collection::vec(-3i64..3, 9), horizon in 0usize..6) {
        let m = Matrix::from_fn(3, |i, j| rat(entries[3 * i + j], 5));
        let sum = m.neumann_partial(horizon);
        let mut power: Matrix<BigRational> = Matrix::identity(3);
        for _ in 0..=horizon {
            power = power.matmul(&m);
        }
        let lhs = Matrix::identity(3).sub(&m).matmul(&sum);
        let rhs = Matrix::identity(3).sub(&power);
        prop_assert_eq!(lhs, rhs);
    }

    /// Zeta edge symmetry Z_{b→b} = Z_{b̄→b̄} on random setting graphs.
    #[test]
    fn zeta_edge_pair_symmetry(seed in 0u64..2_000) {
        let mut rng = Rng::new(seed);
        let g = instances::random_setting_graph(&mut rng, 3, 2, 5);
        let e = rng.below(g.edge_count() as u64) as usize;
        let s = dczeta::SArg::Int(2);
        let z1 = dczeta::zeta::zeta_det(&g, Site::Edge(e), Site::Edge(e), &s).unwrap();
        let z2 = dczeta::zeta::zeta_det(
            &g,
            Site::Edge(g.inverse(e)),
            Site::Edge(g.inverse(e)),
            &s,
        )
        .unwrap();
        prop_assert_eq!(z1.value, z2.value);
    }

    /// The unit terms vanish on the diagonal: ε_u(u) = 0 for every site.
    #[test]
    fn epsilon_diagonal_zero(seed in 0u64..2_000) {
        let mut rng = Rng::new(seed);
        let g = instances::random_setting_graph(&mut rng, 4, 2, 5);
        for u in g.sites() {
            let eps = dczeta::zeta::epsilon_term(&g, u, u);
            prop_assert!(eps.eval_int(3) == BigRational::from_integer(0.into()));
        }
    }

    /// Orbit-stabilizer on block symmetric groups.
    #[test]
    fn orbit_stabilizer(b1 in 1usize..4, b2 in 1usize..4) {
        let blocks = vec![
            (0..b1).collect::<Vec<_>>(),
            (b1..b1 + b2).collect::<Vec<_>>(),
        ];
        let g = dczeta::perm::PermGroup::block_symmetric(b1 + b2, &blocks);
        let order = g.order().unwrap();
        for x in 0..b1 + b2 {
            let orbit = g.orbit(x).unwrap().len();
            let fixing = g.elements().unwrap().iter().filter(|p| p.apply(x) == x).count();
            prop_assert_eq!(orbit * fixing, order);
        }
        prop_assert_eq!(BigRational::one(), rat(1, 1));
    }
}
