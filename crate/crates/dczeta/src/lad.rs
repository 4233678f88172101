//! Local action diagrams: a connected graph with a disjoint colour set per
//! edge and a permutation group per vertex whose orbits on the local colours
//! are exactly the per-edge colour sets.
//!
//! The diagram, an inversion map ι on colours, and a base vertex determine a
//! rooted tree (the standard Δ-tree) whose vertices are the reduced colour
//! paths from the base. The zeta functions of the associated tree action are
//! computed from the colour-indexed Bass operator `F(s)` built out of the
//! standard weight `W(x,y) = |Stab(ι(x)) · y|`, with the double-coset
//! exponent shifted by one because the colour paths enumerate cosets rather
//! than double cosets.

use crate::graph::{RawEdge, RawGraph, Site, WeightedGraph};
use crate::limits::{DetRatio, PowSum, RatioEvaluator, SymMatrix};
use crate::linalg::{dot, Field, Matrix, Scalar};
use crate::perm::{PermGroup, Permutation};
use crate::zeta::{SArg, ZetaError, ZetaValue};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LadError {
    #[error("invalid diagram file: {0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error("edge {0:?} has no colors")]
    EmptyColorSet(String),
    #[error("color {0:?} appears on more than one edge")]
    ColorReused(String),
    #[error("vertex {0:?}: generator maps unknown color {1:?}")]
    UnknownColor(String, String),
    #[error("vertex {0:?}: generator image {1:?} is outside the local color set")]
    ImageOutsideDomain(String, String),
    #[error("vertex {0:?}: orbit condition fails, computed orbit partition {1}")]
    OrbitCondition(String, String),
    #[error("inversion maps {0:?} into {1:?}, which is not on the inverse edge")]
    InversionTarget(String, String),
    #[error("inversion does not cover color {0:?}")]
    InversionIncomplete(String),
    #[error("inversion required: |X_a| != |X_ā| for edge {0:?}")]
    InversionRequired(String),
    #[error(transparent)]
    Perm(#[from] crate::perm::PermError),
    #[error("setting violated: {0}")]
    Setting(String),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("truncated tree would exceed {0} vertices")]
    TreeTooLarge(usize),
    #[error("unknown color {0:?}")]
    NoSuchColor(String),
    #[error("color {0:?} is not based at the root vertex")]
    NotARootColor(String),
}

#[derive(Debug, Deserialize)]
pub struct RawLad {
    pub vertices: Vec<String>,
    pub edges: Vec<RawLadEdge>,
    #[serde(default)]
    pub groups: BTreeMap<String, RawGroup>,
    #[serde(default)]
    pub inversion: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Deserialize)]
pub struct RawLadEdge {
    pub name: String,
    pub origin: String,
    pub terminus: String,
    pub inverse: String,
    pub colors: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct RawGroup {
    pub generators: Vec<BTreeMap<String, String>>,
}

/// Validated local action diagram. Colours are globally indexed; the order
/// is (edge index, colour name), which fixes the `F(s)` matrix indexing.
#[derive(Debug, Clone)]
pub struct LocalActionDiagram {
    graph: WeightedGraph,
    color_names: Vec<String>,
    color_edge: Vec<usize>,
    edge_colors: Vec<Vec<usize>>,
    vertex_colors: Vec<Vec<usize>>,
    color_local: Vec<usize>,
    groups: Vec<PermGroup>,
}

/// Inversion map on colours: `ι(X_a) ⊆ X_ā`. Not required to be an
/// involution (the two sides of an edge pair may have different sizes).
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    map: Vec<usize>,
}

impl Inversion {
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }
}

/// Source site for the (P)-closed zeta: the root vertex of the standard
/// Δ-tree, or an edge at the root identified by its colour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootSite {
    Root,
    Color(usize),
}

impl LocalActionDiagram {
    pub fn from_json(text: &str) -> Result<(Self, Inversion), LadError> {
        let raw: RawLad = serde_json::from_str(text).map_err(|e| LadError::Format(e.to_string()))?;
        let lad = Self::validate(&raw)?;
        let inv = lad.validate_inversion(raw.inversion.as_ref())?;
        Ok((lad, inv))
    }

    /// Check all diagram invariants: the underlying graph (with ω = |X_a|),
    /// disjointness of the colour sets, bijectivity of the generators on
    /// each local colour set, and the orbit condition.
    pub fn validate(raw: &RawLad) -> Result<Self, LadError> {
        for e in &raw.edges {
            if e.colors.is_empty() {
                return Err(LadError::EmptyColorSet(e.name.clone()));
            }
        }
        let raw_graph = RawGraph {
            vertices: raw.vertices.clone(),
            edges: raw
                .edges
                .iter()
                .map(|e| RawEdge {
                    name: e.name.clone(),
                    origin: e.origin.clone(),
                    terminus: e.terminus.clone(),
                    inverse: e.inverse.clone(),
                    weight: e.colors.len() as u64,
                })
                .collect(),
        };
        let graph = WeightedGraph::validate(&raw_graph)?;

        let mut edge_colors: Vec<Vec<String>> = vec![Vec::new(); graph.edge_count()];
        for e in &raw.edges {
            let idx = graph.edge(&e.name).expect("validated edge");
            let mut colors = e.colors.clone();
            colors.sort();
            edge_colors[idx] = colors;
        }
        let mut color_names = Vec::new();
        let mut color_edge = Vec::new();
        let mut edge_colors_idx: Vec<Vec<usize>> = vec![Vec::new(); graph.edge_count()];
        let mut seen: BTreeMap<String, ()> = BTreeMap::new();
        for (e, colors) in edge_colors.iter().enumerate() {
            for c in colors {
                if seen.insert(c.clone(), ()).is_some() {
                    return Err(LadError::ColorReused(c.clone()));
                }
                edge_colors_idx[e].push(color_names.len());
                color_edge.push(e);
                color_names.push(c.clone());
            }
        }

        let mut vertex_colors: Vec<Vec<usize>> = vec![Vec::new(); graph.vertex_count()];
        for v in 0..graph.vertex_count() {
            for &a in graph.out_edges(v) {
                vertex_colors[v].extend(&edge_colors_idx[a]);
            }
        }
        let mut color_local = vec![0usize; color_names.len()];
        for colors in &vertex_colors {
            for (i, &c) in colors.iter().enumerate() {
                color_local[c] = i;
            }
        }

        let color_index: BTreeMap<&str, usize> = color_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();

        let mut groups = Vec::with_capacity(graph.vertex_count());
        for v in 0..graph.vertex_count() {
            let vname = graph.vertex_name(v);
            let domain = &vertex_colors[v];
            let degree = domain.len();
            let local: BTreeMap<usize, usize> = domain
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i))
                .collect();
            let mut gens = Vec::new();
            if let Some(rg) = raw.groups.get(vname) {
                for mapping in &rg.generators {
                    let mut images: Vec<usize> = (0..degree).collect();
                    for (from, to) in mapping {
                        let from_g = *color_index
                            .get(from.as_str())
                            .ok_or_else(|| LadError::UnknownColor(vname.into(), from.clone()))?;
                        let to_g = *color_index
                            .get(to.as_str())
                            .ok_or_else(|| LadError::UnknownColor(vname.into(), to.clone()))?;
                        let from_l = *local
                            .get(&from_g)
                            .ok_or_else(|| LadError::UnknownColor(vname.into(), from.clone()))?;
                        let to_l = *local
                            .get(&to_g)
                            .ok_or_else(|| LadError::ImageOutsideDomain(vname.into(), to.clone()))?;
                        images[from_l] = to_l;
                    }
                    gens.push(Permutation::from_images(images)?);
                }
            }
            groups.push(PermGroup::new(degree, gens)?);
        }

        let lad = LocalActionDiagram {
            graph,
            color_names,
            color_edge,
            edge_colors: edge_colors_idx,
            vertex_colors,
            color_local,
            groups,
        };
        lad.check_orbit_condition()?;
        Ok(lad)
    }

    fn check_orbit_condition(&self) -> Result<(), LadError> {
        for v in 0..self.graph.vertex_count() {
            let domain = &self.vertex_colors[v];
            let orbits = self.groups[v].orbits();
            let expected: BTreeSet<BTreeSet<usize>> = self
                .graph
                .out_edges(v)
                .iter()
                .map(|&a| {
                    self.edge_colors[a]
                        .iter()
                        .map(|&c| self.color_local[c])
                        .collect()
                })
                .collect();
            let got: BTreeSet<BTreeSet<usize>> = orbits.into_iter().collect();
            if got != expected {
                let partition = got
                    .iter()
                    .map(|o| {
                        let names: Vec<&str> = o
                            .iter()
                            .map(|&i| self.color_names[domain[i]].as_str())
                            .collect();
                        format!("{{{}}}", names.join(","))
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                return Err(LadError::OrbitCondition(
                    self.graph.vertex_name(v).to_string(),
                    partition,
                ));
            }
        }
        Ok(())
    }

    /// Validate an explicit inversion, or synthesize the default one pairing
    /// the i-th colour of `X_a` with the i-th colour of `X_ā` (defined only
    /// when the two sides have equal sizes).
    pub fn validate_inversion(
        &self,
        raw: Option<&BTreeMap<String, String>>,
    ) -> Result<Inversion, LadError> {
        match raw {
            Some(mapping) => {
                let mut map = vec![usize::MAX; self.color_count()];
                for (from, to) in mapping {
                    let f = self
                        .color(from)
                        .ok_or_else(|| LadError::NoSuchColor(from.clone()))?;
                    let t = self
                        .color(to)
                        .ok_or_else(|| LadError::NoSuchColor(to.clone()))?;
                    if self.color_edge[t] != self.graph.inverse(self.color_edge[f]) {
                        return Err(LadError::InversionTarget(from.clone(), to.clone()));
                    }
                    map[f] = t;
                }
                if let Some(missing) = map.iter().position(|&v| v == usize::MAX) {
                    return Err(LadError::InversionIncomplete(
                        self.color_names[missing].clone(),
                    ));
                }
                Ok(Inversion { map })
            }
            None => {
                let mut map = vec![usize::MAX; self.color_count()];
                for a in 0..self.graph.edge_count() {
                    let abar = self.graph.inverse(a);
                    if self.edge_colors[a].len() != self.edge_colors[abar].len() {
                        return Err(LadError::InversionRequired(
                            self.graph.edge_name(a).to_string(),
                        ));
                    }
                    for (i, &c) in self.edge_colors[a].iter().enumerate() {
                        map[c] = self.edge_colors[abar][i];
                    }
                }
                Ok(Inversion { map })
            }
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn color_count(&self) -> usize {
        self.color_names.len()
    }

    pub fn color(&self, name: &str) -> Option<usize> {
        self.color_names.iter().position(|n| n == name)
    }

    pub fn color_name(&self, x: usize) -> &str {
        &self.color_names[x]
    }

    /// The edge whose colour set contains `x`.
    pub fn edge_of(&self, x: usize) -> usize {
        self.color_edge[x]
    }

    pub fn colors_of_edge(&self, a: usize) -> &[usize] {
        &self.edge_colors[a]
    }

    pub fn colors_at_vertex(&self, c: usize) -> &[usize] {
        &self.vertex_colors[c]
    }

    pub fn group(&self, c: usize) -> &PermGroup {
        &self.groups[c]
    }

    /// Standard weight `W(x,y) = |Stab_{G(t(a))}(ι(x)) · y|` when the edges
    /// compose, 0 otherwise.
    pub fn weight_w(&self, inv: &Inversion, x: usize, y: usize) -> Result<u64, LadError> {
        let a = self.color_edge[x];
        let b = self.color_edge[y];
        let mid = self.graph.terminus(a);
        if mid != self.graph.origin(b) {
            return Ok(0);
        }
        let ix = inv.apply(x);
        let size = self.groups[mid].stab_orbit_size(self.color_local[ix], self.color_local[y])?;
        Ok(size as u64)
    }

    /// Reverse weight `W_rev(x,y) = |Stab_{G(o(a))}(x) · y|` when the edges
    /// share their origin, 0 otherwise.
    pub fn weight_w_rev(&self, x: usize, y: usize) -> Result<u64, LadError> {
        let a = self.color_edge[x];
        let b = self.color_edge[y];
        let o = self.graph.origin(a);
        if o != self.graph.origin(b) {
            return Ok(0);
        }
        let size = self.groups[o].stab_orbit_size(self.color_local[x], self.color_local[y])?;
        Ok(size as u64)
    }

    /// `W(ξ)` of a colour sequence: 1 for length <= 1, else the product of
    /// consecutive weights. Zero exactly when the sequence is not a Δ-path.
    pub fn delta_path_weight(&self, inv: &Inversion, xs: &[usize]) -> Result<BigUint, LadError> {
        if xs.len() <= 1 {
            return Ok(BigUint::one());
        }
        let mut acc = BigUint::one();
        for w in xs.windows(2) {
            acc *= BigUint::from(self.weight_w(inv, w[0], w[1])?);
        }
        Ok(acc)
    }

    /// Consecutive colours underlie a path in Γ.
    pub fn composable(&self, x: usize, y: usize) -> bool {
        self.graph.terminus(self.color_edge[x]) == self.graph.origin(self.color_edge[y])
    }

    /// Reduced Δ-paths from the anchor, of length 1..=max_len (plus the
    /// 0-path when the anchor is a vertex), in (length, lexicographic) order.
    pub fn enumerate_reduced_paths(
        &self,
        inv: &Inversion,
        from: DeltaAnchor,
        max_len: usize,
    ) -> Vec<DeltaPath> {
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<usize>> = Vec::new();
        match from {
            DeltaAnchor::Vertex(c) => {
                out.push(DeltaPath {
                    anchor: c,
                    colors: Vec::new(),
                });
                if max_len >= 1 {
                    for &x in &self.vertex_colors[c] {
                        frontier.push(vec![x]);
                    }
                }
                frontier.sort();
            }
            DeltaAnchor::Color(x) => {
                if max_len >= 1 {
                    frontier.push(vec![x]);
                }
            }
        }
        let anchor_of = |xs: &Vec<usize>| self.graph.origin(self.color_edge[xs[0]]);
        for xs in &frontier {
            out.push(DeltaPath {
                anchor: anchor_of(xs),
                colors: xs.clone(),
            });
        }
        let mut len = 1usize;
        while len < max_len && !frontier.is_empty() {
            let mut next = Vec::new();
            for xs in &frontier {
                let last = *xs.last().unwrap();
                let end = self.graph.terminus(self.color_edge[last]);
                for &b in self.graph.out_edges(end) {
                    for &y in &self.edge_colors[b] {
                        if y != inv.apply(last) {
                            let mut ext = xs.clone();
                            ext.push(y);
                            next.push(ext);
                        }
                    }
                }
            }
            next.sort();
            for xs in &next {
                out.push(DeltaPath {
                    anchor: anchor_of(xs),
                    colors: xs.clone(),
                });
            }
            frontier = next;
            len += 1;
        }
        out
    }

    /// Condition (♦) at a vertex: for all out-edges a, b and every x in X_a,
    /// the stabilizer of x in G(c) acts transitively on `X_b \ {x}`.
    pub fn condition_diamond(&self, c: usize) -> Result<bool, LadError> {
        for &a in self.graph.out_edges(c) {
            for &b in self.graph.out_edges(c) {
                for &x in &self.edge_colors[a] {
                    let targets: BTreeSet<usize> = self.edge_colors[b]
                        .iter()
                        .filter(|&&y| y != x)
                        .map(|&y| self.color_local[y])
                        .collect();
                    if targets.is_empty() {
                        continue;
                    }
                    let y0 = *targets.iter().next().unwrap();
                    let orbit = self.groups[c].stab_orbit(self.color_local[x], y0)?;
                    if !targets.is_subset(&orbit) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Property (*_k) for the (P)-closed action: every reduced Δ-path of
    /// length k+1 has `W >= 2`. Decided by walking the digraph of weight-one
    /// reduced steps: a violating path exists iff that digraph has a walk of
    /// k arcs.
    pub fn star_k_pclosed(&self, inv: &Inversion, k: usize) -> Result<bool, LadError> {
        for a in 0..self.graph.edge_count() {
            if self.edge_colors[a].len() < 2 {
                return Err(LadError::Setting(format!(
                    "|X_{}| < 2",
                    self.graph.edge_name(a)
                )));
            }
        }
        let n = self.color_count();
        let mut arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                if self.composable(x, y) && y != inv.apply(x) {
                    let w = self.weight_w(inv, x, y)?;
                    if w == 0 {
                        return Err(LadError::Setting(format!(
                            "W({}, {}) = 0 on a composable non-inverted pair",
                            self.color_names[x], self.color_names[y]
                        )));
                    }
                    if w == 1 {
                        arcs[x].push(y);
                    }
                }
            }
        }
        // reach[x] = can start a weight-one walk of i arcs
        let mut reach: Vec<bool> = vec![true; n];
        for _ in 0..k {
            let next: Vec<bool> = (0..n)
                .map(|x| arcs[x].iter().any(|&y| reach[y]))
                .collect();
            reach = next;
            if reach.iter().all(|&b| !b) {
                return Ok(true);
            }
        }
        Ok(!reach.iter().any(|&b| b))
    }

    /// Smallest k <= |X|^2 + 2 with (*_k).
    pub fn smallest_star_k(&self, inv: &Inversion) -> Result<usize, LadError> {
        let cap = self.color_count() * self.color_count() + 2;
        for k in 1..=cap {
            if self.star_k_pclosed(inv, k)? {
                return Ok(k);
            }
        }
        Err(LadError::Setting(format!(
            "no k <= {cap} satisfies (*_k): the coset counts grow super-polynomially"
        )))
    }

    /// Bass operator `F(s)` on the colour space, symbolically in s:
    /// `F(x,y) = W(x,y)^{-s}` for composable non-inverted steps, else 0.
    pub fn bass_f(&self, inv: &Inversion) -> Result<SymMatrix, LadError> {
        let n = self.color_count();
        let mut m = SymMatrix::zero(n);
        for x in 0..n {
            for y in 0..n {
                if self.composable(x, y) && y != inv.apply(x) {
                    let w = self.weight_w(inv, x, y)?;
                    if w > 0 {
                        m.set(x, y, PowSum::power(BigRational::one(), w));
                    }
                }
            }
        }
        Ok(m)
    }

    /// Indicator of `X_U` on the colour space. For an edge u this is
    /// `X_u ⊔ X_ū`; for a vertex u it indexes the colours of edges ending at
    /// u (the possible last colours of a Δ-path whose underlying path ends
    /// at u).
    pub fn site_colors(&self, u: Site) -> Vec<bool> {
        let mut v = vec![false; self.color_count()];
        match u {
            Site::Vertex(c) => {
                for b in 0..self.graph.edge_count() {
                    if self.graph.terminus(b) == c {
                        for &x in &self.edge_colors[b] {
                            v[x] = true;
                        }
                    }
                }
            }
            Site::Edge(e) => {
                for &b in &[e, self.graph.inverse(e)] {
                    for &x in &self.edge_colors[b] {
                        v[x] = true;
                    }
                }
            }
        }
        v
    }

    /// Perturbation `Y_{π(r),u}(s)` of the (P)-closed determinant formula.
    pub fn perturbation_y(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
    ) -> Result<SymMatrix, LadError> {
        let n = self.color_count();
        let xu = self.site_colors(u);
        let mut row = vec![PowSum::zero(); n];
        match r {
            RootSite::Root => {
                // Σ_{a ∈ o^{-1}(c0)} ω(a)^{-s} f_{X_U}^t f_{X_a}
                for &a in self.graph.out_edges(c0) {
                    let omega = self.edge_colors[a].len() as u64;
                    for &x in &self.edge_colors[a] {
                        row[x] = row[x].add(&PowSum::power(BigRational::one(), omega));
                    }
                }
            }
            RootSite::Color(x) => {
                // f_{X_U}^t (f_x F(s) + Σ_{y ∈ X_{c0} \ {x}} W_rev(x,y)^{-s} f_y)
                for y in 0..n {
                    if self.composable(x, y) && y != inv.apply(x) {
                        let w = self.weight_w(inv, x, y)?;
                        if w > 0 {
                            row[y] = row[y].add(&PowSum::power(BigRational::one(), w));
                        }
                    }
                }
                for &y in &self.vertex_colors[c0] {
                    if y != x {
                        let w = self.weight_w_rev(x, y)?;
                        if w > 0 {
                            row[y] = row[y].add(&PowSum::power(BigRational::one(), w));
                        }
                    }
                }
            }
        }
        let mut m = SymMatrix::zero(n);
        for i in 0..n {
            if xu[i] {
                for j in 0..n {
                    m.add_to(i, j, &row[j]);
                }
            }
        }
        Ok(m)
    }

    /// Constant term `κ_{π(r)}(u)` of the (P)-closed determinant formula.
    pub fn kappa_term(&self, c0: usize, r: RootSite, u: Site) -> i64 {
        let indicator = match r {
            RootSite::Root => match u {
                Site::Vertex(c) => c == c0,
                Site::Edge(_) => false,
            },
            RootSite::Color(x) => {
                let a = self.color_edge[x];
                match u {
                    Site::Vertex(c) => self.graph.origin(a) == c || self.graph.terminus(a) == c,
                    Site::Edge(f) => f == a || f == self.graph.inverse(a),
                }
            }
        };
        (indicator as i64) - 1
    }

    fn check_setting(&self, inv: &Inversion) -> Result<(), LadError> {
        self.smallest_star_k(inv).map(|_| ())
    }

    /// Double-coset zeta `ζ_{G, G_r, G_t}(s)` of the (P)-closed universal
    /// group, via `det(I - F(s+1) + Y(s+1)) / det(I - F(s+1)) + κ`.
    pub fn zeta_pclosed(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
        s: &SArg,
    ) -> Result<ZetaValue, LadError> {
        let mut out = self.zeta_pclosed_batch(inv, c0, &[(r, u)], s)?;
        out.pop().expect("one site pair requested")
    }

    /// Batched evaluation over several (source, target) site pairs: the
    /// denominator determinant (and, at a removable singularity, its Taylor
    /// expansion) is shared across the whole batch.
    pub fn zeta_pclosed_batch(
        &self,
        inv: &Inversion,
        c0: usize,
        pairs: &[(RootSite, Site)],
        s: &SArg,
    ) -> Result<Vec<Result<ZetaValue, LadError>>, LadError> {
        for (r, _) in pairs {
            self.check_root_site(c0, *r)?;
        }
        self.check_setting(inv)?;
        let shifted = match *s {
            SArg::Int(v) => SArg::Int(v + 1),
            SArg::Complex(z) => SArg::Complex(z + Complex64::new(1.0, 0.0)),
        };
        let f = self.bass_f(inv)?;
        let ident = SymMatrix::identity(self.color_count());
        let den = ident.sub_matrix(&f);
        let num_for = |r: RootSite, u: Site| -> Result<SymMatrix, LadError> {
            let y = self.perturbation_y(inv, c0, r, u)?;
            let mut num = den.clone();
            for i in 0..self.color_count() {
                for j in 0..self.color_count() {
                    num.add_to(i, j, y.get(i, j));
                }
            }
            Ok(num)
        };
        let mut out = Vec::with_capacity(pairs.len());
        match shifted {
            SArg::Int(sigma) => {
                let primes = self.weight_primes(inv)?;
                let mut evaluator = RatioEvaluator::new(den.clone(), sigma, &primes);
                for &(r, u) in pairs {
                    let kappa =
                        BigRational::from_integer(BigInt::from(self.kappa_term(c0, r, u)));
                    let num = num_for(r, u)?;
                    out.push(match evaluator.ratio(&num) {
                        DetRatio::Finite(v) => Ok(ZetaValue {
                            value: Scalar::Exact(v + kappa),
                            formal: false,
                        }),
                        DetRatio::Pole => Err(ZetaError::Pole { candidate: false }.into()),
                        DetRatio::Unresolved(msg) => Err(ZetaError::Indeterminate(msg).into()),
                    });
                }
            }
            SArg::Complex(sigma) => {
                let dm = den.eval_complex(sigma);
                let dd = dm.det();
                let degenerate = dd.norm() < 1e-12 * dm.max_mag().max(1.0).powi(dm.dim() as i32);
                for &(r, u) in pairs {
                    if degenerate {
                        out.push(Err(ZetaError::Pole { candidate: true }.into()));
                        continue;
                    }
                    let kappa = self.kappa_term(c0, r, u) as f64;
                    let num = num_for(r, u)?;
                    let v = num.eval_complex(sigma).det() / dd + Complex64::new(kappa, 0.0);
                    out.push(Ok(ZetaValue {
                        value: Scalar::Float(v),
                        formal: false,
                    }));
                }
            }
        }
        Ok(out)
    }

    /// Primes dividing any standard weight or edge weight of the diagram.
    fn weight_primes(&self, inv: &Inversion) -> Result<Vec<u64>, LadError> {
        let mut bases: BTreeSet<u64> = BTreeSet::new();
        for a in 0..self.graph.edge_count() {
            bases.insert(self.edge_colors[a].len() as u64);
        }
        for x in 0..self.color_count() {
            for y in 0..self.color_count() {
                if self.composable(x, y) {
                    bases.insert(self.weight_w(inv, x, y)?);
                }
                let wr = self.weight_w_rev(x, y)?;
                if wr > 0 {
                    bases.insert(wr);
                }
            }
        }
        let mut primes = BTreeSet::new();
        for b in bases {
            let mut n = b.max(1);
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    primes.insert(d);
                    while n % d == 0 {
                        n /= d;
                    }
                }
                d += 1;
            }
            if n > 1 {
                primes.insert(n);
            }
        }
        Ok(primes.into_iter().collect())
    }

    fn check_root_site(&self, c0: usize, r: RootSite) -> Result<(), LadError> {
        if let RootSite::Color(x) = r {
            if self.graph.origin(self.color_edge[x]) != c0 {
                return Err(LadError::NotARootColor(self.color_names[x].clone()));
            }
        }
        Ok(())
    }

    /// Partial sum of the coset series truncated at tree-geodesic length
    /// `horizon`, computed both over reduced Δ-paths and through the Bass
    /// operator; the two must agree (exactly at integer s).
    pub fn zeta_pclosed_series(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
        s: &SArg,
        horizon: usize,
    ) -> Result<Scalar, LadError> {
        self.check_root_site(c0, r)?;
        let shifted = match *s {
            SArg::Int(v) => SArg::Int(v + 1),
            SArg::Complex(z) => SArg::Complex(z + Complex64::new(1.0, 0.0)),
        };
        let by_paths = self.series_by_paths(inv, c0, r, u, &shifted, horizon)?;
        let by_operator = self.series_by_operator(inv, c0, r, u, &shifted, horizon)?;
        match (&by_paths, &by_operator) {
            (Scalar::Exact(a), Scalar::Exact(b)) if a == b => {}
            (Scalar::Float(a), Scalar::Float(b))
                if (a - b).norm() <= 1e-9 * a.norm().max(b.norm()).max(1.0) => {}
            _ => {
                return Err(ZetaError::DualMismatch(format!(
                    "paths {by_paths:?} vs operator {by_operator:?}"
                ))
                .into())
            }
        }
        Ok(by_operator)
    }

    fn unit_term(&self, c0: usize, r: RootSite, u: Site) -> u64 {
        (self.kappa_term(c0, r, u) + 1) as u64
    }

    fn series_by_paths(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
        sigma: &SArg,
        horizon: usize,
    ) -> Result<Scalar, LadError> {
        let xu = self.site_colors(u);
        let mut acc_exact = BigRational::zero();
        let mut acc_float = Complex64::new(0.0, 0.0);
        let mut add = |weight: &BigUint, count: &BigUint| match *sigma {
            SArg::Int(s0) => {
                acc_exact += crate::linalg::rational_power(weight, s0)
                    * BigRational::from_integer(BigInt::from(count.clone()));
            }
            SArg::Complex(s0) => {
                acc_float +=
                    crate::linalg::complex_power(weight, s0) * count.to_f64().unwrap_or(f64::NAN);
            }
        };
        let unit = self.unit_term(c0, r, u);
        if unit > 0 {
            add(&BigUint::one(), &BigUint::from(unit));
        }
        // layered walk over (last colour, accumulated weight) states
        let emit_walks = |seeds: Vec<(usize, BigUint)>,
                              min_len: usize,
                              max_len: usize,
                              add: &mut dyn FnMut(&BigUint, &BigUint)|
         -> Result<(), LadError> {
            let mut layer: BTreeMap<(usize, BigUint), BigUint> = BTreeMap::new();
            for (x, w) in seeds {
                *layer.entry((x, w)).or_insert_with(BigUint::zero) += BigUint::one();
            }
            let mut len = 1usize;
            if len >= min_len {
                for ((x, w), count) in &layer {
                    if xu[*x] {
                        add(w, count);
                    }
                }
            }
            while len < max_len && !layer.is_empty() {
                let mut next: BTreeMap<(usize, BigUint), BigUint> = BTreeMap::new();
                for ((x, w), count) in &layer {
                    for y in 0..self.color_count() {
                        if self.composable(*x, y) && y != inv.apply(*x) {
                            let step = self.weight_w(inv, *x, y)?;
                            let nw = w * BigUint::from(step);
                            *next.entry((y, nw)).or_insert_with(BigUint::zero) += count;
                        }
                    }
                }
                len += 1;
                layer = next;
                if len >= min_len {
                    for ((x, w), count) in &layer {
                        if xu[*x] {
                            add(w, count);
                        }
                    }
                }
            }
            Ok(())
        };
        match r {
            RootSite::Root => {
                // Σ_{a ∈ o^{-1}(c0)} Σ_{ξ ∈ P(X_a → X_U), ℓ <= horizon} (ω(a) W(ξ))^{-σ}
                let seeds: Vec<(usize, BigUint)> = self
                    .graph
                    .out_edges(c0)
                    .iter()
                    .flat_map(|&a| {
                        let omega = BigUint::from(self.edge_colors[a].len() as u64);
                        self.edge_colors[a]
                            .iter()
                            .map(move |&x| (x, omega.clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect();
                emit_walks(seeds, 1, horizon, &mut add)?;
            }
            RootSite::Color(x) => {
                // forward branch: ξ from x with 2 <= ℓ(ξ) <= horizon
                emit_walks(vec![(x, BigUint::one())], 2, horizon, &mut add)?;
                // reverse branch: W_rev(x,y)^{-σ} then ξ from y with
                // 1 <= ℓ(ξ) <= horizon - 1
                if horizon >= 2 {
                    let mut seeds = Vec::new();
                    for &y in &self.vertex_colors[c0] {
                        if y != x {
                            let w = self.weight_w_rev(x, y)?;
                            seeds.push((y, BigUint::from(w)));
                        }
                    }
                    emit_walks(seeds, 1, horizon - 1, &mut add)?;
                }
            }
        }
        Ok(match *sigma {
            SArg::Int(_) => Scalar::Exact(acc_exact),
            SArg::Complex(_) => Scalar::Float(acc_float),
        })
    }

    /// Coset counts by size: `b_n` = number of cosets of index n in the
    /// enumeration behind the zeta series, i.e. reduced Δ-paths weighted by
    /// `ω(a)·W(ξ)` (root source) or `W(ξ)` / `W_rev·W(ξ)` (edge source),
    /// plus the unit terms. Complete for n <= n_max whenever the setting
    /// holds (weights double along walks every k steps).
    pub fn coset_weight_counts(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
        n_max: u64,
    ) -> Result<BTreeMap<u64, BigUint>, LadError> {
        self.check_root_site(c0, r)?;
        self.check_setting(inv)?;
        let xu = self.site_colors(u);
        // one pass over the group elements per colour pair, computed up front
        let n = self.color_count();
        let mut wmat = vec![vec![0u64; n]; n];
        for x in 0..n {
            for y in 0..n {
                if self.composable(x, y) && y != inv.apply(x) {
                    wmat[x][y] = self.weight_w(inv, x, y)?;
                }
            }
        }
        let mut counts: BTreeMap<u64, BigUint> = BTreeMap::new();
        let unit = self.unit_term(c0, r, u);
        if unit > 0 {
            *counts.entry(1).or_insert_with(BigUint::zero) += BigUint::from(unit);
        }
        let mut walk = |seeds: Vec<(usize, u64)>, min_len: usize| -> Result<(), LadError> {
            let mut layer: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
            for (x, w) in seeds {
                if w <= n_max {
                    *layer.entry((x, w)).or_insert_with(BigUint::zero) += BigUint::one();
                }
            }
            let mut len = 1usize;
            let emit = |layer: &BTreeMap<(usize, u64), BigUint>,
                            counts: &mut BTreeMap<u64, BigUint>| {
                for ((x, w), count) in layer {
                    if xu[*x] {
                        *counts.entry(*w).or_insert_with(BigUint::zero) += count;
                    }
                }
            };
            if len >= min_len {
                emit(&layer, &mut counts);
            }
            while !layer.is_empty() {
                let mut next: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
                for ((x, w), count) in &layer {
                    for (y, &step) in wmat[*x].iter().enumerate() {
                        if step == 0 {
                            continue;
                        }
                        match w.checked_mul(step) {
                            Some(nw) if nw <= n_max => {
                                *next.entry((y, nw)).or_insert_with(BigUint::zero) += count;
                            }
                            _ => {}
                        }
                    }
                }
                len += 1;
                layer = next;
                if len >= min_len {
                    emit(&layer, &mut counts);
                }
            }
            Ok(())
        };
        match r {
            RootSite::Root => {
                let seeds: Vec<(usize, u64)> = self
                    .graph
                    .out_edges(c0)
                    .iter()
                    .flat_map(|&a| {
                        let omega = self.edge_colors[a].len() as u64;
                        self.edge_colors[a]
                            .iter()
                            .map(move |&x| (x, omega))
                            .collect::<Vec<_>>()
                    })
                    .collect();
                walk(seeds, 1)?;
            }
            RootSite::Color(x) => {
                walk(vec![(x, 1)], 2)?;
                let mut seeds = Vec::new();
                for &y in &self.vertex_colors[c0] {
                    if y != x {
                        seeds.push((y, self.weight_w_rev(x, y)?));
                    }
                }
                walk(seeds, 1)?;
            }
        }
        counts.retain(|_, v| !v.is_zero());
        Ok(counts)
    }

    fn series_by_operator(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
        sigma: &SArg,
        horizon: usize,
    ) -> Result<Scalar, LadError> {
        let f = self.bass_f(inv)?;
        match *sigma {
            SArg::Int(s0) => {
                let fm = f.eval_int(s0);
                Ok(Scalar::Exact(self.series_operator_in(
                    inv,
                    c0,
                    r,
                    u,
                    &fm,
                    &|n| crate::linalg::rational_power(&BigUint::from(n), s0),
                    horizon,
                )?))
            }
            SArg::Complex(s0) => {
                let fm = f.eval_complex(s0);
                Ok(Scalar::Float(self.series_operator_in(
                    inv,
                    c0,
                    r,
                    u,
                    &fm,
                    &|n| crate::linalg::complex_power(&BigUint::from(n), s0),
                    horizon,
                )?))
            }
        }
    }

    fn series_operator_in<F: Field>(
        &self,
        inv: &Inversion,
        c0: usize,
        r: RootSite,
        u: Site,
        f_mat: &Matrix<F>,
        pow: &dyn Fn(u64) -> F,
        horizon: usize,
    ) -> Result<F, LadError> {
        let n = self.color_count();
        let xu = self.site_colors(u);
        let xu_f: Vec<F> = xu
            .iter()
            .map(|&b| if b { F::one() } else { F::zero() })
            .collect();
        let mut acc = F::from_i64(self.unit_term(c0, r, u) as i64);
        match r {
            RootSite::Root => {
                if horizon >= 1 {
                    let mut source = vec![F::zero(); n];
                    for &a in self.graph.out_edges(c0) {
                        let omega = self.edge_colors[a].len() as u64;
                        for &x in &self.edge_colors[a] {
                            source[x] = source[x].fadd(&pow(omega));
                        }
                    }
                    let row = f_mat.neumann_partial(horizon - 1).row_mul(&source);
                    acc = acc.fadd(&dot(&row, &xu_f));
                }
            }
            RootSite::Color(x) => {
                if horizon >= 2 {
                    let neumann = f_mat.neumann_partial(horizon - 2);
                    let mut fx = vec![F::zero(); n];
                    fx[x] = F::one();
                    let after_one = f_mat.row_mul(&fx);
                    let row = neumann.row_mul(&after_one);
                    acc = acc.fadd(&dot(&row, &xu_f));
                    let mut rev = vec![F::zero(); n];
                    for &y in &self.vertex_colors[c0] {
                        if y != x {
                            let w = self.weight_w_rev(x, y)?;
                            rev[y] = rev[y].fadd(&pow(w));
                        }
                    }
                    let row = neumann.row_mul(&rev);
                    acc = acc.fadd(&dot(&row, &xu_f));
                }
                let _ = inv;
            }
        }
        Ok(acc)
    }

    /// The companion diagram with every local group replaced by the full
    /// block-preserving symmetric group on its colour blocks. Same graph,
    /// same colour sets; taking the companion twice is the identity.
    pub fn wlit_companion(&self) -> LocalActionDiagram {
        let mut out = self.clone();
        for v in 0..self.graph.vertex_count() {
            let blocks: Vec<Vec<usize>> = self
                .graph
                .out_edges(v)
                .iter()
                .map(|&a| {
                    self.edge_colors[a]
                        .iter()
                        .map(|&c| self.color_local[c])
                        .collect()
                })
                .collect();
            out.groups[v] = PermGroup::block_symmetric(self.vertex_colors[v].len(), &blocks);
        }
        out
    }
}

/// Anchor for Δ-path enumeration.
#[derive(Debug, Clone, Copy)]
pub enum DeltaAnchor {
    Vertex(usize),
    Color(usize),
}

/// A reduced Δ-path: colour sequence plus the anchor vertex (which carries
/// the information for the 0-path).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeltaPath {
    pub anchor: usize,
    pub colors: Vec<usize>,
}

impl DeltaPath {
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Underlying edge sequence in Γ.
    pub fn underlying(&self, d: &LocalActionDiagram) -> Vec<usize> {
        self.colors.iter().map(|&x| d.edge_of(x)).collect()
    }
}

/// Truncated standard Δ-tree: all reduced Δ-paths from `X_{c0}` of length at
/// most the depth, as an explicit rooted tree.
#[derive(Debug)]
pub struct TruncatedDeltaTree {
    pub depth: usize,
    pub root_vertex: usize,
    /// Vertex 0 is the root (the empty path).
    pub paths: Vec<DeltaPath>,
    pub parent: Vec<Option<usize>>,
    /// Children sorted by label colour.
    pub children: Vec<Vec<usize>>,
}

pub const TREE_VERTEX_CAP: usize = 1_000_000;

impl TruncatedDeltaTree {
    pub fn build(
        d: &LocalActionDiagram,
        inv: &Inversion,
        c0: usize,
        depth: usize,
    ) -> Result<Self, LadError> {
        let mut paths = vec![DeltaPath {
            anchor: c0,
            colors: Vec::new(),
        }];
        let mut parent = vec![None];
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier: Vec<usize> = vec![0];
        for level in 0..depth {
            let mut next = Vec::new();
            for &vid in &frontier {
                let path = paths[vid].clone();
                let extensions: Vec<usize> = if level == 0 {
                    d.colors_at_vertex(c0).to_vec()
                } else {
                    let last = *path.colors.last().unwrap();
                    let end = d.graph().terminus(d.edge_of(last));
                    d.colors_at_vertex(end)
                        .iter()
                        .copied()
                        .filter(|&y| y != inv.apply(last))
                        .collect()
                };
                for y in extensions {
                    if paths.len() >= TREE_VERTEX_CAP {
                        return Err(LadError::TreeTooLarge(TREE_VERTEX_CAP));
                    }
                    let mut colors = path.colors.clone();
                    colors.push(y);
                    let id = paths.len();
                    paths.push(DeltaPath { anchor: c0, colors });
                    parent.push(Some(vid));
                    children.push(Vec::new());
                    children[vid].push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }
        Ok(TruncatedDeltaTree {
            depth,
            root_vertex: c0,
            paths,
            parent,
            children,
        })
    }

    /// Label of the positive edge into `v` (the last colour of its path).
    pub fn label(&self, v: usize) -> Option<usize> {
        self.paths[v].colors.last().copied()
    }

    /// Image of a tree vertex in Γ.
    pub fn project(&self, d: &LocalActionDiagram, v: usize) -> usize {
        match self.paths[v].colors.last() {
            None => self.root_vertex,
            Some(&x) => d.graph().terminus(d.edge_of(x)),
        }
    }

    fn depth_of(&self, v: usize) -> usize {
        self.paths[v].len()
    }

    /// Count descending chains from `v` whose projected edge sequence is
    /// exactly `gamma_edges`.
    fn count_descents(&self, d: &LocalActionDiagram, v: usize, gamma_edges: &[usize]) -> u64 {
        match gamma_edges.split_first() {
            None => 1,
            Some((&a, rest)) => self.children[v]
                .iter()
                .filter(|&&c| d.edge_of(self.label(c).unwrap()) == a)
                .map(|&c| self.count_descents(d, c, rest))
                .sum(),
        }
    }
}

/// Outcome of the three Δ-tree oracle checks.
#[derive(Debug)]
pub struct TreeReport {
    pub checks: Vec<(String, bool)>,
}

impl TreeReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

/// Verify the truncated tree against the diagram:
/// (a) the labelling is a bijection from root geodesics onto reduced Δ-paths
///     of length <= depth;
/// (b) for every positive edge, the geodesics from it lifting a given Γ-path
///     are counted by `N_edg`;
/// (c) the geodesics from the root lifting a given Γ-path are counted by
///     `N_vert`.
pub fn oracle_check_tree(
    d: &LocalActionDiagram,
    inv: &Inversion,
    tree: &TruncatedDeltaTree,
) -> Result<TreeReport, LadError> {
    let g = d.graph();
    let mut checks = Vec::new();

    // (a) every tree vertex is a distinct reduced Δ-path and every reduced
    // Δ-path of length <= depth appears
    let from_tree: BTreeSet<&DeltaPath> = tree.paths.iter().collect();
    let enumerated = d.enumerate_reduced_paths(inv, DeltaAnchor::Vertex(tree.root_vertex), tree.depth);
    let filtered: BTreeSet<&DeltaPath> = enumerated
        .iter()
        .filter(|p| {
            p.is_empty() || g.origin(d.edge_of(p.colors[0])) == tree.root_vertex
        })
        .collect();
    let bijective = from_tree.len() == tree.paths.len() && from_tree == filtered;
    checks.push(("label map bijective onto reduced paths".to_string(), bijective));

    // (b) edge counts: a geodesic starting with the positive edge into v
    // continues by descents, so for every Γ-path p starting with that edge
    // and fitting in the truncation, the lifts from the edge are the
    // descending chains from v over the rest of p, and must number N_edg(p)
    let mut edge_counts_ok = true;
    for v in 1..tree.paths.len() {
        let budget = tree.depth - tree.depth_of(v) + 1;
        let first_edge = d.edge_of(tree.label(v).unwrap());
        for p in g.enumerate_paths(Site::Edge(first_edge), budget) {
            let got = tree.count_descents(d, v, &p.edges[1..]);
            if BigUint::from(got) != crate::weights::n_edg(g, &p) {
                edge_counts_ok = false;
            }
        }
    }
    checks.push(("geodesic counts from edges match N_edg".to_string(), edge_counts_ok));

    // (c) vertex counts from the root
    let mut vertex_counts_ok = true;
    for p in g.enumerate_paths(Site::Vertex(tree.root_vertex), tree.depth) {
        if p.is_empty() {
            continue;
        }
        let got = tree.count_descents(d, 0, &p.edges);
        let expected = crate::weights::n_vert(g, &p);
        if BigUint::from(got) != expected {
            vertex_counts_ok = false;
        }
    }
    checks.push(("geodesic counts from the root match N_vert".to_string(), vertex_counts_ok));

    Ok(TreeReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::shapes;

    fn full_symmetric_segment(wa: u64, wb: u64) -> (LocalActionDiagram, Inversion) {
        crate::instances::full_symmetric_diagram(&shapes::segment(wa, wb))
    }

    #[test]
    fn validates_full_symmetric() {
        let (d, inv) = full_symmetric_segment(3, 3);
        assert_eq!(d.color_count(), 6);
        assert_eq!(d.graph().weight(0), 3);
        for x in 0..d.color_count() {
            let ix = inv.apply(x);
            assert_eq!(d.edge_of(ix), d.graph().inverse(d.edge_of(x)));
        }
    }

    #[test]
    fn diamond_condition() {
        let (d, _) = full_symmetric_segment(3, 4);
        for c in 0..d.graph().vertex_count() {
            assert!(d.condition_diamond(c).unwrap());
        }
    }

    #[test]
    fn weight_w_on_full_symmetric() {
        // W(x, y) = ω(b) - 1_{b = ā} for y != ι(x)
        let (d, inv) = full_symmetric_segment(3, 4);
        for x in 0..d.color_count() {
            for y in 0..d.color_count() {
                if !d.composable(x, y) {
                    assert_eq!(d.weight_w(&inv, x, y).unwrap(), 0);
                    continue;
                }
                let a = d.edge_of(x);
                let b = d.edge_of(y);
                let expect = if y == inv.apply(x) {
                    1
                } else if b == d.graph().inverse(a) {
                    d.graph().weight(b) - 1
                } else {
                    d.graph().weight(b)
                };
                assert_eq!(d.weight_w(&inv, x, y).unwrap(), expect);
            }
        }
    }

    #[test]
    fn reduced_path_counts_match_n_edg() {
        let (d, inv) = full_symmetric_segment(3, 3);
        let g = d.graph();
        // reduced Δ-paths with fixed first colour, grouped by underlying path
        let x0 = d.colors_of_edge(0)[0];
        for p in g.enumerate_paths(Site::Edge(0), 4) {
            let count = d
                .enumerate_reduced_paths(&inv, DeltaAnchor::Color(x0), 4)
                .iter()
                .filter(|xi| xi.len() == p.len() && xi.underlying(&d) == p.edges)
                .count();
            assert_eq!(BigUint::from(count as u64), crate::weights::n_edg(g, &p));
        }
    }

    #[test]
    fn star_k_on_full_symmetric_matches_graph() {
        for (wa, wb) in [(3, 3), (3, 2), (2, 2)] {
            let (d, inv) = full_symmetric_segment(wa, wb);
            for k in 1..=3 {
                let lhs = d.star_k_pclosed(&inv, k).unwrap();
                let rhs = crate::weights::star_k_wlit(d.graph(), k).unwrap();
                assert_eq!(lhs, rhs, "(*_{k}) on segment({wa},{wb})");
            }
        }
    }

    #[test]
    fn companion_is_idempotent() {
        let (d, _) = full_symmetric_segment(3, 4);
        let c1 = d.wlit_companion();
        let c2 = c1.wlit_companion();
        for v in 0..d.graph().vertex_count() {
            assert_eq!(
                c1.group(v).elements().unwrap(),
                c2.group(v).elements().unwrap()
            );
        }
    }

    #[test]
    fn truncated_tree_oracle_on_segment() {
        let (d, inv) = full_symmetric_segment(3, 3);
        let c = d.graph().vertex("c").unwrap();
        let tree = TruncatedDeltaTree::build(&d, &inv, c, 3).unwrap();
        // root degree = ω(a) = 3
        assert_eq!(tree.children[0].len(), 3);
        let report = oracle_check_tree(&d, &inv, &tree).unwrap();
        assert!(report.all_ok(), "{:?}", report.checks);
    }

    #[test]
    fn orbit_condition_violation_detected() {
        // a two-colour edge with a trivial group: two orbits inside X_a
        let raw = RawLad {
            vertices: vec!["c".into(), "d".into()],
            edges: vec![
                RawLadEdge {
                    name: "a".into(),
                    origin: "c".into(),
                    terminus: "d".into(),
                    inverse: "b".into(),
                    colors: vec!["a0".into(), "a1".into()],
                },
                RawLadEdge {
                    name: "b".into(),
                    origin: "d".into(),
                    terminus: "c".into(),
                    inverse: "a".into(),
                    colors: vec!["b0".into(), "b1".into()],
                },
            ],
            groups: BTreeMap::new(),
            inversion: None,
        };
        assert!(matches!(
            LocalActionDiagram::validate(&raw),
            Err(LadError::OrbitCondition(..))
        ));
    }
}
