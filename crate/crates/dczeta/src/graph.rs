//! Serre-style graphs: finite connected graphs with a fixed-point-free edge
//! involution and a positive integer weight on every directed edge.
//!
//! Edges and vertices are named by strings in the input format; after
//! validation everything is indexed by `usize`, with the edge order fixed as
//! the lexicographic order of edge names. That order is part of the canonical
//! graph: matrix rows, path enumeration and spanning trees all derive from it,
//! so runs are reproducible.

use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {0:?}: unknown origin vertex {1:?}")]
    DanglingOrigin(String, String),
    #[error("edge {0:?}: unknown inverse edge {1:?}")]
    DanglingInverse(String, String),
    #[error("edge {0:?}: fixed-point inversion")]
    FixedPointInversion(String),
    #[error("edges {0:?} and {1:?}: inversion is not involutive")]
    NonInvolutive(String, String),
    #[error("edge {0:?}: declared terminus {1:?} does not match origin of inverse {2:?}")]
    TerminusMismatch(String, String, String),
    #[error("edge {0:?}: weight must be >= 1")]
    NonPositiveWeight(String),
    #[error("graph is disconnected (vertex {0:?} unreachable from {1:?})")]
    Disconnected(String, String),
    #[error("unknown vertex or edge id {0:?}")]
    UnknownSite(String),
    #[error("id {0:?} names both a vertex and an edge; qualify with v: or e:")]
    AmbiguousSite(String),
    #[error("graph still has a cycle of length >= 2")]
    HasLongCycle,
    #[error("invalid graph file: {0}")]
    Format(String),
}

/// Raw JSON shape of a graph file.
#[derive(Debug, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Deserialize)]
pub struct RawEdge {
    pub name: String,
    pub origin: String,
    pub terminus: String,
    pub inverse: String,
    pub weight: u64,
}

/// A vertex or an edge of the graph (an element of `Γ = VΓ ⊔ EΓ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Vertex(usize),
    Edge(usize),
}

/// Validated weighted Serre graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    origin: Vec<usize>,
    inverse: Vec<usize>,
    weight: Vec<u64>,
    out_edges: Vec<Vec<usize>>,
}

impl WeightedGraph {
    /// Validate a raw description: involution without fixed points, total
    /// terminus, connectivity, positive weights. Ids are canonicalized so the
    /// edge order is the lexicographic order of edge names.
    pub fn validate(raw: &RawGraph) -> Result<Self, GraphError> {
        if raw.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut vertex_names = raw.vertices.clone();
        vertex_names.sort();
        for pair in vertex_names.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateVertex(pair[0].clone()));
            }
        }
        let vertex_index: BTreeMap<&str, usize> = vertex_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();

        let mut edge_names: Vec<String> = raw.edges.iter().map(|e| e.name.clone()).collect();
        edge_names.sort();
        for pair in edge_names.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateEdge(pair[0].clone()));
            }
        }
        let edge_index: BTreeMap<&str, usize> = edge_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();

        let ne = edge_names.len();
        let mut origin = vec![0usize; ne];
        let mut inverse = vec![0usize; ne];
        let mut weight = vec![0u64; ne];
        let mut terminus_claim = vec![0usize; ne];
        for e in &raw.edges {
            let idx = edge_index[e.name.as_str()];
            origin[idx] = *vertex_index
                .get(e.origin.as_str())
                .ok_or_else(|| GraphError::DanglingOrigin(e.name.clone(), e.origin.clone()))?;
            terminus_claim[idx] = *vertex_index
                .get(e.terminus.as_str())
                .ok_or_else(|| GraphError::DanglingOrigin(e.name.clone(), e.terminus.clone()))?;
            inverse[idx] = *edge_index
                .get(e.inverse.as_str())
                .ok_or_else(|| GraphError::DanglingInverse(e.name.clone(), e.inverse.clone()))?;
            if e.weight < 1 {
                return Err(GraphError::NonPositiveWeight(e.name.clone()));
            }
            weight[idx] = e.weight;
        }
        for e in 0..ne {
            if inverse[e] == e {
                return Err(GraphError::FixedPointInversion(edge_names[e].clone()));
            }
            if inverse[inverse[e]] != e {
                return Err(GraphError::NonInvolutive(
                    edge_names[e].clone(),
                    edge_names[inverse[e]].clone(),
                ));
            }
            // terminus is redundant in the file but checked
            if terminus_claim[e] != origin[inverse[e]] {
                return Err(GraphError::TerminusMismatch(
                    edge_names[e].clone(),
                    vertex_names[terminus_claim[e]].clone(),
                    vertex_names[origin[inverse[e]]].clone(),
                ));
            }
        }

        let mut out_edges = vec![Vec::new(); vertex_names.len()];
        for e in 0..ne {
            out_edges[origin[e]].push(e);
        }

        let g = WeightedGraph {
            vertex_names,
            edge_names,
            origin,
            inverse,
            weight,
            out_edges,
        };
        // connectivity from vertex 0
        let mut seen = vec![false; g.vertex_count()];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &g.out_edges[v] {
                let w = g.terminus(e);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(GraphError::Disconnected(
                g.vertex_names[v].clone(),
                g.vertex_names[0].clone(),
            ));
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: RawGraph =
            serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        Self::validate(&raw)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_names[e]
    }

    pub fn origin(&self, e: usize) -> usize {
        self.origin[e]
    }

    pub fn terminus(&self, e: usize) -> usize {
        self.origin[self.inverse[e]]
    }

    pub fn inverse(&self, e: usize) -> usize {
        self.inverse[e]
    }

    pub fn weight(&self, e: usize) -> u64 {
        self.weight[e]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.origin(e) == self.terminus(e)
    }

    /// Outgoing edges `o^{-1}(v)`, in canonical order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Incoming edges `t^{-1}(v)`, in canonical order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| self.terminus(e) == v)
            .collect()
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertex_names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn edge(&self, name: &str) -> Option<usize> {
        self.edge_names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Resolve `v:<id>`, `e:<id>`, or a bare id (which must be unambiguous).
    pub fn site(&self, name: &str) -> Result<Site, GraphError> {
        if let Some(id) = name.strip_prefix("v:") {
            return self
                .vertex(id)
                .map(Site::Vertex)
                .ok_or_else(|| GraphError::UnknownSite(id.to_string()));
        }
        if let Some(id) = name.strip_prefix("e:") {
            return self
                .edge(id)
                .map(Site::Edge)
                .ok_or_else(|| GraphError::UnknownSite(id.to_string()));
        }
        match (self.vertex(name), self.edge(name)) {
            (Some(_), Some(_)) => Err(GraphError::AmbiguousSite(name.to_string())),
            (Some(v), None) => Ok(Site::Vertex(v)),
            (None, Some(e)) => Ok(Site::Edge(e)),
            (None, None) => Err(GraphError::UnknownSite(name.to_string())),
        }
    }

    pub fn site_name(&self, site: Site) -> &str {
        match site {
            Site::Vertex(v) => self.vertex_name(v),
            Site::Edge(e) => self.edge_name(e),
        }
    }

    /// All sites of the graph: vertices in order, then edges in order.
    pub fn sites(&self) -> Vec<Site> {
        (0..self.vertex_count())
            .map(Site::Vertex)
            .chain((0..self.edge_count()).map(Site::Edge))
            .collect()
    }

    /// Max weighted out-degree `max_v Σ_{a ∈ o^{-1}(v)} ω(a)` (the degree of
    /// the covering tree).
    pub fn max_weighted_degree(&self) -> u64 {
        (0..self.vertex_count())
            .map(|v| self.out_edges[v].iter().map(|&e| self.weight[e]).sum())
            .max()
            .unwrap_or(0)
    }

    /// All paths from the given site (trivial path included for a vertex,
    /// paths starting with the given edge otherwise) of length at most
    /// `max_len`, in (length, lexicographic) order. Paths are not required to
    /// be reduced.
    pub fn enumerate_paths(&self, start: Site, max_len: usize) -> Vec<Path> {
        let mut out = Vec::new();
        let mut frontier: Vec<Path> = Vec::new();
        match start {
            Site::Vertex(v) => {
                let trivial = Path::trivial(v);
                out.push(trivial.clone());
                frontier.push(trivial);
            }
            Site::Edge(e) => {
                if max_len >= 1 {
                    let p = Path {
                        start: self.origin(e),
                        edges: vec![e],
                    };
                    out.push(p.clone());
                    frontier.push(p);
                }
            }
        }
        let mut len = match start {
            Site::Vertex(_) => 0,
            Site::Edge(_) => 1,
        };
        while len < max_len && !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                let end = p.terminus(self);
                for &e in &self.out_edges[end] {
                    let mut q = p.clone();
                    q.edges.push(e);
                    next.push(q);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
            len += 1;
        }
        out
    }

    /// Deterministic BFS spanning tree from `root`: for every vertex other
    /// than the root, the parent edge points from the vertex toward the root.
    /// Returns `parent_edge[v]` (edge with origin v on the geodesic to root).
    fn bfs_tree(&self, root: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v] {
                let w = self.terminus(e);
                if !seen[w] {
                    seen[w] = true;
                    // edge from w back to v
                    parent[w] = Some(self.inverse(e));
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Reduced path inside the BFS tree from `v` toward the root, as edges.
    fn tree_path_to_root(&self, parent: &[Option<usize>], v: usize) -> Vec<usize> {
        let mut edges = Vec::new();
        let mut cur = v;
        while let Some(e) = parent[cur] {
            edges.push(e);
            cur = self.terminus(e);
        }
        edges
    }

    /// A fundamental cycle basis: the spanning tree is the BFS tree from the
    /// lexicographically least vertex, and for each non-tree edge pair one
    /// closed path `tree-path · edge · tree-path` (based at the root) is
    /// returned. A tree graph yields the empty list.
    pub fn fundamental_cycles(&self) -> Vec<Path> {
        let root = 0;
        let parent = self.bfs_tree(root);
        let mut tree_edges = vec![false; self.edge_count()];
        for p in parent.iter().flatten() {
            tree_edges[*p] = true;
            tree_edges[self.inverse(*p)] = true;
        }
        let mut cycles = Vec::new();
        let mut done_pair = vec![false; self.edge_count()];
        for e in 0..self.edge_count() {
            if tree_edges[e] || done_pair[e] {
                continue;
            }
            done_pair[e] = true;
            done_pair[self.inverse(e)] = true;
            // root -> o(e), then e, then t(e) -> root
            let down = {
                let mut p = self.tree_path_to_root(&parent, self.origin(e));
                p.reverse();
                p.into_iter().map(|f| self.inverse(f)).collect::<Vec<_>>()
            };
            let up = self.tree_path_to_root(&parent, self.terminus(e));
            let mut edges = down;
            edges.push(e);
            edges.extend(up);
            cycles.push(Path { start: root, edges });
        }
        cycles
    }

    /// Maximal subtree and orientation for the Euler characteristic formula:
    /// the tree is the BFS tree from `c`; the positive tree edges all point
    /// toward `c`, so their origin map is a bijection onto `VΓ \ {c}`. The
    /// orientation is extended to non-tree pairs by taking the
    /// lexicographically smaller edge as positive.
    pub fn oriented_spanning(&self, c: usize) -> (SpanningTree, Orientation) {
        let parent = self.bfs_tree(c);
        let mut tree_edges = vec![false; self.edge_count()];
        let mut positive = vec![false; self.edge_count()];
        for p in parent.iter().flatten() {
            tree_edges[*p] = true;
            tree_edges[self.inverse(*p)] = true;
            positive[*p] = true;
        }
        for e in 0..self.edge_count() {
            if !tree_edges[e] && !positive[e] && !positive[self.inverse(e)] {
                positive[e.min(self.inverse(e))] = true;
            }
        }
        (
            SpanningTree {
                root: c,
                parent_edge: parent,
                tree_edges,
            },
            Orientation { positive },
        )
    }

    /// True iff the graph has an n-cycle with n >= 2.
    pub fn has_long_cycle(&self) -> bool {
        let non_loop_pairs = (0..self.edge_count())
            .filter(|&e| !self.is_loop(e) && e < self.inverse(e))
            .count();
        non_loop_pairs > self.vertex_count() - 1
    }

    /// For a graph without cycles of length >= 2: the unique maximal subtree,
    /// obtained by removing all 1-loops.
    pub fn loopless_subtree(&self) -> Result<WeightedGraph, GraphError> {
        if self.has_long_cycle() {
            return Err(GraphError::HasLongCycle);
        }
        let edges: Vec<usize> = (0..self.edge_count()).filter(|&e| !self.is_loop(e)).collect();
        self.subgraph(&edges, &(0..self.vertex_count()).collect::<Vec<_>>())
    }

    /// Extract the subgraph spanned by the given edges (closed under
    /// inversion) plus explicitly listed extra vertices, keeping names and
    /// weights. Fails if the result is empty or disconnected.
    pub fn subgraph(&self, edges: &[usize], vertices: &[usize]) -> Result<WeightedGraph, GraphError> {
        let mut edge_set = vec![false; self.edge_count()];
        for &e in edges {
            edge_set[e] = true;
            edge_set[self.inverse(e)] = true;
        }
        let mut vertex_set = vec![false; self.vertex_count()];
        for &v in vertices {
            vertex_set[v] = true;
        }
        for e in 0..self.edge_count() {
            if edge_set[e] {
                vertex_set[self.origin(e)] = true;
                vertex_set[self.terminus(e)] = true;
            }
        }
        let raw = RawGraph {
            vertices: (0..self.vertex_count())
                .filter(|&v| vertex_set[v])
                .map(|v| self.vertex_names[v].clone())
                .collect(),
            edges: (0..self.edge_count())
                .filter(|&e| edge_set[e])
                .map(|e| RawEdge {
                    name: self.edge_names[e].clone(),
                    origin: self.vertex_names[self.origin(e)].clone(),
                    terminus: self.vertex_names[self.terminus(e)].clone(),
                    inverse: self.edge_names[self.inverse(e)].clone(),
                    weight: self.weight(e),
                })
                .collect(),
        };
        WeightedGraph::validate(&raw)
    }

    /// Map a site of this graph to the same-named site of another graph.
    pub fn transfer_site(&self, site: Site, other: &WeightedGraph) -> Result<Site, GraphError> {
        match site {
            Site::Vertex(v) => other
                .vertex(self.vertex_name(v))
                .map(Site::Vertex)
                .ok_or_else(|| GraphError::UnknownSite(self.vertex_name(v).to_string())),
            Site::Edge(e) => other
                .edge(self.edge_name(e))
                .map(Site::Edge)
                .ok_or_else(|| GraphError::UnknownSite(self.edge_name(e).to_string())),
        }
    }

    /// Shortest reduced path whose first edge is `a` and last edge is `b`
    /// (possibly a = b, length 1), by BFS over (last edge) states.
    pub fn reduced_edge_path(&self, a: usize, b: usize) -> Option<Path> {
        if a == b {
            return Some(Path {
                start: self.origin(a),
                edges: vec![a],
            });
        }
        let mut prev: Vec<Option<usize>> = vec![None; self.edge_count()];
        let mut seen = vec![false; self.edge_count()];
        seen[a] = true;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(e) = queue.pop_front() {
            for &f in &self.out_edges[self.terminus(e)] {
                if f == self.inverse(e) || seen[f] {
                    continue;
                }
                seen[f] = true;
                prev[f] = Some(e);
                if f == b {
                    let mut edges = vec![b];
                    let mut cur = b;
                    while let Some(p) = prev[cur] {
                        edges.push(p);
                        cur = p;
                    }
                    edges.reverse();
                    return Some(Path {
                        start: self.origin(edges[0]),
                        edges,
                    });
                }
                queue.push_back(f);
            }
        }
        None
    }

    /// Shortest reduced path between two vertices (trivial if equal), BFS.
    pub fn reduced_vertex_path(&self, c: usize, d: usize) -> Option<Path> {
        if c == d {
            return Some(Path::trivial(c));
        }
        let mut prev: Vec<Option<usize>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[c] = true;
        let mut queue = std::collections::VecDeque::from([c]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v] {
                let w = self.terminus(e);
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                prev[w] = Some(e);
                if w == d {
                    let mut edges = Vec::new();
                    let mut cur = d;
                    while let Some(p) = prev[cur] {
                        edges.push(p);
                        cur = self.origin(p);
                    }
                    edges.reverse();
                    return Some(Path { start: c, edges });
                }
                queue.push_back(w);
            }
        }
        None
    }
}

/// A path: explicit start vertex (so trivial paths are representable) plus an
/// edge sequence with matching endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
#[error("paths do not compose: first ends at {0:?}, second starts at {1:?}")]
pub struct ComposeError(pub String, pub String);

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path {
            start: v,
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn terminus(&self, g: &WeightedGraph) -> usize {
        match self.edges.last() {
            Some(&e) => g.terminus(e),
            None => self.start,
        }
    }

    /// Check start vertex and endpoint chaining.
    pub fn is_valid(&self, g: &WeightedGraph) -> bool {
        let mut at = self.start;
        for &e in &self.edges {
            if g.origin(e) != at {
                return false;
            }
            at = g.terminus(e);
        }
        true
    }

    pub fn compose(&self, g: &WeightedGraph, other: &Path) -> Result<Path, ComposeError> {
        let end = self.terminus(g);
        if end != other.start {
            return Err(ComposeError(
                g.vertex_name(end).to_string(),
                g.vertex_name(other.start).to_string(),
            ));
        }
        let mut edges = self.edges.clone();
        edges.extend(&other.edges);
        Ok(Path {
            start: self.start,
            edges,
        })
    }

    pub fn reverse(&self, g: &WeightedGraph) -> Path {
        Path {
            start: self.terminus(g),
            edges: self.edges.iter().rev().map(|&e| g.inverse(e)).collect(),
        }
    }

    pub fn is_reduced(&self, g: &WeightedGraph) -> bool {
        self.edges
            .windows(2)
            .all(|w| w[1] != g.inverse(w[0]))
    }

    pub fn display(&self, g: &WeightedGraph) -> String {
        if self.edges.is_empty() {
            format!("O_{}", g.vertex_name(self.start))
        } else {
            self.edges
                .iter()
                .map(|&e| g.edge_name(e))
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

/// An orientation: exactly one of `{e, ē}` is positive for every pair.
#[derive(Debug, Clone)]
pub struct Orientation {
    positive: Vec<bool>,
}

impl Orientation {
    pub fn is_positive(&self, e: usize) -> bool {
        self.positive[e]
    }

    pub fn positive_edges(&self) -> Vec<usize> {
        (0..self.positive.len()).filter(|&e| self.positive[e]).collect()
    }
}

/// BFS spanning tree with parent edges pointing toward the root.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub root: usize,
    /// For v != root: the tree edge with origin v on the geodesic to the root.
    pub parent_edge: Vec<Option<usize>>,
    /// Both directions of every tree edge.
    pub tree_edges: Vec<bool>,
}

impl SpanningTree {
    pub fn contains_edge(&self, e: usize) -> bool {
        self.tree_edges[e]
    }

    /// Reduced tree path from the root to `v`.
    pub fn path_from_root(&self, g: &WeightedGraph, v: usize) -> Path {
        let mut up = Vec::new();
        let mut cur = v;
        while let Some(e) = self.parent_edge[cur] {
            up.push(e);
            cur = g.terminus(e);
        }
        up.reverse();
        Path {
            start: self.root,
            edges: up.into_iter().map(|e| g.inverse(e)).collect(),
        }
    }
}
