//! Finite simple graphs on dense vertex ids.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// An undirected edge stored with `0 <= u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", from = "[usize; 2]")]
pub struct Edge(Vertex, Vertex);

impl Edge {
    /// Normalizes the endpoint order. Panics on a loop; use [`Edge::try_new`] for input data.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        assert!(u != v, "loop edge at {u}");
        if u < v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn try_new(u: Vertex, v: Vertex) -> Option<Self> {
        (u != v).then(|| Edge::new(u, v))
    }

    pub fn u(self) -> Vertex {
        self.0
    }

    pub fn v(self) -> Vertex {
        self.1
    }

    pub fn contains(self, x: Vertex) -> bool {
        self.0 == x || self.1 == x
    }

    pub fn other(self, x: Vertex) -> Option<Vertex> {
        if self.0 == x {
            Some(self.1)
        } else if self.1 == x {
            Some(self.0)
        } else {
            None
        }
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.0, e.1]
    }
}

impl From<[usize; 2]> for Edge {
    fn from([u, v]: [usize; 2]) -> Self {
        Edge::new(u, v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Ambient dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dimension(usize);

impl Dimension {
    pub const DEFAULT_MAX: usize = 6;

    pub fn new(d: usize) -> Result<Self> {
        Self::with_max(d, Self::DEFAULT_MAX)
    }

    pub fn with_max(d: usize, max: usize) -> Result<Self> {
        if d == 0 || d > max {
            return Err(Error::DimensionOutOfRange { d, max });
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `d(d+1)/2`, the dimension of the isometry group.
    pub fn isometry_dim(self) -> usize {
        self.0 * (self.0 + 1) / 2
    }

    /// Rank of the rigidity matrix of a rigid framework on `n >= d+1` vertices.
    pub fn rigid_rank(self, n: usize) -> usize {
        if n <= self.0 {
            n * n.saturating_sub(1) / 2
        } else {
            self.0 * n - self.isometry_dim()
        }
    }

    /// `2^d`, the order of the diagonal sign group acting on pinned realisations.
    pub fn sign_group_order(self) -> u64 {
        1u64 << self.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A simple graph on vertices `0..n`. Immutable once built; edge iteration is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
    adjacency: Vec<BTreeSet<Vertex>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::from_pairs(raw.n, raw.edges.iter().map(|&[u, v]| (u, v)))
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph { n: g.n, edges: g.edges.iter().map(|&e| e.into()).collect() }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, edges: BTreeSet::new(), adjacency: vec![BTreeSet::new(); n] }
    }

    /// Validating constructor: rejects loops, duplicates and out-of-range endpoints.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (u, v) in pairs {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            let e = Edge::try_new(u, v)
                .ok_or_else(|| Error::InvalidGraph(format!("loop edge at vertex {u}")))?;
            if !g.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge {e}")));
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::from_pairs(n, edges.into_iter().map(|e| (e.0, e.1)))
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert(Edge(u, v));
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.insert(Edge::new(i, (i + 1) % n));
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 1..n {
            g.insert(Edge(i - 1, i));
        }
        g
    }

    /// Complete multipartite graph; parts are consecutive id ranges in the given order.
    pub fn complete_multipartite(parts: &[usize]) -> Self {
        let n = parts.iter().sum();
        let mut part_of = Vec::with_capacity(n);
        for (i, &size) in parts.iter().enumerate() {
            part_of.extend(std::iter::repeat_n(i, size));
        }
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if part_of[u] != part_of[v] {
                    g.insert(Edge(u, v));
                }
            }
        }
        g
    }

    pub(crate) fn insert(&mut self, e: Edge) -> bool {
        if self.edges.insert(e) {
            self.adjacency[e.0].insert(e.1);
            self.adjacency[e.1].insert(e.0);
            true
        } else {
            false
        }
    }

    pub(crate) fn remove(&mut self, e: Edge) -> bool {
        if self.edges.remove(&e) {
            self.adjacency[e.0].remove(&e.1);
            self.adjacency[e.1].remove(&e.0);
            true
        } else {
            false
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_vec(&self) -> Vec<Edge> {
        self.edges.iter().copied().collect()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && u < self.n && v < self.n && self.adjacency[u].contains(&v)
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adjacency[v].iter().copied()
    }

    pub fn neighbor_set(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    /// `N(u) ∩ N(v)`.
    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> Result<BTreeSet<Vertex>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidGraph(format!("common neighbours of {u} with itself")));
        }
        Ok(self.adjacency[u].intersection(&self.adjacency[v]).copied().collect())
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn non_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.adjacency[u].contains(&v) {
                    out.push(Edge(u, v));
                }
            }
        }
        out
    }

    pub fn with_edge(&self, e: Edge) -> Result<Graph> {
        self.check_vertex(e.v())?;
        let mut g = self.clone();
        if !g.insert(e) {
            return Err(Error::InvalidGraph(format!("edge {e} already present")));
        }
        Ok(g)
    }

    pub fn without_edge(&self, e: Edge) -> Result<Graph> {
        let mut g = self.clone();
        if !g.remove(e) {
            return Err(Error::InvalidGraph(format!("edge {e} not present")));
        }
        Ok(g)
    }

    /// Same vertex set, only the given edges (which must belong to `self`).
    pub fn spanning_subgraph(&self, edges: impl IntoIterator<Item = Edge>) -> Result<Graph> {
        let mut g = Graph::empty(self.n);
        for e in edges {
            if !self.edges.contains(&e) {
                return Err(Error::InvalidGraph(format!("edge {e} not in host graph")));
            }
            g.insert(e);
        }
        Ok(g)
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n <= other.n && self.edges.is_subset(&other.edges)
    }

    /// Induced subgraph relabelled to `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> Result<Graph> {
        for &v in vertices {
            self.check_vertex(v)?;
        }
        let mut g = Graph::empty(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidGraph(format!("repeated vertex {a}")));
                }
                if self.has_edge(a, b) {
                    g.insert(Edge(i, j));
                }
            }
        }
        Ok(g)
    }

    /// Applies a vertex map `old -> new` onto a graph with `n` vertices.
    pub fn relabel(&self, map: &[Vertex], n: usize) -> Result<Graph> {
        if map.len() != self.n {
            return Err(Error::InvalidGraph("relabelling map has wrong length".into()));
        }
        Graph::from_pairs(n, self.edges.iter().map(|e| (map[e.0], map[e.1])))
    }

    /// Returns `self` with edges of `other` (same vertex count) added.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if other.n > self.n {
            return Err(Error::InvalidGraph("union with a larger graph".into()));
        }
        let mut g = self.clone();
        for e in other.edges() {
            g.insert(e);
        }
        Ok(g)
    }

    /// Vertices with at least one incident edge, sorted.
    pub fn covered_vertices(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| !self.adjacency[v].is_empty()).collect()
    }

    /// Canonical form under vertex relabelling: the lexicographically smallest sorted edge
    /// list over all labellings consistent with a degree-based refinement. Exponential in
    /// the size of the refinement cells; intended for graphs with at most ~10 vertices.
    pub fn canonical_form(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        if n == 0 {
            return Vec::new();
        }
        // vertex invariant: (degree, sorted neighbour degrees)
        let inv: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nd: Vec<usize> = self.neighbors(v).map(|w| self.degree(w)).collect();
                nd.sort_unstable();
                (self.degree(v), nd)
            })
            .collect();
        let mut order: Vec<Vertex> = (0..n).collect();
        order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
        let mut cells: Vec<Vec<Vertex>> = Vec::new();
        for &v in &order {
            match cells.last_mut() {
                Some(cell) if inv[cell[0]] == inv[v] => cell.push(v),
                _ => cells.push(vec![v]),
            }
        }

        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut cell_perms: Vec<Vec<Vertex>> = cells.clone();
        let mut label = vec![0usize; n];
        canonical_search(self, &cells, &mut cell_perms, 0, &mut label, &mut best);
        best.unwrap_or_default()
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.n == other.n
            && self.edge_count() == other.edge_count()
            && self.canonical_form() == other.canonical_form()
    }

    /// Compact text form `n; u v, u v, ...` accepted by [`crate::io::parse_graph`].
    pub fn to_edge_list(&self) -> String {
        let pairs: Vec<String> = self.edges.iter().map(|e| format!("{} {}", e.0, e.1)).collect();
        format!("{}; {}", self.n, pairs.join(", "))
    }
}

fn canonical_search(
    g: &Graph,
    cells: &[Vec<Vertex>],
    perms: &mut Vec<Vec<Vertex>>,
    cell: usize,
    label: &mut [usize],
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if cell == cells.len() {
        let mut next = 0;
        for p in perms.iter() {
            for &v in p {
                label[v] = next;
                next += 1;
            }
        }
        let mut edges: Vec<(usize, usize)> = g
            .edges()
            .map(|e| {
                let (a, b) = (label[e.0], label[e.1]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        if best.as_ref().is_none_or(|b| edges < *b) {
            *best = Some(edges);
        }
        return;
    }
    let k = perms[cell].len();
    permute(g, cells, perms, cell, k, label, best);
}

// Heap's algorithm over the vertices of one cell, recursing into the next cell per arrangement.
fn permute(
    g: &Graph,
    cells: &[Vec<Vertex>],
    perms: &mut Vec<Vec<Vertex>>,
    cell: usize,
    k: usize,
    label: &mut [usize],
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if k <= 1 {
        canonical_search(g, cells, perms, cell + 1, label, best);
        return;
    }
    for i in 0..k - 1 {
        permute(g, cells, perms, cell, k - 1, label, best);
        if k % 2 == 0 {
            perms[cell].swap(i, k - 1);
        } else {
            perms[cell].swap(0, k - 1);
        }
    }
    permute(g, cells, perms, cell, k - 1, label, best);
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

/// Small named graphs used throughout the tests and the CLI.
pub mod named {
    use super::*;

    pub fn k4_minus_edge() -> Graph {
        Graph::complete(4).without_edge(Edge::new(2, 3)).expect("edge present")
    }

    /// Two tetrahedra glued along a shared edge line: the 8-vertex, 18-edge graph that
    /// satisfies the 3D count but is flexible.
    pub fn double_banana() -> Graph {
        let mut pairs = Vec::new();
        // poles 0 and 1 shared; bananas on {2,3,4} and {5,6,7}
        for side in [[2, 3, 4], [5, 6, 7]] {
            for (i, &a) in side.iter().enumerate() {
                pairs.push((0, a));
                pairs.push((1, a));
                for &b in &side[i + 1..] {
                    pairs.push((a, b));
                }
            }
        }
        Graph::from_pairs(8, pairs).expect("valid")
    }

    pub fn octahedron() -> Graph {
        let mut g = Graph::complete(6);
        for (u, v) in [(0, 1), (2, 3), (4, 5)] {
            g = g.without_edge(Edge::new(u, v)).expect("edge present");
        }
        g
    }

    /// Two triangles `{0,1,2}`, `{3,4,5}` joined by a perfect matching plus two apex
    /// vertices 6 and 7. Vertex order: 11, 21, 31, 12, 22, 32, a, b.
    fn prism_base() -> Vec<(usize, usize)> {
        vec![
            (0, 3),
            (1, 4),
            (0, 1),
            (0, 2),
            (3, 4),
            (3, 5),
            (6, 1),
            (6, 3),
            (6, 2),
            (7, 4),
            (7, 0),
            (7, 5),
        ]
    }

    /// Globally rigid 8-vertex, 14-edge planar graph.
    pub fn prism_g1() -> Graph {
        let mut pairs = prism_base();
        pairs.push((2, 5));
        pairs.push((6, 7));
        Graph::from_pairs(8, pairs).expect("valid")
    }

    /// `prism_g1` minus the apex edge; 2-realisation number 45.
    pub fn prism_g2() -> Graph {
        let mut pairs = prism_base();
        pairs.push((2, 5));
        Graph::from_pairs(8, pairs).expect("valid")
    }

    /// `prism_g1` minus the matching edge between the lower triangle corners;
    /// 2-realisation number 32.
    pub fn prism_g3() -> Graph {
        let mut pairs = prism_base();
        pairs.push((6, 7));
        Graph::from_pairs(8, pairs).expect("valid")
    }

    /// Minimally 2-rigid 5-vertex graph: `K4` minus an edge with a degree-2 vertex attached
    /// to the two non-adjacent vertices.
    pub fn two_reflection_graph() -> Graph {
        Graph::from_pairs(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (4, 2), (4, 3)])
            .expect("valid")
    }

    /// `K_{3,3}` plus a vertex adjacent to all six others.
    pub fn k33_cone() -> Graph {
        let mut pairs = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                pairs.push((a, b));
            }
        }
        for v in 0..6 {
            pairs.push((6, v));
        }
        Graph::from_pairs(7, pairs).expect("valid")
    }

    /// `K_{1,...,1,t}` with `d` singleton parts.
    pub fn singletons_plus_part(d: usize, t: usize) -> Graph {
        let mut parts = vec![1; d];
        parts.push(t);
        Graph::complete_multipartite(&parts)
    }
}
