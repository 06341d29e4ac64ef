//! Triangulated 2-spheres given by face lists, and edge contraction on them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};

/// A triangulated sphere on vertices `0..n`. Faces are stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTriangulation", into = "RawTriangulation")]
pub struct Triangulation {
    n: usize,
    faces: Vec<[Vertex; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawTriangulation {
    n: usize,
    faces: Vec<[usize; 3]>,
}

impl TryFrom<RawTriangulation> for Triangulation {
    type Error = Error;
    fn try_from(r: RawTriangulation) -> Result<Self> {
        Triangulation::new(r.n, r.faces)
    }
}

impl From<Triangulation> for RawTriangulation {
    fn from(t: Triangulation) -> Self {
        RawTriangulation { n: t.n, faces: t.faces }
    }
}

fn sorted_face(f: [Vertex; 3]) -> [Vertex; 3] {
    let mut f = f;
    f.sort_unstable();
    f
}

impl Triangulation {
    /// Validates: `n >= 4`, faces are distinct triples of distinct in-range vertices, every
    /// edge lies in exactly two faces, every vertex link is a single cycle, and
    /// `V - E + F = 2`.
    pub fn new(n: usize, faces: Vec<[Vertex; 3]>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidTriangulation(m));
        if n < 4 {
            return bad(format!("need at least 4 vertices, got {n}"));
        }
        let mut canon: Vec<[Vertex; 3]> = Vec::with_capacity(faces.len());
        let mut seen = BTreeSet::new();
        for f in faces {
            let s = sorted_face(f);
            if s[2] >= n {
                return bad(format!("face {f:?} has a vertex out of range"));
            }
            if s[0] == s[1] || s[1] == s[2] {
                return bad(format!("face {f:?} repeats a vertex"));
            }
            if !seen.insert(s) {
                return bad(format!("duplicate face {s:?}"));
            }
            canon.push(s);
        }
        canon.sort_unstable();

        let mut edge_faces: BTreeMap<Edge, usize> = BTreeMap::new();
        for f in &canon {
            for e in face_edges(*f) {
                *edge_faces.entry(e).or_default() += 1;
            }
        }
        if let Some((e, c)) = edge_faces.iter().find(|(_, &c)| c != 2) {
            return bad(format!("edge {e} lies in {c} faces, expected 2"));
        }

        for v in 0..n {
            // link of v: edges {a,b} for faces {v,a,b}
            let link: Vec<(Vertex, Vertex)> = canon
                .iter()
                .filter(|f| f.contains(&v))
                .map(|f| {
                    let mut o = f.iter().copied().filter(|&x| x != v);
                    (o.next().expect("3 vertices"), o.next().expect("3 vertices"))
                })
                .collect();
            if link.is_empty() {
                return bad(format!("vertex {v} lies in no face"));
            }
            if !is_single_cycle(&link) {
                return bad(format!("link of vertex {v} is not a single cycle"));
            }
        }

        let (vv, ee, ff) = (n as i64, edge_faces.len() as i64, canon.len() as i64);
        if vv - ee + ff != 2 {
            return bad(format!("Euler characteristic {} != 2", vv - ee + ff));
        }
        Ok(Triangulation { n, faces: canon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[[Vertex; 3]] {
        &self.faces
    }

    /// The 1-skeleton; has `3n - 6` edges.
    pub fn graph(&self) -> Graph {
        let edges: BTreeSet<Edge> = self.faces.iter().flat_map(|&f| face_edges(f)).collect();
        Graph::from_edges(self.n, edges).expect("validated faces give a simple graph")
    }

    /// Contracts `u v` (kept as the smaller id) and compacts ids by shifting every vertex
    /// above the removed one down by one. Returns the new triangulation and the map
    /// `old id -> new id` (`None` for the removed vertex).
    ///
    /// Only edges whose endpoints have exactly two common neighbours can be contracted
    /// without leaving the class of triangulated spheres.
    pub fn contract(&self, u: Vertex, v: Vertex) -> Result<(Triangulation, Vec<Option<Vertex>>)> {
        let g = self.graph();
        if !g.has_edge(u, v) {
            return Err(Error::InvalidOperation(format!("{u}-{v} is not an edge")));
        }
        if self.n <= 4 {
            return Err(Error::InvalidOperation("cannot contract below the tetrahedron".into()));
        }
        let common = g.common_neighbors(u, v)?;
        if common.len() != 2 {
            return Err(Error::InvalidOperation(format!(
                "edge {u}-{v} has {} common neighbours; contraction would not give a sphere",
                common.len()
            )));
        }
        let (keep, gone) = (u.min(v), u.max(v));
        let map: Vec<Option<Vertex>> = (0..self.n)
            .map(|x| match x.cmp(&gone) {
                std::cmp::Ordering::Less => Some(x),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(x - 1),
            })
            .collect();
        let mut faces = Vec::with_capacity(self.faces.len() - 2);
        for f in &self.faces {
            if f.contains(&keep) && f.contains(&gone) {
                continue;
            }
            let g: [Vertex; 3] = f.map(|x| if x == gone { keep } else { x });
            faces.push(g.map(|x| map[x].expect("removed vertex substituted")));
        }
        Ok((Triangulation::new(self.n - 1, faces)?, map))
    }

    pub fn tetrahedron() -> Self {
        Triangulation::new(4, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).expect("valid")
    }

    pub fn octahedron() -> Self {
        // antipodal pairs (0,1), (2,3), (4,5)
        let mut faces = Vec::new();
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    faces.push([a, b, c]);
                }
            }
        }
        Triangulation::new(6, faces).expect("valid")
    }

    pub fn icosahedron() -> Self {
        // vertex 0 top, 1..=5 upper ring, 6..=10 lower ring, 11 bottom
        let mut faces = Vec::new();
        for i in 0..5 {
            let (a, b) = (1 + i, 1 + (i + 1) % 5);
            let (c, e) = (6 + i, 6 + (i + 1) % 5);
            faces.push([0, a, b]);
            faces.push([a, b, c]);
            faces.push([b, c, e]);
            faces.push([11, c, e]);
        }
        Triangulation::new(12, faces).expect("valid")
    }

    /// Stacked sphere: the tetrahedron with `k` successive faces subdivided by a new
    /// vertex, always subdividing the last face created.
    pub fn stacked(k: usize) -> Self {
        let mut t = Triangulation::tetrahedron();
        for _ in 0..k {
            let f = *t.faces.last().expect("nonempty");
            let x = t.n;
            let mut faces: Vec<[usize; 3]> = t.faces.iter().copied().filter(|g| *g != f).collect();
            faces.push([f[0], f[1], x]);
            faces.push([f[0], f[2], x]);
            faces.push([f[1], f[2], x]);
            t = Triangulation::new(x + 1, faces).expect("stacking preserves validity");
        }
        t
    }
    /// Neighbours of `v` in cyclic order around it.
    pub fn rotation(&self, v: Vertex) -> Vec<Vertex> {
        let link: Vec<(Vertex, Vertex)> = self
            .faces
            .iter()
            .filter(|f| f.contains(&v))
            .map(|f| {
                let mut o = f.iter().copied().filter(|&x| x != v);
                (o.next().expect("3 vertices"), o.next().expect("3 vertices"))
            })
            .collect();
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for &(a, b) in &link {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let start = *adj.keys().next().expect("validated link");
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            cycle.push(cur);
            let nb = &adj[&cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        cycle
    }

    /// Inverse of [`Triangulation::contract`]: splits `v` along its neighbours `a` and `b`.
    /// The new vertex `n` takes the faces around `v` on the arc from `a` to `b` in
    /// [`Triangulation::rotation`] order and becomes adjacent to `v`, `a` and `b`.
    pub fn split(&self, v: Vertex, a: Vertex, b: Vertex) -> Result<Triangulation> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let rot = self.rotation(v);
        let pos = |x: Vertex| {
            rot.iter()
                .position(|&y| y == x)
                .ok_or_else(|| Error::InvalidOperation(format!("{x} is not a neighbour of {v}")))
        };
        let (i, j) = (pos(a)?, pos(b)?);
        if i == j {
            return Err(Error::InvalidOperation("split needs two distinct neighbours".into()));
        }
        let m = rot.len();
        let w = self.n;
        let mut moved = BTreeSet::new();
        let mut k = i;
        while k != j {
            moved.insert(sorted_face([v, rot[k], rot[(k + 1) % m]]));
            k = (k + 1) % m;
        }
        let mut faces: Vec<[Vertex; 3]> = self
            .faces
            .iter()
            .map(|f| if moved.contains(f) { f.map(|x| if x == v { w } else { x }) } else { *f })
            .collect();
        faces.push([v, w, a]);
        faces.push([v, w, b]);
        Triangulation::new(self.n + 1, faces)
    }
}

/// All triangulated spheres with `4..=max_n` vertices up to isomorphism, grown from the
/// tetrahedron by vertex splits. Sorted by `n`, then by the canonical form of the skeleton.
pub fn enumerate_spheres(max_n: usize) -> Vec<Triangulation> {
    let mut all = Vec::new();
    let mut layer = vec![Triangulation::tetrahedron()];
    while let Some(first) = layer.first() {
        if first.n() > max_n {
            break;
        }
        let mut next: BTreeMap<Vec<(usize, usize)>, Triangulation> = BTreeMap::new();
        if first.n() < max_n {
            for t in &layer {
                for v in 0..t.n {
                    let rot = t.rotation(v);
                    for &a in &rot {
                        for &b in &rot {
                            if a == b {
                                continue;
                            }
                            let s = t.split(v, a, b).expect("splitting a sphere gives a sphere");
                            next.entry(s.graph().canonical_form()).or_insert(s);
                        }
                    }
                }
            }
        }
        let mut sorted: Vec<(Vec<(usize, usize)>, Triangulation)> =
            layer.into_iter().map(|t| (t.graph().canonical_form(), t)).collect();
        sorted.sort_by(|x, y| x.0.cmp(&y.0));
        all.extend(sorted.into_iter().map(|(_, t)| t));
        layer = next.into_values().collect();
    }
    all
}

fn face_edges(f: [Vertex; 3]) -> [Edge; 3] {
    [Edge::new(f[0], f[1]), Edge::new(f[0], f[2]), Edge::new(f[1], f[2])]
}

// The link edges must form one cycle: every link vertex has degree 2 and the edges are
// connected.
fn is_single_cycle(link: &[(Vertex, Vertex)]) -> bool {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(a, b) in link {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|nb| nb.len() != 2) || link.len() < 3 {
        return false;
    }
    let start = *adj.keys().next().expect("nonempty");
    let (mut prev, mut cur, mut steps) = (start, adj[&start][0], 1);
    while cur != start {
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
        steps += 1;
        if steps > link.len() {
            return false;
        }
    }
    steps == adj.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn skeleton_counts() {
        let t = Triangulation::tetrahedron();
        assert_eq!(t.graph(), Graph::complete(4));
        let o = Triangulation::octahedron();
        assert_eq!((o.graph().n(), o.graph().edge_count(), o.faces().len()), (6, 12, 8));
        assert!(o.graph().is_isomorphic(&crate::graph::named::octahedron()));
        let i = Triangulation::icosahedron();
        assert_eq!((i.graph().n(), i.graph().edge_count()), (12, 30));
        let s = Triangulation::stacked(3);
        assert_eq!((s.n(), s.graph().edge_count()), (7, 15));
    }

    #[test]
    fn sphere_enumeration_counts() {
        let all = enumerate_spheres(8);
        let per_n: Vec<usize> = (4..=8).map(|n| all.iter().filter(|t| t.n() == n).count()).collect();
        assert_eq!(per_n, vec![1, 1, 2, 5, 14]);
        assert!(all.iter().any(|t| t.graph().is_isomorphic(&Triangulation::octahedron().graph())));
        for t in &all {
            assert_eq!(t.graph().edge_count(), 3 * t.n() - 6);
        }
    }

    #[test]
    fn split_undoes_contraction() {
        let o = Triangulation::octahedron();
        let rot = o.rotation(0);
        assert_eq!(rot.len(), 4);
        let s = o.split(0, rot[0], rot[2]).unwrap();
        assert_eq!((s.n(), s.graph().edge_count()), (7, 15));
        let (back, _) = s.contract(0, 6).unwrap();
        assert_eq!(back, o);
        assert!(o.split(0, rot[0], rot[0]).is_err());
    }

    #[test]
    fn rejects_invalid() {
        assert!(Triangulation::new(3, vec![[0, 1, 2]]).is_err());
        // tetrahedron with a face missing
        assert!(Triangulation::new(4, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3]]).is_err());
        // two tetrahedra sharing vertex 0: links of 0 are two cycles, Euler fails too
        let mut faces = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        faces.extend([[0, 4, 5], [0, 4, 6], [0, 5, 6], [4, 5, 6]]);
        assert!(Triangulation::new(7, faces).is_err());
    }

    #[test]
    fn contraction_of_octahedron_edge() {
        let o = Triangulation::octahedron();
        let (t, map) = o.contract(0, 2).unwrap();
        assert_eq!(t.n(), 5);
        assert_eq!(map[2], None);
        assert_eq!(map[5], Some(4));
        assert_eq!(t.graph().edge_count(), 9);
    }

    proptest! {
        // Removing a face, duplicating one, or moving one vertex of one face breaks the
        // two-faces-per-edge rule.
        #[test]
        fn perturbed_face_lists_are_rejected(which in 0usize..20, mode in 0usize..3, shift in 1usize..11) {
            let t = Triangulation::icosahedron();
            let mut faces = t.faces().to_vec();
            let i = which % faces.len();
            match mode {
                0 => { faces.remove(i); }
                1 => { let f = faces[i]; faces.push([f[1], f[2], f[0]]); }
                _ => {
                    let f = faces[i];
                    let moved = (f[0] + shift) % 12;
                    prop_assume!(!f.contains(&moved));
                    faces[i] = [moved, f[1], f[2]];
                }
            }
            prop_assert!(Triangulation::new(12, faces).is_err());
        }
    }
}
