//! Graph operations with a known effect on realisation numbers.
//!
//! Each operation builds the output graph and records what is predicted about
//! `c_d(after) / c_d(before)` together with the rigidity hypotheses the prediction rests on.
//! Operations only check combinatorial conditions; the hypotheses are confirmed by the
//! certificate layer.
//!
//! New vertices always get the next free id (`n`, `n + 1`, ...). A split keeps `x1 = x`.

mod steinitz;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dimension, Edge, Graph, Vertex};

pub use steinitz::{steinitz_contract, SphereReduction};

/// What the theory predicts for `c_d(after)` in terms of `c_d(before)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PredictedEffect {
    /// `c_d(after) = factor · c_d(before)`.
    ExactFactor { factor: u64 },
    /// `c_d(after) ≥ factor · c_d(before)`.
    LowerBoundFactor { factor: u64 },
    /// `c_d(after) = c_d(replacement) / c_d(replaced) · c_d(before)`, resolved by counting.
    ExactRatio { replacement: Graph, replaced: Graph },
    None,
}

/// Rigidity conditions behind a prediction, to be confirmed numerically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Hypothesis {
    RigidBefore,
    MinimallyRigidBefore,
    MinimallyRigidAfter,
    /// The listed graph (a piece of the input, relabelled to `0..`) is d-rigid.
    Rigid { graph: Graph },
    /// Some minimally rigid spanning subgraph `H̃` of the replaced graph makes
    /// `before − E(H) + E(H̃)` minimally rigid.
    ReducibleSubstitution,
}

/// One operation with its parameters, in terms of the ids of its input graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operation {
    ZeroExtension {
        neighbors: Vec<Vertex>,
    },
    OneExtension {
        removed: Edge,
        extra: Vec<Vertex>,
    },
    VertexSplit {
        x: Vertex,
        n1: Vec<Vertex>,
        n2: Vec<Vertex>,
        w: Vec<Vertex>,
    },
    SpiderSplit {
        x: Vertex,
        n1: Vec<Vertex>,
        n2: Vec<Vertex>,
        w: Vec<Vertex>,
    },
    XReplacement {
        e: Edge,
        f: Edge,
        extra: Vec<Vertex>,
    },
    VReplacement {
        e: Edge,
        f: Edge,
        extra: Vec<Vertex>,
    },
    /// Replaces `H = (w, f)` by `H' = (w ∪ {n, .., n + added − 1}, f_prime)`.
    SubgraphSubstitution {
        w: Vec<Vertex>,
        f: Vec<Edge>,
        added: usize,
        f_prime: Vec<Edge>,
    },
    /// Merges `removed` into `kept` (`kept < removed`); `relabel[old]` is the new id of
    /// `old` and `None` for `removed`.
    EdgeContraction {
        kept: Vertex,
        removed: Vertex,
        relabel: Vec<Option<Vertex>>,
    },
}

impl Operation {
    pub fn kind(&self) -> &'static str {
        match self {
            Operation::ZeroExtension { .. } => "zero_extension",
            Operation::OneExtension { .. } => "one_extension",
            Operation::VertexSplit { .. } => "vertex_split",
            Operation::SpiderSplit { .. } => "spider_split",
            Operation::XReplacement { .. } => "x_replacement",
            Operation::VReplacement { .. } => "v_replacement",
            Operation::SubgraphSubstitution { .. } => "subgraph_substitution",
            Operation::EdgeContraction { .. } => "edge_contraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionStep {
    pub d: usize,
    pub operation: Operation,
    pub predicted_effect: PredictedEffect,
    pub hypotheses: Vec<Hypothesis>,
}

impl ConstructionStep {
    pub fn kind(&self) -> &'static str {
        self.operation.kind()
    }

    /// Re-applies the operation to `g`, re-deriving output and prediction.
    pub fn replay(&self, g: &Graph) -> Result<(Graph, ConstructionStep)> {
        let d = Dimension::new(self.d)?;
        match &self.operation {
            Operation::ZeroExtension { neighbors } => zero_extension(g, d, neighbors),
            Operation::OneExtension { removed, extra } => one_extension(g, d, *removed, extra),
            Operation::VertexSplit { x, n1, n2, w } => vertex_split(g, d, *x, n1, n2, w),
            Operation::SpiderSplit { x, n1, n2, w } => spider_split(g, d, *x, n1, n2, w),
            Operation::XReplacement { e, f, extra } => xv_replacement(g, d, ReplacementKind::X, *e, *f, extra),
            Operation::VReplacement { e, f, extra } => xv_replacement(g, d, ReplacementKind::V, *e, *f, extra),
            Operation::SubgraphSubstitution { w, f, added, f_prime } => {
                subgraph_substitution_edges(g, d, w, f, *added, f_prime)
            }
            Operation::EdgeContraction { kept, removed, .. } => edge_contraction(g, d, *kept, *removed),
        }
    }
}

/// A base graph, steps, and the graph the steps produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSequence {
    pub base: Graph,
    pub steps: Vec<ConstructionStep>,
    #[serde(rename = "final")]
    pub final_graph: Graph,
}

impl ConstructionSequence {
    /// Replays every step from `base` and checks that each recorded step is reproduced
    /// exactly and that the result equals `final`. Returns the intermediate graphs,
    /// starting with `base`.
    pub fn replay(&self) -> Result<Vec<Graph>> {
        let mut graphs = vec![self.base.clone()];
        for (i, step) in self.steps.iter().enumerate() {
            let cur = graphs.last().expect("nonempty");
            let (next, again) = step.replay(cur)?;
            if &again != step {
                return Err(Error::InvalidOperation(format!("step {i} does not replay to the recorded step")));
            }
            graphs.push(next);
        }
        if graphs.last() != Some(&self.final_graph) {
            return Err(Error::InvalidOperation("replay does not reach the recorded final graph".into()));
        }
        Ok(graphs)
    }
}

fn distinct(vs: &[Vertex], what: &str) -> Result<BTreeSet<Vertex>> {
    let set: BTreeSet<Vertex> = vs.iter().copied().collect();
    if set.len() != vs.len() {
        return Err(Error::InvalidOperation(format!("repeated vertex in {what}")));
    }
    Ok(set)
}

fn check_all(g: &Graph, vs: &[Vertex]) -> Result<()> {
    vs.iter().try_for_each(|&v| g.check_vertex(v))
}

fn add_vertex(g: &Graph) -> Graph {
    let mut out = Graph::empty(g.n() + 1);
    for e in g.edges() {
        out.insert(e);
    }
    out
}

fn maxwell_tight(g: &Graph, d: Dimension) -> bool {
    g.edge_count() == d.rigid_rank(g.n())
}

fn is_clique(g: &Graph, vs: &[Vertex]) -> bool {
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// New vertex `n` joined to `d` distinct vertices.
pub fn zero_extension(g: &Graph, d: Dimension, neighbors: &[Vertex]) -> Result<(Graph, ConstructionStep)> {
    check_all(g, neighbors)?;
    distinct(neighbors, "neighbors")?;
    if neighbors.len() != d.get() {
        return Err(Error::InvalidOperation(format!("0-extension needs {} neighbours", d.get())));
    }
    let mut out = add_vertex(g);
    let x = g.n();
    for &v in neighbors {
        out.insert(Edge::new(v, x));
    }
    let step = ConstructionStep {
        d: d.get(),
        operation: Operation::ZeroExtension { neighbors: neighbors.to_vec() },
        predicted_effect: PredictedEffect::ExactFactor { factor: 2 },
        hypotheses: vec![Hypothesis::RigidBefore],
    };
    Ok((out, step))
}

/// Deletes `v1 v2` and adds `v0 = n` adjacent to `v1, v2` and the `d − 1` extra vertices.
/// Doubling is predicted when these `d + 1` vertices form a clique of a minimally rigid graph.
pub fn one_extension(g: &Graph, d: Dimension, removed: Edge, extra: &[Vertex]) -> Result<(Graph, ConstructionStep)> {
    if !g.has_edge(removed.u(), removed.v()) {
        return Err(Error::InvalidOperation(format!("{}-{} is not an edge", removed.u(), removed.v())));
    }
    check_all(g, extra)?;
    if extra.len() + 1 != d.get() {
        return Err(Error::InvalidOperation(format!("1-extension needs {} extra vertices", d.get() - 1)));
    }
    let mut all = vec![removed.u(), removed.v()];
    all.extend_from_slice(extra);
    distinct(&all, "1-extension vertices")?;
    let clique = is_clique(g, &all);
    let mut out = add_vertex(g);
    out.remove(removed);
    let x = g.n();
    for &v in &all {
        out.insert(Edge::new(v, x));
    }
    let (predicted_effect, hypotheses) = if clique {
        (PredictedEffect::ExactFactor { factor: 2 }, vec![Hypothesis::MinimallyRigidBefore])
    } else {
        (PredictedEffect::None, vec![])
    };
    let step = ConstructionStep {
        d: d.get(),
        operation: Operation::OneExtension { removed, extra: extra.to_vec() },
        predicted_effect,
        hypotheses,
    };
    Ok((out, step))
}

fn split(
    g: &Graph,
    d: Dimension,
    x: Vertex,
    n1: &[Vertex],
    n2: &[Vertex],
    w: &[Vertex],
    spider: bool,
) -> Result<Graph> {
    g.check_vertex(x)?;
    let want = if spider { d.get() } else { d.get() - 1 };
    if w.len() != want {
        return Err(Error::InvalidOperation(format!("|W| must be {want}")));
    }
    let mut parts: Vec<Vertex> = n1.to_vec();
    parts.extend_from_slice(n2);
    parts.extend_from_slice(w);
    let set = distinct(&parts, "N1, N2, W")?;
    if &set != g.neighbor_set(x) {
        return Err(Error::InvalidOperation(format!("N1, N2, W must partition the neighbourhood of {x}")));
    }
    let x2 = g.n();
    let mut out = add_vertex(g);
    for &v in n2 {
        out.remove(Edge::new(x, v));
        out.insert(Edge::new(v, x2));
    }
    for &v in w {
        out.insert(Edge::new(v, x2));
    }
    if !spider {
        out.insert(Edge::new(x, x2));
    }
    Ok(out)
}

fn split_prediction(g: &Graph, d: Dimension, factor: u64) -> (PredictedEffect, Vec<Hypothesis>) {
    // splits of redundantly rigid graphs carry no prediction
    if g.n() > d.get() && maxwell_tight(g, d) {
        (PredictedEffect::LowerBoundFactor { factor }, vec![Hypothesis::MinimallyRigidBefore])
    } else {
        (PredictedEffect::None, vec![])
    }
}

/// `x` becomes `x1 = x` adjacent to `N1 ∪ W ∪ {x2}` and `x2 = n` adjacent to `N2 ∪ W`,
/// with `|W| = d − 1`.
pub fn vertex_split(
    g: &Graph,
    d: Dimension,
    x: Vertex,
    n1: &[Vertex],
    n2: &[Vertex],
    w: &[Vertex],
) -> Result<(Graph, ConstructionStep)> {
    let out = split(g, d, x, n1, n2, w, false)?;
    let (predicted_effect, hypotheses) = split_prediction(g, d, 2);
    let step = ConstructionStep {
        d: d.get(),
        operation: Operation::VertexSplit { x, n1: n1.to_vec(), n2: n2.to_vec(), w: w.to_vec() },
        predicted_effect,
        hypotheses,
    };
    Ok((out, step))
}

/// As [`vertex_split`] with `|W| = d` and no edge `x1 x2`.
pub fn spider_split(
    g: &Graph,
    d: Dimension,
    x: Vertex,
    n1: &[Vertex],
    n2: &[Vertex],
    w: &[Vertex],
) -> Result<(Graph, ConstructionStep)> {
    let out = split(g, d, x, n1, n2, w, true)?;
    let (predicted_effect, hypotheses) = split_prediction(g, d, 1);
    let step = ConstructionStep {
        d: d.get(),
        operation: Operation::SpiderSplit { x, n1: n1.to_vec(), n2: n2.to_vec(), w: w.to_vec() },
        predicted_effect,
        hypotheses,
    };
    Ok((out, step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementKind {
    X,
    V,
}

/// Deletes `e` and `f` (disjoint for X, sharing one vertex for V) and adds `v0 = n` of
/// degree `d + 2` adjacent to their endpoints and the extra vertices.
pub fn xv_replacement(
    g: &Graph,
    d: Dimension,
    kind: ReplacementKind,
    e: Edge,
    f: Edge,
    extra: &[Vertex],
) -> Result<(Graph, ConstructionStep)> {
    for a in [e, f] {
        if !g.has_edge(a.u(), a.v()) {
            return Err(Error::InvalidOperation(format!("{}-{} is not an edge", a.u(), a.v())));
        }
    }
    let ends: BTreeSet<Vertex> = [e.u(), e.v(), f.u(), f.v()].into_iter().collect();
    match (kind, ends.len()) {
        (ReplacementKind::X, 4) | (ReplacementKind::V, 3) => {}
        (ReplacementKind::X, _) => return Err(Error::InvalidOperation("X-replacement needs disjoint edges".into())),
        (ReplacementKind::V, _) => return Err(Error::InvalidOperation("V-replacement needs adjacent edges".into())),
    }
    check_all(g, extra)?;
    let mut all: Vec<Vertex> = ends.into_iter().collect();
    all.extend_from_slice(extra);
    distinct(&all, "replacement vertices")?;
    if all.len() != d.get() + 2 {
        return Err(Error::InvalidOperation(format!("new vertex must have degree {}", d.get() + 2)));
    }
    let mut out = add_vertex(g);
    out.remove(e);
    out.remove(f);
    let x = g.n();
    for &v in &all {
        out.insert(Edge::new(v, x));
    }
    // d = 3 and the five vertices induce K5 minus an edge, the only minimally 3-rigid
    // graph on five vertices
    let mut sorted = all.clone();
    sorted.sort_unstable();
    let induced = g.induced(&sorted)?;
    let gate = d.get() == 3 && induced.edge_count() == 9;
    let (predicted_effect, hypotheses) = if gate {
        (
            PredictedEffect::ExactFactor { factor: 2 },
            vec![Hypothesis::MinimallyRigidBefore, Hypothesis::MinimallyRigidAfter],
        )
    } else {
        (PredictedEffect::None, vec![])
    };
    let operation = match kind {
        ReplacementKind::X => Operation::XReplacement { e, f, extra: extra.to_vec() },
        ReplacementKind::V => Operation::VReplacement { e, f, extra: extra.to_vec() },
    };
    Ok((out, ConstructionStep { d: d.get(), operation, predicted_effect, hypotheses }))
}

/// Replaces the subgraph `h` (edges over `G`'s ids, vertex set `w`) by `h_prime`, whose
/// vertices are `w` plus `added` new vertices numbered from `G.n()`.
///
/// `h` must be a d-rigid subgraph on at least `d + 1` vertices and `h_prime` d-rigid; both
/// are checked here with the randomized rank test.
pub fn subgraph_substitution(
    g: &Graph,
    d: Dimension,
    w: &[Vertex],
    h: &Graph,
    added: usize,
    h_prime: &Graph,
    seed: u64,
) -> Result<(Graph, ConstructionStep)> {
    let (out, step) = subgraph_substitution_edges(g, d, w, &h.edge_vec(), added, &h_prime.edge_vec())?;
    if let PredictedEffect::ExactRatio { replacement, replaced } = &step.predicted_effect {
        for (name, piece) in [("H", replaced), ("H'", replacement)] {
            if !crate::rigidity::is_d_rigid(piece, d, seed).rigid {
                return Err(Error::InvalidOperation(format!("{name} is not {}-rigid", d.get())));
            }
        }
    }
    Ok((out, step))
}

fn subgraph_substitution_edges(
    g: &Graph,
    d: Dimension,
    w: &[Vertex],
    f: &[Edge],
    added: usize,
    f_prime: &[Edge],
) -> Result<(Graph, ConstructionStep)> {
    check_all(g, w)?;
    let wset = distinct(w, "W")?;
    if w.len() < d.get() + 1 {
        return Err(Error::InvalidOperation(format!("H needs at least {} vertices", d.get() + 1)));
    }
    for e in f {
        if !g.has_edge(e.u(), e.v()) || !wset.contains(&e.u()) || !wset.contains(&e.v()) {
            return Err(Error::InvalidOperation(format!("{}-{} is not an edge of G inside W", e.u(), e.v())));
        }
    }
    let n_out = g.n() + added;
    let in_w_prime = |v: Vertex| wset.contains(&v) || (g.n()..n_out).contains(&v);
    for e in f_prime {
        if !in_w_prime(e.u()) || !in_w_prime(e.v()) {
            return Err(Error::InvalidOperation(format!(
                "H' edge {}-{} leaves W' = W ∪ new vertices (overlap condition)",
                e.u(),
                e.v()
            )));
        }
    }
    let mut out = Graph::empty(n_out);
    let removed: BTreeSet<Edge> = f.iter().copied().collect();
    for e in g.edges().filter(|e| !removed.contains(e)) {
        out.insert(e);
    }
    for &e in f_prime {
        out.insert(e);
    }
    // the two pieces relabelled to 0.., W first in sorted order, then the new vertices
    let w_sorted: Vec<Vertex> = wset.iter().copied().collect();
    let mut local = vec![usize::MAX; n_out];
    for (i, &v) in w_sorted.iter().chain((g.n()..n_out).collect::<Vec<_>>().iter()).enumerate() {
        local[v] = i;
    }
    let replaced = Graph::from_pairs(w.len(), f.iter().map(|e| (local[e.u()], local[e.v()])))?;
    let replacement = Graph::from_pairs(w.len() + added, f_prime.iter().map(|e| (local[e.u()], local[e.v()])))?;
    let mut wv = w.to_vec();
    wv.sort_unstable();
    let mut fv = f.to_vec();
    fv.sort_unstable();
    let mut fpv = f_prime.to_vec();
    fpv.sort_unstable();
    fpv.dedup();
    let step = ConstructionStep {
        d: d.get(),
        operation: Operation::SubgraphSubstitution { w: wv, f: fv, added, f_prime: fpv },
        predicted_effect: PredictedEffect::ExactRatio { replacement, replaced },
        hypotheses: vec![Hypothesis::RigidBefore, Hypothesis::ReducibleSubstitution],
    };
    Ok((out, step))
}

/// Contracts `kept removed` (`kept < removed`), merging the neighbourhoods and shifting ids
/// above `removed` down by one.
pub fn edge_contraction(g: &Graph, d: Dimension, kept: Vertex, removed: Vertex) -> Result<(Graph, ConstructionStep)> {
    if kept >= removed || !g.has_edge(kept, removed) {
        return Err(Error::InvalidOperation(format!("{kept}-{removed} is not a contractible edge (need kept < removed)")));
    }
    let relabel: Vec<Option<Vertex>> = (0..g.n())
        .map(|x| match x.cmp(&removed) {
            std::cmp::Ordering::Less => Some(x),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(x - 1),
        })
        .collect();
    let target = |x: Vertex| relabel[if x == removed { kept } else { x }].expect("kept survives");
    let mut out = Graph::empty(g.n() - 1);
    for e in g.edges() {
        let (a, b) = (target(e.u()), target(e.v()));
        if a != b {
            out.insert(Edge::new(a, b));
        }
    }
    let step = ConstructionStep {
        d: d.get(),
        operation: Operation::EdgeContraction { kept, removed, relabel },
        predicted_effect: PredictedEffect::None,
        hypotheses: vec![],
    };
    Ok((out, step))
}

#[cfg(test)]
mod tests;
