//! Reducing a triangulated sphere to the tetrahedron by edge contractions, and the inverse
//! sequence of 3-dimensional vertex splits.

use serde::{Deserialize, Serialize};

use super::{edge_contraction, vertex_split, ConstructionSequence};
use crate::error::{Error, Result};
use crate::graph::{Dimension, Graph, Vertex};
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereReduction {
    /// From the input skeleton down to `K4`; every intermediate graph is a sphere skeleton.
    pub contractions: ConstructionSequence,
    /// From `K4` back up by vertex splits; `final` is the input skeleton relabelled.
    pub splits: ConstructionSequence,
    /// `to_input[v]` is the input id of vertex `v` of `splits.final`.
    pub to_input: Vec<Vertex>,
}

impl SphereReduction {
    pub fn len(&self) -> usize {
        self.contractions.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contractions.steps.is_empty()
    }

    /// Replays both sequences and checks that the splits rebuild the input skeleton.
    pub fn verify(&self, skeleton: &Graph) -> Result<()> {
        if &self.contractions.base != skeleton {
            return Err(Error::InvalidOperation("contraction sequence does not start at the input".into()));
        }
        self.contractions.replay()?;
        self.splits.replay()?;
        if self.contractions.final_graph != Graph::complete(4) || self.splits.base != Graph::complete(4) {
            return Err(Error::InvalidOperation("sequences do not meet at K4".into()));
        }
        if &self.splits.final_graph.relabel(&self.to_input, skeleton.n())? != skeleton {
            return Err(Error::InvalidOperation("vertex splits do not rebuild the input skeleton".into()));
        }
        Ok(())
    }
}

fn first_contractible(t: &Triangulation) -> Option<(Vertex, Vertex)> {
    let g = t.graph();
    let found = g
        .edges()
        .find(|e| g.common_neighbors(e.u(), e.v()).map(|c| c.len() == 2).unwrap_or(false))
        .map(|e| (e.u(), e.v()));
    found
}

/// Contracts the first edge (in sorted order) whose endpoints have exactly two common
/// neighbours until the tetrahedron is reached, and builds the inverse vertex splits.
pub fn steinitz_contract(t: &Triangulation) -> Result<SphereReduction> {
    let d3 = Dimension::new(3)?;
    let skeleton = t.graph();
    let mut tri = t.clone();
    let mut graphs = vec![skeleton.clone()];
    let mut steps = Vec::new();
    // (u, v, map) per contraction, in the ids of the graph before it
    let mut log = Vec::new();
    while tri.n() > 4 {
        let (u, v) = first_contractible(&tri).ok_or(Error::NoContractibleEdge)?;
        let (next, map) = tri.contract(u, v)?;
        let (g_next, step) = edge_contraction(graphs.last().expect("nonempty"), d3, u, v)?;
        if g_next != next.graph() {
            return Err(Error::InvalidOperation("graph contraction disagrees with face contraction".into()));
        }
        log.push((u, v, map));
        steps.push(step);
        graphs.push(g_next);
        tri = next;
    }
    let contractions = ConstructionSequence { base: skeleton.clone(), steps, final_graph: graphs.last().expect("nonempty").clone() };

    // walk back up; `pi[y]` is the id in graphs[i] of vertex y of the current split graph
    let mut cur = graphs.last().expect("nonempty").clone();
    let mut pi: Vec<Vertex> = (0..cur.n()).collect();
    let mut split_steps = Vec::new();
    for i in (0..log.len()).rev() {
        let (u, v, map) = &log[i];
        let before = &graphs[i];
        let after_to_cur = {
            let mut inv = vec![0; pi.len()];
            for (y, &p) in pi.iter().enumerate() {
                inv[p] = y;
            }
            inv
        };
        let to_cur = |a: Vertex| after_to_cur[map[a].expect("only the removed vertex vanishes")];
        let nu = before.neighbor_set(*u);
        let nv = before.neighbor_set(*v);
        let w: Vec<Vertex> = nu.intersection(nv).map(|&a| to_cur(a)).collect();
        let n1: Vec<Vertex> = nu.iter().filter(|&&a| a != *v && !nv.contains(&a)).map(|&a| to_cur(a)).collect();
        let n2: Vec<Vertex> = nv.iter().filter(|&&a| a != *u && !nu.contains(&a)).map(|&a| to_cur(a)).collect();
        let x = to_cur(*u);
        let (next, step) = vertex_split(&cur, d3, x, &n1, &n2, &w)?;
        // new pi: old vertices map through the contraction's preimage, the new one is v
        let mut pre = vec![0; map.len() - 1];
        for (old, m) in map.iter().enumerate() {
            if let Some(m) = m {
                pre[*m] = old;
            }
        }
        let mut next_pi: Vec<Vertex> = pi.iter().map(|&p| pre[p]).collect();
        next_pi.push(*v);
        if &next.relabel(&next_pi, before.n())? != before {
            return Err(Error::InvalidOperation(format!("inverse split of contraction {i} does not rebuild the graph")));
        }
        split_steps.push(step);
        cur = next;
        pi = next_pi;
    }
    let splits = ConstructionSequence { base: contractions.final_graph.clone(), steps: split_steps, final_graph: cur };
    Ok(SphereReduction { contractions, splits, to_input: pi })
}
