//! Text and JSON graph formats.
//!
//! Edge-list form: `n; u v, u v, ...` where whitespace (including newlines) is ignored
//! between tokens. JSON form: `{"n": 4, "edges": [[0,1], ...], "faces": [[0,1,2], ...]}`
//! with `faces` optional.
//!
//! Vertex tokens in the edge-list form may be arbitrary labels. When every label is an
//! integer in `0..n` the ids are kept as written; otherwise distinct labels are assigned
//! ids `0, 1, ...` in sorted order (numeric labels first) and the original labels are kept
//! in [`ParsedGraph::labels`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// `labels[id]` is the token that named vertex `id` in the input.
    pub labels: Vec<String>,
    pub faces: Option<Vec<[usize; 3]>>,
}

impl ParsedGraph {
    pub fn triangulation(&self) -> Result<Triangulation> {
        let faces = self
            .faces
            .as_ref()
            .ok_or_else(|| Error::InvalidTriangulation("input has no face list".into()))?;
        Triangulation::new(self.graph.n(), faces.clone())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    n: usize,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    faces: Option<Vec<[usize; 3]>>,
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset].bytes().filter(|&b| b == b'\n').count() + 1
}

pub fn parse_edge_list(text: &str) -> Result<ParsedGraph> {
    let semi = text.find(';').ok_or_else(|| Error::Parse {
        line: 1,
        message: "expected vertex count followed by ';'".into(),
    })?;
    let head = text[..semi].trim();
    let n: usize = head.parse().map_err(|_| Error::Parse {
        line: line_of(text, semi),
        message: format!("invalid vertex count {head:?}"),
    })?;

    // (line, a, b) per pair
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let body_start = semi + 1;
    let mut offset = body_start;
    for chunk in text[body_start..].split(',') {
        let line = line_of(text, offset + (chunk.len() - chunk.trim_start().len()));
        offset += chunk.len() + 1;
        let tokens: Vec<&str> = chunk.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {
                // allow a trailing comma or an edgeless graph
                continue;
            }
            [a, b] => pairs.push((line, a.to_string(), b.to_string())),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 'u v', found {:?}", chunk.trim()),
                })
            }
        }
    }

    let distinct: BTreeSet<&str> = pairs.iter().flat_map(|(_, a, b)| [a.as_str(), b.as_str()]).collect();
    let identity = distinct.iter().all(|t| t.parse::<usize>().is_ok_and(|v| v < n));
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut labels: Vec<String> = (0..n).map(|v| v.to_string()).collect();
    if identity {
        for t in &distinct {
            ids.insert(t.to_string(), t.parse().expect("checked"));
        }
    } else {
        if distinct.len() > n {
            return Err(Error::Parse {
                line: pairs.last().map_or(1, |p| p.0),
                message: format!("{} distinct vertex labels exceed declared n = {n}", distinct.len()),
            });
        }
        let mut sorted: Vec<&str> = distinct.into_iter().collect();
        sorted.sort_by(|a, b| match (a.parse::<u64>(), b.parse::<u64>()) {
            (Ok(x), Ok(y)) => x.cmp(&y),
            (Ok(_), Err(_)) => std::cmp::Ordering::Less,
            (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
            (Err(_), Err(_)) => a.cmp(b),
        });
        for (id, t) in sorted.into_iter().enumerate() {
            ids.insert(t.to_string(), id);
            labels[id] = t.to_string();
        }
    }

    let mut g_pairs = Vec::with_capacity(pairs.len());
    let mut seen = BTreeSet::new();
    for (line, a, b) in &pairs {
        let (u, v) = (ids[a], ids[b]);
        if u == v {
            return Err(Error::LoopEdge { line: *line, vertex: a.clone() });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::DuplicateEdge { line: *line, u: a.clone(), v: b.clone() });
        }
        g_pairs.push((u, v));
    }
    Ok(ParsedGraph { graph: Graph::from_pairs(n, g_pairs)?, labels, faces: None })
}

pub fn parse_json(text: &str) -> Result<ParsedGraph> {
    let raw: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut seen = BTreeSet::new();
    for (i, &[u, v]) in raw.edges.iter().enumerate() {
        // report the position inside the edges array as the "line"
        if u == v {
            return Err(Error::LoopEdge { line: i + 1, vertex: u.to_string() });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::DuplicateEdge { line: i + 1, u: u.to_string(), v: v.to_string() });
        }
    }
    let mut graph = Graph::from_pairs(raw.n, raw.edges.iter().map(|&[u, v]| (u, v)))?;
    if let Some(faces) = &raw.faces {
        let tri = Triangulation::new(raw.n, faces.clone())?;
        let skeleton = tri.graph();
        if graph.edge_count() == 0 {
            graph = skeleton;
        } else if graph != skeleton {
            return Err(Error::InvalidTriangulation(
                "edge list disagrees with the 1-skeleton of the faces".into(),
            ));
        }
    }
    Ok(ParsedGraph {
        graph,
        labels: (0..raw.n).map(|v| v.to_string()).collect(),
        faces: raw.faces,
    })
}

pub fn to_json(graph: &Graph, faces: Option<&[[usize; 3]]>) -> String {
    let raw = JsonGraph {
        n: graph.n(),
        edges: graph.edges().map(Into::into).collect(),
        faces: faces.map(<[_]>::to_vec),
    };
    serde_json::to_string(&raw).expect("plain data serializes")
}

pub fn read_graph_file(path: &std::path::Path) -> Result<ParsedGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}
