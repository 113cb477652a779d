//! Game graphs: ownership, weighted (parallel) edges, JSON exchange format,
//! and the structural algorithms the solvers rely on.

mod attractor;
mod cycles;
mod strategy;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{serde_q, Q};

pub use attractor::attractor;
pub use cycles::{
    cycle_average, euler_circuit, eulerian_cycle_sets, reachable_from, reachable_sccs, scc_decompose,
    simple_cycles, simple_cycles_within, CycleMixtureBasis, Scc,
};
pub use strategy::{memoryless_over, memoryless_strategies, product, product_full, MemorylessStrategy, MooreStrategy, Product};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    P1,
    P2,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::P1 => Owner::P2,
            Owner::P2 => Owner::P1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub owner: Owner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Vec<Q>,
}

/// Directed multigraph with a vertex-ownership partition and rational
/// `k`-dimensional edge weights. Every vertex has an outgoing edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameGraph {
    k: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    initial: usize,
    out: Vec<Vec<usize>>,
}

/// Incremental construction; [`GraphBuilder::finish`] validates.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    k: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new(k: usize) -> Self {
        GraphBuilder { k, vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn vertex(&mut self, name: impl Into<String>, owner: Owner) -> usize {
        self.vertices.push(Vertex { name: name.into(), owner });
        self.vertices.len() - 1
    }

    pub fn edge(&mut self, from: usize, to: usize, weight: Vec<Q>) -> usize {
        self.edges.push(Edge { from, to, weight });
        self.edges.len() - 1
    }

    pub fn finish(self, initial: usize) -> Result<GameGraph> {
        GameGraph::new(self.k, self.vertices, self.edges, initial)
    }
}

impl GameGraph {
    pub fn new(k: usize, vertices: Vec<Vertex>, edges: Vec<Edge>, initial: usize) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Input("graph has no vertices".into()));
        }
        if initial >= vertices.len() {
            return Err(Error::Input(format!("initial vertex index {initial} out of range")));
        }
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if let Some(j) = seen.insert(v.name.as_str(), i) {
                return Err(Error::Input(format!("duplicate vertex id {:?} (entries {j} and {i})", v.name)));
            }
        }
        let mut out = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.from >= vertices.len() || e.to >= vertices.len() {
                return Err(Error::Input(format!("edge {i} references a missing vertex")));
            }
            if e.weight.len() != k {
                return Err(Error::Input(format!(
                    "edge {i} ({} -> {}) has {} weights, expected {k}",
                    vertices[e.from].name,
                    vertices[e.to].name,
                    e.weight.len()
                )));
            }
            out[e.from].push(i);
        }
        if let Some(v) = out.iter().position(Vec::is_empty) {
            return Err(Error::Input(format!("vertex {:?} has no outgoing edge", vertices[v].name)));
        }
        Ok(GameGraph { k, vertices, edges, initial, out })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.vertices[v].owner
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vertices[v].name
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn with_initial(&self, v: usize) -> GameGraph {
        GameGraph { initial: v, ..self.clone() }
    }

    /// The player with choices, if only one has vertices of out-degree > 1.
    /// `Ok(None)` when nobody has a choice.
    pub fn chooser(&self) -> Result<Option<Owner>> {
        let choosy = |p: Owner| (0..self.num_vertices()).any(|v| self.owner(v) == p && self.out[v].len() > 1);
        match (choosy(Owner::P1), choosy(Owner::P2)) {
            (true, true) => Err(Error::Input("both players have choices; not a one-player graph".into())),
            (true, false) => Ok(Some(Owner::P1)),
            (false, true) => Ok(Some(Owner::P2)),
            (false, false) => Ok(None),
        }
    }

    /// Subgraph induced by `keep`, with the first kept vertex as initial
    /// unless the current initial vertex is kept. Returns the new graph and
    /// the old index of every new vertex. Fails if a kept vertex loses all
    /// its outgoing edges.
    pub fn induced(&self, keep: &[bool]) -> Result<(GameGraph, Vec<usize>)> {
        let old: Vec<usize> = (0..self.num_vertices()).filter(|v| keep[*v]).collect();
        let mut new_of = vec![usize::MAX; self.num_vertices()];
        for (i, v) in old.iter().enumerate() {
            new_of[*v] = i;
        }
        let vertices = old.iter().map(|v| self.vertices[*v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.from] && keep[e.to])
            .map(|e| Edge { from: new_of[e.from], to: new_of[e.to], weight: e.weight.clone() })
            .collect();
        let initial = if keep[self.initial] { new_of[self.initial] } else { 0 };
        Ok((GameGraph::new(self.k, vertices, edges, initial)?, old))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: GraphFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            Error::Parse(format!("graph file, field `{}` (line {}, column {}): {inner}", e.path(), inner.line(), inner.column()))
        })?;
        file.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from_graph(self)).expect("graph serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    k: usize,
    initial: String,
    vertices: Vec<VertexFile>,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    id: String,
    owner: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    from: String,
    to: String,
    #[serde(with = "serde_q::vec")]
    weight: Vec<Q>,
}

impl GraphFile {
    fn into_graph(self) -> Result<GameGraph> {
        let mut index = HashMap::new();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.into_iter().enumerate() {
            let owner = match v.owner {
                1 => Owner::P1,
                2 => Owner::P2,
                o => return Err(Error::Parse(format!("graph file, field `vertices[{i}].owner`: expected 1 or 2, got {o}"))),
            };
            index.insert(v.id.clone(), i);
            vertices.push(Vertex { name: v.id, owner });
        }
        let lookup = |name: &str, field: String| {
            index.get(name).copied().ok_or_else(|| Error::Parse(format!("graph file, field `{field}`: unknown vertex {name:?}")))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.into_iter().enumerate() {
            let from = lookup(&e.from, format!("edges[{i}].from"))?;
            let to = lookup(&e.to, format!("edges[{i}].to"))?;
            edges.push(Edge { from, to, weight: e.weight });
        }
        let initial = lookup(&self.initial, "initial".into())?;
        GameGraph::new(self.k, vertices, edges, initial)
    }

    fn from_graph(g: &GameGraph) -> Self {
        GraphFile {
            k: g.k,
            initial: g.name(g.initial).to_string(),
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexFile { id: v.name.clone(), owner: if v.owner == Owner::P1 { 1 } else { 2 } })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeFile { from: g.name(e.from).into(), to: g.name(e.to).into(), weight: e.weight.clone() })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"k":2,"initial":"a","vertices":[{"id":"a","owner":1},{"id":"b","owner":2}],
        "edges":[{"from":"a","to":"b","weight":["1","-1/2"]},{"from":"b","to":"a","weight":["0.25","3"]},
                 {"from":"b","to":"b","weight":["0","0"]}]}"#;

    #[test]
    fn json_round_trip() {
        let g = GameGraph::from_json(SAMPLE).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.out_edges(1), &[1, 2]);
        assert_eq!(g.edge(1).weight[0], crate::rational::frac(1, 4));
        let again = GameGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = SAMPLE.replace("\"-1/2\"", "\"x\"");
        let msg = GameGraph::from_json(&bad).unwrap_err().to_string();
        assert!(msg.contains("edges[0].weight"), "{msg}");
        let bad = SAMPLE.replace("\"to\":\"b\",\"weight\":[\"1\"", "\"to\":\"zz\",\"weight\":[\"1\"");
        let msg = GameGraph::from_json(&bad).unwrap_err().to_string();
        assert!(msg.contains("edges[0].to"), "{msg}");
    }

    #[test]
    fn rejects_dead_ends_and_bad_weights() {
        let mut b = GraphBuilder::new(1);
        let a = b.vertex("a", Owner::P1);
        let c = b.vertex("c", Owner::P1);
        b.edge(a, c, vec![Q::from_integer(1.into())]);
        assert!(b.clone().finish(a).is_err());
        b.edge(c, c, vec![]);
        assert!(b.finish(a).is_err());
    }
}
