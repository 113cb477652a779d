//! Memoryless and finite-memory (Moore machine) strategies, and the product
//! graph `G^σ` that resolves a player-1 strategy.
//!
//! A Moore strategy here reads the edge just taken rather than the vertex
//! just left: `next(m, v)` names an edge (parallel edges are distinct moves)
//! and `update(m, e)` gives the memory after traversing `e`. Update entries
//! that are absent leave the memory unchanged.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Edge, GameGraph, Owner, Vertex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemorylessStrategy {
    /// Owned vertex → chosen out-edge.
    pub choice: BTreeMap<usize, usize>,
}

impl MemorylessStrategy {
    /// `g` with every non-chosen out-edge of the mapped vertices removed.
    /// Returns the graph and the original id of every kept edge.
    pub fn restrict(&self, g: &GameGraph) -> (GameGraph, Vec<usize>) {
        let kept: Vec<usize> = (0..g.num_edges())
            .filter(|e| self.choice.get(&g.edge(*e).from).is_none_or(|c| c == e))
            .collect();
        let edges = kept.iter().map(|e| g.edge(*e).clone()).collect();
        let h = GameGraph::new(g.k(), g.vertices().to_vec(), edges, g.initial()).expect("every vertex keeps an edge");
        (h, kept)
    }
}

/// Every memoryless strategy of `player` (choices at all of its vertices),
/// in odometer order over vertex ids and edge ids.
pub fn memoryless_strategies(g: &GameGraph, player: Owner) -> impl Iterator<Item = MemorylessStrategy> + '_ {
    let owned: Vec<usize> = (0..g.num_vertices()).filter(|v| g.owner(*v) == player).collect();
    memoryless_over(g, owned)
}

/// Memoryless choices over an explicit vertex list.
pub fn memoryless_over(g: &GameGraph, vertices: Vec<usize>) -> impl Iterator<Item = MemorylessStrategy> + '_ {
    let mut digits = vec![0usize; vertices.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let choice = vertices.iter().zip(&digits).map(|(v, d)| (*v, g.out_edges(*v)[*d])).collect();
        done = true;
        for (i, v) in vertices.iter().enumerate().rev() {
            digits[i] += 1;
            if digits[i] < g.out_edges(*v).len() {
                done = false;
                break;
            }
            digits[i] = 0;
        }
        Some(MemorylessStrategy { choice })
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MooreStrategy {
    pub memory: usize,
    pub initial: usize,
    /// (memory, vertex) → out-edge taken.
    pub next: BTreeMap<(usize, usize), usize>,
    /// (memory, edge) → memory after the edge.
    pub update: BTreeMap<(usize, usize), usize>,
}

impl MooreStrategy {
    pub fn memoryless(s: &MemorylessStrategy) -> Self {
        MooreStrategy {
            memory: 1,
            initial: 0,
            next: s.choice.iter().map(|(v, e)| ((0, *v), *e)).collect(),
            update: BTreeMap::new(),
        }
    }

    pub fn with_initial(&self, m: usize) -> Self {
        MooreStrategy { initial: m, ..self.clone() }
    }

    pub fn step(&self, m: usize, e: usize) -> usize {
        self.update.get(&(m, e)).copied().unwrap_or(m)
    }

    pub fn choose(&self, g: &GameGraph, m: usize, v: usize) -> Result<usize> {
        let e = *self.next.get(&(m, v)).ok_or_else(|| {
            Error::PartialStrategy(format!("no move at vertex {:?} in memory state {m}", g.name(v)))
        })?;
        if e >= g.num_edges() || g.edge(e).from != v {
            return Err(Error::Input(format!("strategy move at {:?} uses edge {e}, which does not leave it", g.name(v))));
        }
        Ok(e)
    }

    pub fn validate(&self, g: &GameGraph) -> Result<()> {
        if self.memory == 0 || self.initial >= self.memory {
            return Err(Error::Input("strategy memory/initial state out of range".into()));
        }
        for (&(m, v), &e) in &self.next {
            if m >= self.memory || v >= g.num_vertices() || e >= g.num_edges() || g.edge(e).from != v {
                return Err(Error::Input(format!("invalid strategy move at memory {m}, vertex {v}, edge {e}")));
            }
        }
        for (&(m, e), &to) in &self.update {
            if m >= self.memory || to >= self.memory || e >= g.num_edges() {
                return Err(Error::Input(format!("invalid strategy update at memory {m}, edge {e}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str, g: &GameGraph) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: StrategyFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            Error::Parse(format!("strategy file, field `{}` (line {}, column {}): {inner}", e.path(), inner.line(), inner.column()))
        })?;
        let mut next = BTreeMap::new();
        for (i, n) in file.next.iter().enumerate() {
            let v = g
                .vertex_index(&n.vertex)
                .ok_or_else(|| Error::Parse(format!("strategy file, field `next[{i}].vertex`: unknown vertex {:?}", n.vertex)))?;
            next.insert((n.memory, v), n.edge);
        }
        let update = file.update.iter().map(|u| ((u.memory, u.edge), u.to)).collect();
        let s = MooreStrategy { memory: file.memory, initial: file.initial, next, update };
        s.validate(g)?;
        Ok(s)
    }

    pub fn to_json(&self, g: &GameGraph) -> String {
        let file = StrategyFile {
            memory: self.memory,
            initial: self.initial,
            next: self
                .next
                .iter()
                .map(|(&(memory, v), &edge)| NextFile { memory, vertex: g.name(v).to_string(), edge })
                .collect(),
            update: self.update.iter().map(|(&(memory, edge), &to)| UpdateFile { memory, edge, to }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("strategy serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    memory: usize,
    initial: usize,
    next: Vec<NextFile>,
    #[serde(default)]
    update: Vec<UpdateFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NextFile {
    memory: usize,
    vertex: String,
    edge: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateFile {
    memory: usize,
    edge: usize,
    to: usize,
}

/// `G^σ` together with the (vertex, memory) pair behind each product vertex
/// and the original edge behind each product edge.
#[derive(Debug, Clone)]
pub struct Product {
    pub graph: GameGraph,
    pub states: Vec<(usize, usize)>,
    pub edge_origin: Vec<usize>,
}

fn product_edges(g: &GameGraph, sigma: &MooreStrategy, v: usize, m: usize) -> Result<Vec<(usize, usize, usize)>> {
    let edges: Vec<usize> = if g.owner(v) == Owner::P1 {
        vec![sigma.choose(g, m, v)?]
    } else {
        g.out_edges(v).to_vec()
    };
    Ok(edges.into_iter().map(|e| (e, g.edge(e).to, sigma.step(m, e))).collect())
}

fn assemble(g: &GameGraph, states: Vec<(usize, usize)>, raw: Vec<(usize, usize, usize)>) -> Result<Product> {
    let vertices = states
        .iter()
        .map(|(v, m)| Vertex { name: format!("{}@{m}", g.name(*v)), owner: g.owner(*v) })
        .collect();
    let edges = raw.iter().map(|(a, b, e)| Edge { from: *a, to: *b, weight: g.edge(*e).weight.clone() }).collect();
    let edge_origin = raw.iter().map(|r| r.2).collect();
    Ok(Product { graph: GameGraph::new(g.k(), vertices, edges, 0)?, states, edge_origin })
}

/// Product graph restricted to the states reachable from `(v0, m0)`. Fails
/// if σ has no move at a reachable player-1 state.
pub fn product(g: &GameGraph, sigma: &MooreStrategy) -> Result<Product> {
    sigma.validate(g)?;
    let start = (g.initial(), sigma.initial);
    let mut index = HashMap::from([(start, 0usize)]);
    let mut states = vec![start];
    let mut raw = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (v, m) = states[i];
        for (e, to, m2) in product_edges(g, sigma, v, m)? {
            let j = *index.entry((to, m2)).or_insert_with(|| {
                states.push((to, m2));
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            raw.push((i, j, e));
        }
    }
    assemble(g, states, raw)
}

/// Product graph over all of `V × M`, memory-major. σ must have a move at
/// every player-1 state.
pub fn product_full(g: &GameGraph, sigma: &MooreStrategy) -> Result<Product> {
    sigma.validate(g)?;
    let n = g.num_vertices();
    let states: Vec<(usize, usize)> = (0..sigma.memory).flat_map(|m| (0..n).map(move |v| (v, m))).collect();
    let mut raw = Vec::new();
    for (i, &(v, m)) in states.iter().enumerate() {
        for (e, to, m2) in product_edges(g, sigma, v, m)? {
            raw.push((i, m2 * n + to, e));
        }
    }
    let mut p = assemble(g, states, raw)?;
    let init = sigma.initial * n + g.initial();
    p.graph = p.graph.with_initial(init);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::super::GraphBuilder;
    use super::*;
    use crate::rational::q;

    fn two_choice() -> GameGraph {
        let mut b = GraphBuilder::new(1);
        let a = b.vertex("a", Owner::P1);
        let c = b.vertex("c", Owner::P2);
        b.edge(a, a, vec![q(1)]);
        b.edge(a, c, vec![q(2)]);
        b.edge(c, a, vec![q(3)]);
        b.edge(c, c, vec![q(4)]);
        b.finish(a).unwrap()
    }

    #[test]
    fn strategy_counts() {
        let g = two_choice();
        assert_eq!(memoryless_strategies(&g, Owner::P1).count(), 2);
        assert_eq!(memoryless_strategies(&g, Owner::P2).count(), 2);
        let mut b = GraphBuilder::new(1);
        let a = b.vertex("a", Owner::P1);
        b.edge(a, a, vec![q(0)]);
        let g = b.finish(a).unwrap();
        assert_eq!(memoryless_strategies(&g, Owner::P2).count(), 1);
    }

    #[test]
    fn memoryless_product_deletes_unchosen_edges() {
        let g = two_choice();
        let s = MooreStrategy::memoryless(&MemorylessStrategy { choice: BTreeMap::from([(0, 1)]) });
        let p = product(&g, &s).unwrap();
        assert_eq!(p.graph.num_vertices(), 2);
        assert_eq!(p.edge_origin, vec![1, 2, 3]);
    }

    #[test]
    fn partial_strategy_is_reported() {
        let g = two_choice();
        let s = MooreStrategy { memory: 1, initial: 0, next: BTreeMap::new(), update: BTreeMap::new() };
        assert!(matches!(product(&g, &s), Err(Error::PartialStrategy(_))));
    }

    #[test]
    fn strategy_json_round_trip() {
        let g = two_choice();
        let s = MooreStrategy {
            memory: 2,
            initial: 1,
            next: BTreeMap::from([((0, 0), 0), ((1, 0), 1)]),
            update: BTreeMap::from([((0, 0), 1), ((1, 2), 0)]),
        };
        assert_eq!(MooreStrategy::from_json(&s.to_json(&g), &g).unwrap(), s);
    }
}
