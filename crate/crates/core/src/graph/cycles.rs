//! Strongly connected components, simple cycles, Eulerian cycle families and
//! Euler circuits. Cycles are edge-id sequences, so parallel edges give
//! distinct cycles.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::GameGraph;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scc {
    pub vertices: Vec<usize>,
    /// No edge leaves the component.
    pub terminal: bool,
    /// The component contains at least one edge (a cycle).
    pub nontrivial: bool,
}

pub fn reachable_from(g: &GameGraph, v: usize) -> Vec<bool> {
    let mut seen = vec![false; g.num_vertices()];
    let mut stack = vec![v];
    seen[v] = true;
    while let Some(u) = stack.pop() {
        for &e in g.out_edges(u) {
            let w = g.edge(e).to;
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order (sinks first); vertex lists are sorted.
pub fn scc_decompose(g: &GameGraph) -> Vec<Scc> {
    let n = g.num_vertices();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            let out = g.out_edges(v);
            if *i < out.len() {
                let w = g.edge(out[*i]).to;
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp_of[w] = comps.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
        .into_iter()
        .enumerate()
        .map(|(c, vertices)| {
            let mut terminal = true;
            let mut nontrivial = false;
            for &v in &vertices {
                for &e in g.out_edges(v) {
                    if comp_of[g.edge(e).to] == c {
                        nontrivial = true;
                    } else {
                        terminal = false;
                    }
                }
            }
            Scc { vertices, terminal, nontrivial }
        })
        .collect()
}

/// Components containing a vertex reachable from the initial vertex.
pub fn reachable_sccs(g: &GameGraph) -> Vec<Scc> {
    let seen = reachable_from(g, g.initial());
    scc_decompose(g).into_iter().filter(|s| seen[s.vertices[0]]).collect()
}

pub fn cycle_average(g: &GameGraph, cycle: &[usize]) -> Vec<Q> {
    let mut acc = vec![Q::zero(); g.k()];
    for &e in cycle {
        for (a, w) in acc.iter_mut().zip(&g.edge(e).weight) {
            *a += w;
        }
    }
    let len = Q::from_integer(cycle.len().into());
    acc.into_iter().map(|a| a / &len).collect()
}

/// Every simple cycle of `g`, each once, rotated to start at its smallest edge id.
pub fn simple_cycles(g: &GameGraph) -> Vec<Vec<usize>> {
    simple_cycles_within(g, &vec![true; g.num_edges()])
}

/// Simple cycles using only edges with `allowed[e]`.
pub fn simple_cycles_within(g: &GameGraph, allowed: &[bool]) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    // Vertex-level adjacency with the parallel edges grouped per target.
    let mut adj: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        if allowed[e] {
            adj[edge.from].entry(edge.to).or_default().push(e);
        }
    }
    let mut out = Vec::new();
    let mut johnson = Johnson { adj: &adj, blocked: vec![false; n], b: vec![BTreeSet::new(); n], stack: Vec::new() };
    for s in 0..n {
        johnson.blocked.iter_mut().for_each(|x| *x = false);
        johnson.b.iter_mut().for_each(BTreeSet::clear);
        let mut found = Vec::new();
        johnson.circuit(s, s, &mut found);
        for vc in found {
            expand(&adj, &vc, &mut out);
        }
    }
    out
}

struct Johnson<'a> {
    adj: &'a [BTreeMap<usize, Vec<usize>>],
    blocked: Vec<bool>,
    b: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
}

impl Johnson<'_> {
    fn circuit(&mut self, v: usize, s: usize, found: &mut Vec<Vec<usize>>) -> bool {
        let mut f = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let adj = self.adj;
        for &w in adj[v].keys().filter(|w| **w >= s) {
            if w == s {
                found.push(self.stack.clone());
                f = true;
            } else if !self.blocked[w] && self.circuit(w, s, found) {
                f = true;
            }
        }
        if f {
            self.unblock(v);
        } else {
            for &w in adj[v].keys().filter(|w| **w >= s) {
                self.b[w].insert(v);
            }
        }
        self.stack.pop();
        f
    }

    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        for w in std::mem::take(&mut self.b[u]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

/// All edge-level cycles over one vertex cycle (one per choice of parallel edges).
fn expand(adj: &[BTreeMap<usize, Vec<usize>>], vc: &[usize], out: &mut Vec<Vec<usize>>) {
    let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 0..vc.len() {
        let (a, b) = (vc[i], vc[(i + 1) % vc.len()]);
        let choices = &adj[a][&b];
        partial = partial
            .iter()
            .flat_map(|p| {
                choices.iter().map(move |e| {
                    let mut q = p.clone();
                    q.push(*e);
                    q
                })
            })
            .collect();
    }
    for mut c in partial {
        let m = (0..c.len()).min_by_key(|i| c[*i]).unwrap();
        c.rotate_left(m);
        out.push(c);
    }
}

/// A family of simple cycles that can all be traversed by one cyclic path:
/// the simple cycles contained in the edge set of that path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleMixtureBasis {
    pub edges: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    pub averages: Vec<Vec<Q>>,
}

/// Bases for the cyclic paths inside the component `scc`, one per possible
/// edge set of such a path: every connected union of simple cycles. Larger
/// edge sets come first, so the whole component leads.
pub fn eulerian_cycle_sets(g: &GameGraph, scc: &[usize]) -> Vec<CycleMixtureBasis> {
    let mut inside = vec![false; g.num_vertices()];
    scc.iter().for_each(|v| inside[*v] = true);
    let allowed: Vec<bool> = g.edges().iter().map(|e| inside[e.from] && inside[e.to]).collect();
    let cycles = simple_cycles_within(g, &allowed);
    let cycle_vertices: Vec<BTreeSet<usize>> =
        cycles.iter().map(|c| c.iter().map(|e| g.edge(*e).from).collect()).collect();

    // Grow unions one touching cycle at a time; each edge set is kept once.
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack: Vec<(Vec<usize>, BTreeSet<usize>)> = Vec::new();
    for (c, vs) in cycles.iter().zip(&cycle_vertices) {
        let mut edges = c.clone();
        edges.sort_unstable();
        if seen.insert(edges.clone()) {
            stack.push((edges, vs.clone()));
        }
    }
    while let Some((edges, verts)) = stack.pop() {
        for (c, vs) in cycles.iter().zip(&cycle_vertices) {
            if verts.is_disjoint(vs) || c.iter().all(|e| edges.binary_search(e).is_ok()) {
                continue;
            }
            let mut grown: Vec<usize> = edges.iter().chain(c).copied().collect();
            grown.sort_unstable();
            grown.dedup();
            if seen.insert(grown.clone()) {
                stack.push((grown, verts.union(vs).copied().collect()));
            }
        }
    }
    let mut sets: Vec<Vec<usize>> = seen.into_iter().collect();
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets.into_iter()
        .map(|edges| {
            let mut member = vec![false; g.num_edges()];
            edges.iter().for_each(|e| member[*e] = true);
            let basis: Vec<Vec<usize>> = cycles.iter().filter(|c| c.iter().all(|e| member[*e])).cloned().collect();
            let averages = basis.iter().map(|c| cycle_average(g, c)).collect();
            CycleMixtureBasis { edges, cycles: basis, averages }
        })
        .collect()
}

/// Euler circuit through the multigraph that takes edge `e` exactly
/// `multiplicity[e]` times, starting at `start`. `None` if no such circuit
/// exists (unbalanced degrees, disconnected support, or `start` off the support).
pub fn euler_circuit(g: &GameGraph, multiplicity: &BTreeMap<usize, usize>, start: usize) -> Option<Vec<usize>> {
    let n = g.num_vertices();
    let mut balance = vec![0i64; n];
    let mut remaining: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut total = 0;
    for (&e, &m) in multiplicity {
        if m == 0 {
            continue;
        }
        let edge = g.edge(e);
        balance[edge.from] += m as i64;
        balance[edge.to] -= m as i64;
        // Reverse order so popping yields the smallest edge id first.
        for _ in 0..m {
            remaining[edge.from].push(e);
        }
        total += m;
    }
    if total == 0 || balance.iter().any(|b| *b != 0) || remaining[start].is_empty() {
        return None;
    }
    remaining.iter_mut().for_each(|r| r.sort_unstable_by(|a, b| b.cmp(a)));
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut circuit = Vec::with_capacity(total);
    while let Some(&(v, via)) = stack.last() {
        if let Some(e) = remaining[v].pop() {
            stack.push((g.edge(e).to, Some(e)));
        } else {
            stack.pop();
            if let Some(e) = via {
                circuit.push(e);
            }
        }
    }
    if circuit.len() != total {
        return None;
    }
    circuit.reverse();
    Some(circuit)
}
