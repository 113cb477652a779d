//! Winning and value regions by repeated player-1 attractor removal.

use std::collections::BTreeMap;

use super::{bracket, inf_value, lattice_witness, SolverConfig, ValueInterval, Verdict, Witness};
use crate::error::{Error, Result};
use crate::expr::NormalForm;
use crate::geometry::Polytope;
use crate::graph::{attractor, GameGraph, MemorylessStrategy, MooreStrategy, Owner};
use crate::oneplayer::value_of_point_set;
use crate::rational::Q;
use crate::realizability::realizing_strategy;

/// One removed attractor: `anchor` was found winning in the subgame on
/// `scope`, and player 1 can force every vertex of `vertices` to it there.
#[derive(Debug, Clone)]
pub struct Region {
    pub anchor: usize,
    pub vertices: Vec<usize>,
    pub scope: Vec<bool>,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct WinningRegion {
    pub verdicts: Vec<Verdict>,
    /// Vertex set of the subgame each verdict was computed in.
    pub scopes: Vec<Vec<bool>>,
    pub regions: Vec<Region>,
}

#[derive(Debug, Clone)]
pub struct RegionReport {
    pub intervals: Vec<ValueInterval>,
    /// Anchor and vertices of every attractor, in removal order.
    pub order: Vec<(usize, Vec<usize>)>,
}

/// Runs `f` on every item, on up to `jobs` threads; results keep item order.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

enum Probe {
    Win(Witness),
    Lose(ValueInterval),
    Open(ValueInterval),
}

fn probe(h: &GameGraph, v: usize, nf: &NormalForm, nu: &Q, eps: &Q, cfg: &SolverConfig) -> Result<Probe> {
    let hv = h.with_initial(v);
    // Small-denominator witnesses settle most winning vertices cheaply.
    if let Some(w) = lattice_witness(&hv, nf, nu, cfg)? {
        return Ok(Probe::Win(w));
    }
    let iv = match bracket(&hv, nf, eps, Some(nu), cfg) {
        Ok(iv) => iv,
        Err(Error::Budget { best: Some(best), .. }) => {
            let mut iv = *best;
            iv.trace.push("interval search stopped by its budget".into());
            iv
        }
        Err(e) => return Err(e),
    };
    if iv.hi <= *nu {
        if let Some(w) = iv.witness.clone() {
            return Ok(Probe::Win(w));
        }
    }
    Ok(if iv.lo > *nu { Probe::Lose(iv) } else { Probe::Open(iv) })
}

/// Player-1 winning region for "value at most `nu`" against finite-memory
/// play, with one assembled strategy per winning vertex.
pub fn winning_region(g: &GameGraph, nf: &NormalForm, nu: &Q, eps: &Q, cfg: &SolverConfig) -> Result<WinningRegion> {
    let n = g.num_vertices();
    let mut remaining = vec![true; n];
    let mut regions: Vec<Region> = Vec::new();
    let mut pending: Vec<Option<(Verdict, Vec<bool>)>> = vec![None; n];
    while remaining.iter().any(|r| *r) {
        let (h, old) = g.induced(&remaining)?;
        let local: Vec<usize> = (0..h.num_vertices()).collect();
        // Vertices are probed in id order; the first win ends the round.
        let mut found = None;
        let mut outcomes: Vec<(usize, Probe)> = Vec::new();
        for batch in local.chunks(cfg.jobs.max(1)) {
            let res = par_map(batch, cfg.jobs, |v| probe(&h, *v, nf, nu, eps, cfg));
            for (v, r) in batch.iter().zip(res) {
                let r = r?;
                if found.is_none() {
                    if let Probe::Win(w) = &r {
                        found = Some((*v, w.clone()));
                    }
                }
                outcomes.push((*v, r));
            }
            if found.is_some() {
                break;
            }
        }
        let Some((v, witness)) = found else {
            for (lv, r) in outcomes {
                let verdict = match r {
                    Probe::Lose(iv) => Verdict::No { lo: iv.lo, certificate: iv.certificate },
                    Probe::Open(iv) => Verdict::Unknown(iv),
                    Probe::Win(_) => unreachable!("no win in this round"),
                };
                pending[old[lv]] = Some((verdict, remaining.clone()));
            }
            break;
        };
        let mut target = vec![false; h.num_vertices()];
        target[v] = true;
        let (attr, _) = attractor(&h, Owner::P1, &target);
        let vertices: Vec<usize> = (0..h.num_vertices()).filter(|u| attr[*u]).map(|u| old[u]).collect();
        regions.push(Region { anchor: old[v], vertices: vertices.clone(), scope: remaining.clone(), witness: Some(witness) });
        vertices.iter().for_each(|u| remaining[*u] = false);
    }
    let assembled = assemble(g, nf, &regions)?;
    let mut verdicts = Vec::with_capacity(n);
    let mut scopes = Vec::with_capacity(n);
    for (u, p) in pending.into_iter().enumerate() {
        if let Some((verdict, scope)) = p {
            verdicts.push(verdict);
            scopes.push(scope);
            continue;
        }
        let (j, region) = regions.iter().enumerate().find(|(_, r)| r.vertices.contains(&u)).expect("vertex is in a region");
        let (sigma, hi) = &assembled[j];
        let m0 = if u == region.anchor { sigma.follow_start } else { sigma.attract };
        verdicts.push(Verdict::Yes {
            hi: hi.clone(),
            witness: region.witness.clone(),
            strategy: Some(sigma.strategy.with_initial(m0)),
        });
        scopes.push(region.scope.clone());
    }
    Ok(WinningRegion { verdicts, scopes, regions })
}

struct Modes {
    strategy: MooreStrategy,
    attract: usize,
    follow_start: usize,
}

/// One strategy for all regions. Memory is a mode: `Attract(j)` plays the
/// attractor strategy of region `j`, `Follow(j, m)` plays region `j`'s own
/// strategy in memory `m`. Player 2 can only leave a subgame into regions
/// removed earlier, and entering a region restarts it. Returns, per region,
/// the strategy with that region's entry modes and the largest witness value
/// among that region and the earlier ones.
fn assemble(g: &GameGraph, nf: &NormalForm, regions: &[Region]) -> Result<Vec<(Modes, Q)>> {
    let n = g.num_vertices();
    let mut region_of = vec![usize::MAX; n];
    for (j, r) in regions.iter().enumerate() {
        r.vertices.iter().for_each(|u| region_of[*u] = j);
    }
    struct Part {
        local_of: Vec<usize>,
        local_edge: Vec<usize>,
        global_edge: Vec<usize>,
        attract: MemorylessStrategy,
        sigma: MooreStrategy,
        base: usize,
    }
    let mut parts: Vec<Part> = Vec::new();
    let mut his = Vec::new();
    let mut total = 0;
    for r in regions {
        let (h, old) = g.induced(&r.scope)?;
        let mut local_of = vec![usize::MAX; n];
        old.iter().enumerate().for_each(|(i, o)| local_of[*o] = i);
        let global_edge: Vec<usize> =
            (0..g.num_edges()).filter(|e| r.scope[g.edge(*e).from] && r.scope[g.edge(*e).to]).collect();
        let mut local_edge = vec![usize::MAX; g.num_edges()];
        global_edge.iter().enumerate().for_each(|(l, e)| local_edge[*e] = l);
        let mut target = vec![false; h.num_vertices()];
        target[local_of[r.anchor]] = true;
        let (_, attract) = attractor(&h, Owner::P1, &target);
        let w = r.witness.as_ref().expect("region has a witness");
        let points = w.points();
        let sigma = realizing_strategy(&h.with_initial(local_of[r.anchor]), &Polytope::new(points.clone())?)?;
        // Player 2 may escape into earlier regions, so bounds accumulate.
        let own = value_of_point_set(&points, nf);
        his.push(match his.last() {
            Some(prev) if *prev > own => Q::clone(prev),
            _ => own,
        });
        let base = total;
        total += 1 + sigma.memory;
        parts.push(Part { local_of, local_edge, global_edge, attract, sigma, base });
    }
    let entry = |t: usize| -> usize {
        let r = region_of[t];
        let p = &parts[r];
        if t == regions[r].anchor {
            p.base + 1 + p.sigma.initial
        } else {
            p.base
        }
    };
    let mut next = BTreeMap::new();
    let mut update = BTreeMap::new();
    for (j, (r, p)) in regions.iter().zip(&parts).enumerate() {
        for &u in &r.vertices {
            if g.owner(u) == Owner::P1 {
                if let Some(le) = p.attract.choice.get(&p.local_of[u]) {
                    next.insert((p.base, u), p.global_edge[*le]);
                }
            }
            for &e in g.out_edges(u) {
                let t = g.edge(e).to;
                if region_of[t] != usize::MAX {
                    update.insert((p.base, e), entry(t));
                }
            }
        }
        for m in 0..p.sigma.memory {
            let mode = p.base + 1 + m;
            for u in (0..n).filter(|u| r.scope[*u]) {
                if g.owner(u) == Owner::P1 {
                    if let Some(le) = p.sigma.next.get(&(m, p.local_of[u])) {
                        next.insert((mode, u), p.global_edge[*le]);
                    }
                }
                for &e in g.out_edges(u) {
                    let t = g.edge(e).to;
                    let to = if r.scope[t] {
                        p.base + 1 + p.sigma.step(m, p.local_edge[e])
                    } else if region_of[t] != usize::MAX && region_of[t] < j {
                        entry(t)
                    } else {
                        continue;
                    };
                    update.insert((mode, e), to);
                }
            }
        }
    }
    let strategy = MooreStrategy { memory: total.max(1), initial: 0, next, update };
    Ok(parts
        .iter()
        .zip(his)
        .map(|(p, hi)| {
            (Modes { strategy: strategy.clone(), attract: p.base, follow_start: p.base + 1 + p.sigma.initial }, hi)
        })
        .collect())
}

/// Interval per vertex: the vertex of least upper bound and its attractor
/// are settled first, and every later interval is raised to the earlier one.
pub fn value_region(g: &GameGraph, nf: &NormalForm, eps: &Q, cfg: &SolverConfig) -> Result<RegionReport> {
    let n = g.num_vertices();
    let mut remaining = vec![true; n];
    let mut out: Vec<Option<ValueInterval>> = vec![None; n];
    let mut order = Vec::new();
    let mut floor: Option<(Q, Q)> = None;
    while remaining.iter().any(|r| *r) {
        let (h, old) = g.induced(&remaining)?;
        let local: Vec<usize> = (0..h.num_vertices()).collect();
        let res = par_map(&local, cfg.jobs, |v| inf_value(&h.with_initial(*v), nf, eps, cfg));
        let mut ivs = Vec::with_capacity(res.len());
        for r in res {
            let mut iv = r?;
            if let Some((flo, fhi)) = &floor {
                if iv.lo < *flo {
                    iv.lo = flo.clone();
                }
                if iv.hi < *fhi {
                    iv.hi = fhi.clone();
                }
            }
            ivs.push(iv);
        }
        let u = (0..ivs.len())
            .min_by(|a, b| (&ivs[*a].hi, &ivs[*a].lo, *a).cmp(&(&ivs[*b].hi, &ivs[*b].lo, *b)))
            .expect("subgame is nonempty");
        let lo = ivs.iter().map(|iv| iv.lo.clone()).min().expect("subgame is nonempty");
        let mut target = vec![false; h.num_vertices()];
        target[u] = true;
        let (attr, _) = attractor(&h, Owner::P1, &target);
        let mut assigned = ivs[u].clone();
        assigned.lo = lo;
        assigned.trace.push(format!("assigned from anchor {}", g.name(old[u])));
        let vertices: Vec<usize> = (0..h.num_vertices()).filter(|x| attr[*x]).map(|x| old[x]).collect();
        for x in &vertices {
            out[*x] = Some(assigned.clone());
            remaining[*x] = false;
        }
        floor = Some((assigned.lo.clone(), assigned.hi.clone()));
        order.push((old[u], vertices));
    }
    Ok(RegionReport { intervals: out.into_iter().map(|iv| iv.expect("every vertex assigned")).collect(), order })
}
