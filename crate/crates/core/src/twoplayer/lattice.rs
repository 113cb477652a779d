//! Search for a threshold witness among mixtures with small denominators.

use num_traits::Zero;

use super::families::{factors, support_connected, Factor};
use super::{SolverConfig, Witness, WitnessFamily};
use crate::error::Result;
use crate::expr::NormalForm;
use crate::graph::GameGraph;
use crate::oneplayer::value_of_point_set;
use crate::rational::{frac, Q};

struct Candidate {
    option: usize,
    mixing: Vec<Q>,
    point: Vec<Q>,
}

/// Mixtures `a / d` with `d ≤ max_den` in lowest terms.
fn compositions(n: usize, max_den: u32) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for d in 1..=max_den {
        let mut parts = vec![0u32; n];
        fill(&mut parts, 0, d, &mut |p: &[u32]| {
            let mix: Vec<Q> = p.iter().map(|a| frac(*a as i64, d as i64)).collect();
            if seen.insert(mix.clone()) {
                out.push(mix);
            }
        });
    }
    out
}

fn fill(parts: &mut [u32], i: usize, left: u32, emit: &mut impl FnMut(&[u32])) {
    if i + 1 == parts.len() {
        parts[i] = left;
        emit(parts);
        return;
    }
    for a in 0..=left {
        parts[i] = a;
        fill(parts, i + 1, left - a, emit);
    }
}

/// Realizable candidates of one factor whose value alone is at most `nu`,
/// best first.
fn candidates(g: &GameGraph, nf: &NormalForm, f: &Factor, nu: &Q, cfg: &SolverConfig, spent: &mut usize) -> Vec<Candidate> {
    let mut out: Vec<(Q, Candidate)> = Vec::new();
    for (o, opt) in f.options.iter().enumerate() {
        for mixing in compositions(opt.cycles.len(), cfg.lattice_denominator) {
            if *spent >= cfg.lattice_budget {
                break;
            }
            if !support_connected(g, &opt.cycles, &mixing) {
                continue;
            }
            let mut point = vec![Q::zero(); g.k()];
            for (a, x) in opt.averages.iter().zip(&mixing) {
                for (p, c) in point.iter_mut().zip(a) {
                    *p += x * c;
                }
            }
            *spent += 1;
            let v = value_of_point_set(std::slice::from_ref(&point), nf);
            if v <= *nu {
                out.push((v, Candidate { option: o, mixing, point }));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, c)| c).collect()
}

/// A witness tuple of value at most `nu` built from small-denominator
/// mixtures, if one is found within the configured budget.
pub fn lattice_witness(g: &GameGraph, nf: &NormalForm, nu: &Q, cfg: &SolverConfig) -> Result<Option<Witness>> {
    let fs = factors(g, nf, cfg.enumeration_budget)?;
    let mut spent = 0usize;
    let mut lists = Vec::new();
    for f in &fs {
        let c = candidates(g, nf, f, nu, cfg, &mut spent);
        if c.is_empty() {
            return Ok(None);
        }
        lists.push(c);
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        if spent >= cfg.lattice_budget {
            return Ok(None);
        }
        let points: Vec<Vec<Q>> = idx.iter().zip(&lists).map(|(i, l)| l[*i].point.clone()).collect();
        spent += 1;
        if value_of_point_set(&points, nf) <= *nu {
            let families = idx
                .iter()
                .zip(&lists)
                .enumerate()
                .map(|(fi, (i, l))| {
                    let c = &l[*i];
                    WitnessFamily {
                        factor: fi,
                        option: c.option,
                        cycles: fs[fi].options[c.option].cycles.clone(),
                        mixing: c.mixing.clone(),
                        point: c.point.clone(),
                    }
                })
                .collect();
            return Ok(Some(Witness { families }));
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
