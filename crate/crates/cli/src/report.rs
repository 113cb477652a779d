//! Reports: a JSON value for `--format json` and lines for `--format text`.
//! Every rational is printed as `p/q`.

use serde_json::{json, Value};

use mpgame::graph::GameGraph;
use mpgame::rational::{fmt_q, Q};
use mpgame::twoplayer::{ValueInterval, Verdict, Witness};

pub fn qs(v: &[Q]) -> Value {
    v.iter().map(fmt_q).collect()
}

pub fn tuple(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

pub fn witness(g: &GameGraph, w: &Witness) -> Value {
    w.families
        .iter()
        .map(|f| {
            json!({
                "factor": f.factor,
                "option": f.option,
                "cycles": f.cycles.iter().map(|c| cycle_names(g, c)).collect::<Vec<_>>(),
                "mixing": qs(&f.mixing),
                "point": qs(&f.point),
            })
        })
        .collect()
}

/// A cycle as its vertex names, e.g. `v0 -> v1 -> v0`.
fn cycle_names(g: &GameGraph, cycle: &[usize]) -> String {
    let mut names: Vec<&str> = cycle.iter().map(|e| g.name(g.edge(*e).from)).collect();
    if let Some(e) = cycle.last() {
        names.push(g.name(g.edge(*e).to));
    }
    names.join(" -> ")
}

pub fn witness_lines(g: &GameGraph, w: &Witness, out: &mut Vec<String>) {
    for f in &w.families {
        let cycles: Vec<String> = f.cycles.iter().map(|c| format!("[{}]", cycle_names(g, c))).collect();
        out.push(format!(
            "  witness {}: mixing {} of {} at {}",
            f.factor,
            tuple(&f.mixing),
            cycles.join(" "),
            tuple(&f.point)
        ));
    }
}

pub fn interval(g: &GameGraph, iv: &ValueInterval, verified: Option<bool>) -> Value {
    let mut v = json!({
        "lo": fmt_q(&iv.lo),
        "hi": fmt_q(&iv.hi),
        "witness": iv.witness.as_ref().map(|w| witness(g, w)),
        "trace": iv.trace,
    });
    if let Some(ok) = verified {
        v["lower_bound_verified"] = json!(ok);
    }
    v
}

pub fn verdict(g: &GameGraph, v: &Verdict, verified: Option<bool>) -> Value {
    match v {
        Verdict::Yes { hi, witness: w, .. } => json!({
            "verdict": "yes",
            "hi": fmt_q(hi),
            "witness": w.as_ref().map(|w| witness(g, w)),
        }),
        Verdict::No { lo, .. } => json!({
            "verdict": "no",
            "lo": fmt_q(lo),
            "certificate_verified": verified,
        }),
        Verdict::Unknown(iv) => {
            let mut v = interval(g, iv, None);
            v["verdict"] = json!("unknown");
            v
        }
    }
}

pub fn verdict_line(v: &Verdict, nu: &Q, verified: Option<bool>) -> String {
    match v {
        Verdict::Yes { hi, .. } => format!("Yes: value ≤ {} ≤ {}", fmt_q(hi), fmt_q(nu)),
        Verdict::No { lo, .. } => {
            let check = match verified {
                Some(true) => " (certificate verified)",
                Some(false) => " (certificate FAILED verification)",
                None => "",
            };
            format!("No: value ≥ {} > {}{check}", fmt_q(lo), fmt_q(nu))
        }
        Verdict::Unknown(iv) => format!("Unknown: value ∈ [{}, {}]", fmt_q(&iv.lo), fmt_q(&iv.hi)),
    }
}
