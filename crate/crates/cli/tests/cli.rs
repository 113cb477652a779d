use std::path::PathBuf;
use std::process::{Command, Output};

use mpgame::graph::{cycle_average, product, simple_cycles, GameGraph, MooreStrategy};
use mpgame::rational::{fmt_q, Q};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpgame"))
        .args(args)
        .env_remove("MPGAME_NODE_BUDGET")
        .env_remove("MPGAME_ENUM_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn temp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("mpgame-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).display().to_string()
}

#[test]
fn example_three_value_is_five() {
    let o = run(&["value", &data("example3.json"), "(max (li 1) (li 2))", "--eps", "1/100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("value ∈ [5, 5]\n"), "{out}");
    assert!(out.contains("mixing (1/2, 1/2)"), "{out}");

    let o = run(&["value", &data("example3.json"), "(max (li 1) (li 2))", "--format", "json"]);
    let v = json(&o);
    assert_eq!((v["lo"].as_str(), v["hi"].as_str()), (Some("5"), Some("5")));
    assert_eq!(v["lower_bound_verified"], true);
    assert_eq!(v["witness"][0]["mixing"], serde_json::json!(["1/2", "1/2"]));
}

#[test]
fn eval_matches_the_best_product_cycle() {
    let o = run(&["eval", &data("fig1.json"), &data("alt.strategy.json"), "(li 1)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // With one lim-inf atom, player 2 settles on the product cycle of largest average.
    let g = GameGraph::from_json(&std::fs::read_to_string(data("fig1.json")).unwrap()).unwrap();
    let sigma = MooreStrategy::from_json(&std::fs::read_to_string(data("alt.strategy.json")).unwrap(), &g).unwrap();
    let p = product(&g, &sigma).unwrap();
    let best = simple_cycles(&p.graph).iter().map(|c| cycle_average(&p.graph, c)[0].clone()).max().unwrap();
    assert_eq!(best, Q::new((-1).into(), 4.into()));
    assert_eq!(stdout(&o), format!("value = {}\n", fmt_q(&best)));
}

#[test]
fn zero_loop_decides_yes_at_zero() {
    let o = run(&["decide", &data("empty-weights.json"), "(li 1)", "--nu", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Yes"), "{}", stdout(&o));
}

#[test]
fn no_verdicts_carry_verified_certificates() {
    let o = run(&["decide", &data("example3.json"), "(max (li 1) (li 2))", "--nu", "49/10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "no");
    assert_eq!(v["lo"], "5");
    assert_eq!(v["certificate_verified"], true);

    let o = run(&["decide", &data("empty-weights.json"), "(li 1)", "--nu", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(certificate verified)"), "{}", stdout(&o));
}

#[test]
fn regions_cover_every_vertex() {
    let o = run(&["regions", &data("fig1.json"), "(li 1)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let rows = v["vertices"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // Player 1 loops v2 -> v1 -> v2 at average (-9 - 6) / 2 wherever it starts.
    assert!(rows.iter().all(|r| r["lo"] == "-15/2" && r["hi"] == "-15/2"), "{v}");

    let o = run(&["regions", &data("fig1.json"), "(li 1)", "--nu", "-8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(": No:")).count(), 4, "{}", stdout(&o));
}

#[test]
fn synthesized_strategy_evaluates_within_eps() {
    let out = temp("synth.json");
    let expr = "(min (li 1) (li 2))";
    let o = run(&["synth", &data("fig1.json"), expr, "--out", &out, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let e = run(&["eval", &data("fig1.json"), &out, expr, "--format", "json"]);
    assert_eq!(e.status.code(), Some(0), "{}", stderr(&e));
    assert_eq!(json(&e)["value"], v["value"]);
    let parse = |x: &serde_json::Value| mpgame::rational::parse_q(x.as_str().unwrap()).unwrap();
    assert!(parse(&v["value"]) <= parse(&v["interval"]["hi"]) + Q::new(1.into(), 100.into()));
}

#[test]
fn reduce_output_round_trips_through_the_loader() {
    let out = temp("game.json");
    let o = run(&["reduce", &data("fig8.constraints.json"), "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let g = GameGraph::from_json(&text).unwrap();
    assert_eq!(g.to_json(), text);
    assert_eq!(g.num_vertices(), 5);
    assert!(stdout(&o).contains("threshold: 0"));
}

#[test]
fn reduced_instance_is_decided_yes() {
    let game = temp("fig8.json");
    let o = run(&["reduce", &data("fig8.constraints.json"), "--out", &game, "--format", "json"]);
    let expr = json(&o)["expression"].as_str().unwrap().to_string();
    let d = run(&["decide", &game, &expr, "--nu", "0"]);
    assert_eq!(d.status.code(), Some(0), "{}", stderr(&d));
    assert!(stdout(&d).starts_with("Yes"), "{}", stdout(&d));
}

#[test]
fn unknown_and_budget_have_their_own_exit_codes() {
    let game = temp("unsat.json");
    let o = run(&["reduce", &data("unsat.constraints.json"), "--out", &game, "--format", "json"]);
    let expr = json(&o)["expression"].as_str().unwrap().to_string();

    let d = run(&["decide", &game, &expr, "--nu", "0", "--nodes", "5"]);
    assert_eq!(d.status.code(), Some(2), "{}{}", stdout(&d), stderr(&d));
    assert!(stdout(&d).starts_with("Unknown: value ∈ [0, "), "{}", stdout(&d));

    let v = run(&["value", &game, &expr, "--nodes", "3", "--format", "json"]);
    assert_eq!(v.status.code(), Some(3));
    let r = json(&v);
    assert_eq!(r["budget_exceeded"], "branch-and-bound nodes");
    assert_eq!(r["best"]["lo"], "0");
}

#[test]
fn budgets_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mpgame"))
        .args(["value", &data("example3.json"), "(li 1)"])
        .env("MPGAME_NODE_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("must be positive"), "{}", stderr(&o));
}

#[test]
fn input_errors_point_at_the_field() {
    let bad = temp("bad.json");
    std::fs::write(&bad, r#"{"k":1,"initial":"a","vertices":[{"id":"a","owner":1}],"edges":[{"from":"a","to":"a","weight":["x"]}]}"#).unwrap();
    let o = run(&["value", &bad, "(li 1)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("edges[0].weight"), "{}", stderr(&o));

    let o = run(&["value", &data("fig1.json"), "(li 4)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dimension 4"), "{}", stderr(&o));

    let o = run(&["value", &data("fig1.json"), "(li 1)", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["value", &data("missing.json"), "(li 1)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_reports_are_byte_identical() {
    let args = ["regions", &data("fig1.json"), "(max (li 1) (li 3))", "--format", "json", "--jobs", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let serial = run(&["regions", &data("fig1.json"), "(max (li 1) (li 3))", "--format", "json"]);
    assert_eq!(a.stdout, serial.stdout);
}

#[test]
fn both_finite_mode_treats_limsup_as_liminf() {
    let game = temp("p2loops.json");
    std::fs::write(
        &game,
        r#"{"k":2,"initial":"u","vertices":[{"id":"u","owner":2}],
            "edges":[{"from":"u","to":"u","weight":["9","1"]},{"from":"u","to":"u","weight":["1","9"]}]}"#,
    )
    .unwrap();
    // Alternating ever longer blocks keeps both lim-sups at 9; a finite-memory
    // player 2 ends up periodic and gets at most 5 in both dimensions.
    let p1 = run(&["value", &game, "(min (ls 1) (ls 2))"]);
    let both = run(&["value", &game, "(min (ls 1) (ls 2))", "--mode", "both-finite"]);
    assert_eq!(stdout(&p1).lines().next(), Some("value ∈ [9, 9]"), "{}", stderr(&p1));
    assert_eq!(stdout(&both).lines().next(), Some("value ∈ [5, 5]"), "{}", stderr(&both));
}
