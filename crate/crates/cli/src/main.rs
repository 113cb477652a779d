mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mpgame::error::Error;
use mpgame::expr::{Expression, NormalForm};
use mpgame::graph::{GameGraph, MooreStrategy};
use mpgame::rational::{fmt_q, parse_q, Q};
use mpgame::reduction::{constraints_to_game, ConstraintSystem5};
use mpgame::twoplayer::{
    epsilon_optimal_strategy, eval_strategy, inf_value, value_region, verify_lower_bound, winning_region, SolverConfig,
    ValueInterval, Verdict, WinningRegion,
};

#[derive(Parser)]
#[command(name = "mpgame", version, about = "Mean-payoff expression games with finite-memory player 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Target width of value intervals.
    #[arg(long, global = true, default_value = "1/100", value_parser = positive_rational)]
    eps: Q,

    /// Whose memory is bounded.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::P1Finite)]
    mode: ModeArg,

    /// Branch-and-bound nodes per interval computation.
    #[arg(long, global = true, env = "MPGAME_NODE_BUDGET", default_value_t = 20_000, value_parser = positive)]
    nodes: usize,

    /// Player-2 strategies and enumerated player-1 strategies.
    #[arg(long, global = true, env = "MPGAME_ENUM_BUDGET", default_value_t = 100_000, value_parser = positive)]
    enum_budget: usize,

    /// Worker threads for per-vertex computations.
    #[arg(long, global = true, default_value_t = 1, value_parser = positive)]
    jobs: usize,

    /// Where to write the produced strategy or game.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket the least value player 1 can guarantee from the initial vertex.
    Value { game: PathBuf, expr: String },
    /// Whether player 1 can keep the value at or below a threshold.
    Decide {
        game: PathBuf,
        expr: String,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        nu: Q,
    },
    /// Per-vertex intervals, or per-vertex verdicts when a threshold is given.
    Regions {
        game: PathBuf,
        expr: String,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        nu: Option<Q>,
    },
    /// Synthesize an ε-optimal finite-memory strategy.
    Synth { game: PathBuf, expr: String },
    /// Exact value of a strategy against the best player-2 response.
    Eval { game: PathBuf, strategy: PathBuf, expr: String },
    /// Build the game of a constraint system.
    Reduce { constraints: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    P1Finite,
    BothFinite,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn rational(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

fn positive_rational(s: &str) -> Result<Q, String> {
    let v = rational(s)?;
    if v <= Q::from_integer(0.into()) {
        return Err("must be positive".into());
    }
    Ok(v)
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Exit statuses.
const DEFINITE: u8 = 0;
const INPUT: u8 = 1;
const UNKNOWN: u8 = 2;
const BUDGET: u8 = 3;

struct Outcome {
    json: Value,
    text: Vec<String>,
    status: u8,
}

enum Failure {
    Input(String),
    Budget { what: String, best: Option<Value> },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { what, .. } => Failure::Budget { what, best: None },
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<GameGraph, Failure> {
    GameGraph::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

struct Ctx {
    cfg: SolverConfig,
    eps: Q,
    out: Option<PathBuf>,
}

impl Ctx {
    fn problem(&self, game: &Path, expr: &str) -> Result<(GameGraph, NormalForm), Failure> {
        let g = load_game(game)?;
        let e = Expression::parse(expr).map_err(|e| Failure::Input(format!("expression: {e}")))?;
        let nf = self.cfg.normal_form(&e, g.k()).map_err(|e| Failure::Input(format!("expression: {e}")))?;
        Ok((g, nf))
    }

    /// Budget failures keep the best interval found so far.
    fn budget(&self, g: &GameGraph, e: Error) -> Failure {
        match e {
            Error::Budget { what, best } => Failure::Budget { what, best: best.map(|iv| report::interval(g, &iv, None)) },
            other => other.into(),
        }
    }

    fn lower_bound_verified(&self, g: &GameGraph, nf: &NormalForm, iv: &ValueInterval) -> bool {
        verify_lower_bound(g, nf, &iv.certificate, self.cfg.enumeration_budget).is_some_and(|b| b >= iv.lo)
    }

    /// Checks the No verdict at `v` in the subgame it was computed in.
    fn no_verified(&self, g: &GameGraph, nf: &NormalForm, region: &WinningRegion, v: usize) -> Option<bool> {
        let Verdict::No { lo, certificate } = &region.verdicts[v] else { return None };
        let (h, old) = g.induced(&region.scopes[v]).ok()?;
        let local = old.iter().position(|o| *o == v)?;
        let got = verify_lower_bound(&h.with_initial(local), nf, certificate, self.cfg.enumeration_budget);
        Some(got.is_some_and(|b| b >= *lo))
    }

    fn value(&self, game: &Path, expr: &str) -> Result<Outcome, Failure> {
        let (g, nf) = self.problem(game, expr)?;
        let iv = inf_value(&g, &nf, &self.eps, &self.cfg).map_err(|e| self.budget(&g, e))?;
        let verified = self.lower_bound_verified(&g, &nf, &iv);
        let mut text = vec![format!("value ∈ [{}, {}]", fmt_q(&iv.lo), fmt_q(&iv.hi))];
        if let Some(w) = &iv.witness {
            report::witness_lines(&g, w, &mut text);
        }
        if !verified {
            text.push("  lower bound certificate FAILED verification".into());
        }
        Ok(Outcome { json: report::interval(&g, &iv, Some(verified)), text, status: DEFINITE })
    }

    fn decide(&self, game: &Path, expr: &str, nu: &Q) -> Result<Outcome, Failure> {
        let (g, nf) = self.problem(game, expr)?;
        let region = winning_region(&g, &nf, nu, &self.eps, &self.cfg).map_err(|e| self.budget(&g, e))?;
        let v = g.initial();
        let verdict = &region.verdicts[v];
        let verified = self.no_verified(&g, &nf, &region, v);
        let mut json = report::verdict(&g, verdict, verified);
        json["nu"] = json!(fmt_q(nu));
        let mut text = vec![report::verdict_line(verdict, nu, verified)];
        if let Verdict::Yes { witness: Some(w), strategy, .. } = verdict {
            report::witness_lines(&g, w, &mut text);
            if let (Some(path), Some(sigma)) = (&self.out, strategy) {
                write(path, &sigma.to_json(&g))?;
                text.push(format!("strategy written to {}", path.display()));
            }
        }
        let status = if matches!(verdict, Verdict::Unknown(_)) { UNKNOWN } else { DEFINITE };
        Ok(Outcome { json, text, status })
    }

    fn regions(&self, game: &Path, expr: &str, nu: Option<&Q>) -> Result<Outcome, Failure> {
        let (g, nf) = self.problem(game, expr)?;
        let mut rows = Vec::new();
        let mut text = Vec::new();
        let mut status = DEFINITE;
        match nu {
            Some(nu) => {
                let region = winning_region(&g, &nf, nu, &self.eps, &self.cfg).map_err(|e| self.budget(&g, e))?;
                for (v, verdict) in region.verdicts.iter().enumerate() {
                    let verified = self.no_verified(&g, &nf, &region, v);
                    let mut row = report::verdict(&g, verdict, verified);
                    row["vertex"] = json!(g.name(v));
                    rows.push(row);
                    text.push(format!("{}: {}", g.name(v), report::verdict_line(verdict, nu, verified)));
                    if matches!(verdict, Verdict::Unknown(_)) {
                        status = UNKNOWN;
                    }
                }
            }
            None => {
                let rep = value_region(&g, &nf, &self.eps, &self.cfg).map_err(|e| self.budget(&g, e))?;
                for (v, iv) in rep.intervals.iter().enumerate() {
                    let mut row = report::interval(&g, iv, None);
                    row["vertex"] = json!(g.name(v));
                    rows.push(row);
                    text.push(format!("{}: value ∈ [{}, {}]", g.name(v), fmt_q(&iv.lo), fmt_q(&iv.hi)));
                }
            }
        }
        Ok(Outcome { json: json!({ "vertices": rows }), text, status })
    }

    fn synth(&self, game: &Path, expr: &str) -> Result<Outcome, Failure> {
        let (g, nf) = self.problem(game, expr)?;
        let s = epsilon_optimal_strategy(&g, &nf, &self.eps, &self.cfg).map_err(|e| self.budget(&g, e))?;
        let strategy = s.strategy.to_json(&g);
        let mut text = vec![
            format!("strategy value {} with {} memory states", fmt_q(&s.value), s.strategy.memory),
            format!("infimum ∈ [{}, {}]", fmt_q(&s.interval.lo), fmt_q(&s.interval.hi)),
        ];
        let mut json = json!({
            "value": fmt_q(&s.value),
            "memory": s.strategy.memory,
            "enumerated": s.enumerated,
            "interval": report::interval(&g, &s.interval, None),
        });
        match &self.out {
            Some(path) => {
                write(path, &strategy)?;
                text.push(format!("strategy written to {}", path.display()));
            }
            None => {
                json["strategy"] = serde_json::from_str(&strategy).expect("strategy json");
                text.push(strategy);
            }
        }
        Ok(Outcome { json, text, status: DEFINITE })
    }

    fn eval(&self, game: &Path, strategy: &Path, expr: &str) -> Result<Outcome, Failure> {
        let (g, nf) = self.problem(game, expr)?;
        let sigma = MooreStrategy::from_json(&read(strategy)?, &g)
            .map_err(|e| Failure::Input(format!("{}: {e}", strategy.display())))?;
        let v = eval_strategy(&g, &sigma, &nf).map_err(|e| self.budget(&g, e))?;
        Ok(Outcome { json: json!({ "value": fmt_q(&v) }), text: vec![format!("value = {}", fmt_q(&v))], status: DEFINITE })
    }

    fn reduce(&self, constraints: &Path) -> Result<Outcome, Failure> {
        let sys = ConstraintSystem5::from_json(&read(constraints)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", constraints.display())))?;
        let game = constraints_to_game(&sys)?;
        let graph = game.graph.to_json();
        let mut json = json!({
            "expression": game.expression.to_string(),
            "nu": fmt_q(&game.nu),
            "vertices": game.graph.num_vertices(),
            "dimensions": game.graph.k(),
        });
        let mut text = vec![
            format!("expression: {}", game.expression),
            format!("threshold: {}", fmt_q(&game.nu)),
        ];
        match &self.out {
            Some(path) => {
                write(path, &graph)?;
                text.push(format!("game written to {}", path.display()));
            }
            None => {
                json["game"] = serde_json::from_str(&graph).expect("graph json");
                text.push(graph);
            }
        }
        Ok(Outcome { json, text, status: DEFINITE })
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors; clap's own status 2 means Unknown here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { DEFINITE });
        }
    };
    let mut cfg = SolverConfig { node_budget: cli.nodes, enumeration_budget: cli.enum_budget, jobs: cli.jobs, ..Default::default() };
    cfg.set_mode(matches!(cli.mode, ModeArg::BothFinite));
    let ctx = Ctx { cfg, eps: cli.eps, out: cli.out };
    let result = match &cli.command {
        Command::Value { game, expr } => ctx.value(game, expr),
        Command::Decide { game, expr, nu } => ctx.decide(game, expr, nu),
        Command::Regions { game, expr, nu } => ctx.regions(game, expr, nu.as_ref()),
        Command::Synth { game, expr } => ctx.synth(game, expr),
        Command::Eval { game, strategy, expr } => ctx.eval(game, strategy, expr),
        Command::Reduce { constraints } => ctx.reduce(constraints),
    };
    let (outcome, status) = match result {
        Ok(o) => {
            let s = o.status;
            (o, s)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(INPUT);
        }
        Err(Failure::Budget { what, best }) => {
            eprintln!("budget exceeded: {what}");
            let mut text = vec![format!("budget exceeded: {what}")];
            if let Some(b) = &best {
                text.push(format!("best interval [{}, {}]", b["lo"].as_str().unwrap_or("?"), b["hi"].as_str().unwrap_or("?")));
            }
            (Outcome { json: json!({ "budget_exceeded": what, "best": best }), text, status: BUDGET }, BUDGET)
        }
    };
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let mut stdout = io::stdout().lock();
    let _ = match cli.format {
        Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&outcome.json).expect("report serializes")),
        Format::Text => outcome.text.iter().try_for_each(|l| writeln!(stdout, "{l}")),
    };
    ExitCode::from(status)
}
