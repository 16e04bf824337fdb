//! `effgame`: command-line front end for the model checker.
//!
//! Exit codes: 0 decided, 1 some result undecided at the star depth, 2 input
//! or parse error, 3 unsupported fragment, 4 internal invariant violation or
//! oracle mismatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use effgame::deduction::{kripke_generated, StateVerdict};
use effgame::equivalence::{
    congruence_check, enumerate, factor_model, logical_equiv, refine, theory_classes, EnumerationConfig,
    EquivVerdict, Side,
};
use effgame::model_io::{
    dist_json, ext_kernel_json, kernel_json, load_model, model_json, profile_json, state_set_json,
};
use effgame::oracle::{choice_report, kernel_sum_report, parse_interval_set, portfolio_report, star_report};
use effgame::semantics::{kripke_fast_formula, pdl_kernel, Evaluator, GameModel};
use effgame::space::{StateSet, StateSpace};
use effgame::syntax::{normalize, parse_formula, parse_game};
use effgame::Error;

#[derive(Parser)]
#[command(name = "effgame", version, about = "Exact model checking for probabilistic game logic")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Maximum number of unfolded terms per iteration.
    #[arg(long, global = true, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    star_depth: u64,
    /// Modal depth of formula enumeration.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Threshold denominator for enumeration and oracle grids.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    grid: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also run the brute-force reference and fail on disagreement.
    #[arg(long, global = true)]
    oracle: bool,
}

impl RunConfig {
    fn star_depth(&self) -> usize {
        self.star_depth as usize
    }

    fn enumeration(&self) -> EnumerationConfig {
        EnumerationConfig {
            depth: self.depth,
            grid: self.grid.unwrap_or(8),
            star_depth: self.star_depth(),
            ..EnumerationConfig::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Validity set of a formula.
    Check { model: PathBuf, formula: String },
    /// Per-state threshold profile of a game towards a target set.
    Profile {
        model: PathBuf,
        game: String,
        /// Comma-separated state names; empty for the empty set.
        #[arg(long, default_value = "")]
        target: String,
    },
    /// Decides whether a primitive game is Kripke-generated.
    KripkeCheck { model: PathBuf, game: String },
    /// Logical partition, its congruence check and the factor model.
    Quotient { model: PathBuf },
    /// Logical equivalence of two models with a witness.
    Equiv { first: PathBuf, second: PathBuf },
    /// Head normal form applied throughout a game term.
    Normalize { game: String },
    /// Brute-force reference computations next to the fast path.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Angelic choice of two interval sets against its definition.
    Choice { first: String, second: String },
    /// Iteration over a finite stream of interval sets against its
    /// definition.
    Star {
        #[arg(required = true)]
        terms: Vec<String>,
    },
    /// Truncated power sums of a program kernel against its closure.
    KernelSums { model: PathBuf, game: String },
    /// Every basis portfolio of a primitive game by generator containment.
    Portfolio { model: PathBuf, game: String },
}

/// What a command produced and how the process should exit.
struct Outcome {
    json: Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn new(json: Value, text: String) -> Self {
        Self { json, text, code: 0 }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Undecided(_) => 1,
        Error::Unsupported(_) => 3,
        Error::Invariant(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.config.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Text => print!("{}", out.text),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> effgame::Result<Outcome> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Check { model, formula } => check(&load_model(model)?, formula, cfg),
        Command::Profile { model, game, target } => profile(&load_model(model)?, game, target, cfg),
        Command::KripkeCheck { model, game } => kripke_check(&load_model(model)?, game),
        Command::Quotient { model } => quotient(&load_model(model)?, cfg),
        Command::Equiv { first, second } => equiv(&load_model(first)?, &load_model(second)?, cfg),
        Command::Normalize { game } => {
            let g = normalize(&parse_game(game)?);
            Ok(Outcome::new(json!({ "normal_form": g.to_string() }), format!("{g}\n")))
        }
        Command::Oracle(cmd) => oracle(cmd, cfg),
    }
}

fn names(space: &StateSpace, set: &StateSet) -> String {
    space.set_names(set).join(", ")
}

fn check(model: &GameModel, text: &str, cfg: &RunConfig) -> effgame::Result<Outcome> {
    let phi = parse_formula(text)?;
    let mut ev = Evaluator::with_star_depth(model, cfg.star_depth());
    let v = ev.formula(&phi)?;
    let space = model.space();
    let fails = v.upper().complement();
    let mut obj = Map::new();
    obj.insert("formula".into(), json!(phi.to_string()));
    obj.insert("holds".into(), state_set_json(space, &v.holds));
    obj.insert("fails".into(), state_set_json(space, &fails));
    obj.insert("undecided".into(), state_set_json(space, &v.undecided));
    obj.insert("star_depth".into(), json!(cfg.star_depth()));
    let mut text = format!("holds: {}\nfails: {}\n", names(space, &v.holds), names(space, &fails));
    if !v.is_decided() {
        text += &format!("undecided at star depth {}: {}\n", cfg.star_depth(), names(space, &v.undecided));
    }
    let mut code = if v.is_decided() { 0 } else { 1 };
    if cfg.oracle {
        let fast = kripke_fast_formula(model, &phi)?;
        let matches = v.holds.is_subset(&fast) && fast.is_subset(&v.upper());
        obj.insert("fast_path".into(), state_set_json(space, &fast));
        obj.insert("match".into(), json!(matches));
        text += &format!("fast path: {}\nmatch: {matches}\n", names(space, &fast));
        if !matches {
            code = 4;
        }
    }
    Ok(Outcome::new(Value::Object(obj), text).with_code(code))
}

fn profile(model: &GameModel, game: &str, target: &str, cfg: &RunConfig) -> effgame::Result<Outcome> {
    let g = parse_game(game)?;
    let space = model.space();
    let target = space.set_from_names(target.split(',').map(str::trim).filter(|s| !s.is_empty()))?;
    let p = Evaluator::with_star_depth(model, cfg.star_depth()).game(&g, &target)?;
    let mut text = String::new();
    for s in 0..p.len() {
        let cell = p.cell(s);
        text += &format!("{}: {}", space.name(s), cell.lower);
        if !cell.is_exact() {
            text += &format!(" (truncated at {}; at most {})", cfg.star_depth(), cell.upper);
        }
        text.push('\n');
    }
    let json = json!({
        "game": g.to_string(),
        "target": state_set_json(space, &target),
        "cells": profile_json(space, &p),
    });
    Ok(Outcome::new(json, text).with_code(if p.is_exact() { 0 } else { 1 }))
}

fn kripke_check(model: &GameModel, game: &str) -> effgame::Result<Outcome> {
    let space = model.space();
    let report = kripke_generated(model.effectivity(game)?)?;
    let set_names = |sets: &[StateSet]| sets.iter().map(|x| state_set_json(space, x)).collect::<Vec<_>>();
    let states: Vec<Value> = report
        .states
        .iter()
        .enumerate()
        .map(|(s, v)| {
            let mut obj = Map::new();
            obj.insert("state".into(), json!(space.name(s)));
            obj.insert("stage".into(), json!(v.stage()));
            match v {
                StateVerdict::Kripke(mu) => {
                    obj.insert("row".into(), dist_json(space, mu));
                }
                StateVerdict::Axioms(violations) => {
                    let list: Vec<Value> = violations
                        .iter()
                        .map(|a| json!({"axiom": a.axiom, "sets": set_names(&a.sets), "detail": a.detail}))
                        .collect();
                    obj.insert("violations".into(), Value::Array(list));
                }
                StateVerdict::Additivity(x, y) => {
                    obj.insert("witness".into(), json!(set_names(&[*x, *y])));
                }
                StateVerdict::NotGenerated(mu) => {
                    obj.insert("candidate".into(), dist_json(space, mu));
                }
            }
            Value::Object(obj)
        })
        .collect();
    let yes = report.kernel.is_some();
    let mut text = format!("kripke: {}\n", if yes { "yes" } else { "no" });
    for (s, v) in report.states.iter().enumerate() {
        text += &format!("{}: {}", space.name(s), v.stage());
        if let StateVerdict::Kripke(mu) = v {
            text += &format!(" {}", dist_json(space, mu));
        }
        text.push('\n');
    }
    let json = json!({
        "game": game,
        "kripke": yes,
        "states": states,
        "kernel": report.kernel.as_ref().map(|k| kernel_json(space, k)),
    });
    Ok(Outcome::new(json, text))
}

fn quotient(model: &GameModel, cfg: &RunConfig) -> effgame::Result<Outcome> {
    let space = model.space();
    let r = refine(model)?;
    if let Some(failure) = congruence_check(model, &r.partition)? {
        return Err(Error::Invariant(format!("logical partition is not a congruence: {failure:?}")));
    }
    let factor = factor_model(model, &r.partition)?;
    let blocks: Vec<Value> = r.partition.blocks().iter().map(|b| state_set_json(space, b)).collect();
    let mut map = Map::new();
    for s in 0..model.len() {
        map.insert(space.name(s).into(), json!(factor.space().name(r.partition.block_of(s))));
    }
    let mut obj = Map::new();
    obj.insert("blocks".into(), Value::Array(blocks));
    obj.insert(
        "formulas".into(),
        json!(r.formulas.iter().map(|f| f.to_string()).collect::<Vec<_>>()),
    );
    obj.insert("rounds".into(), json!(r.rounds.len()));
    obj.insert("map".into(), Value::Object(map));
    obj.insert("factor".into(), model_json(&factor));
    let mut text = format!("{} blocks, {} rounds\n", r.partition.num_blocks(), r.rounds.len());
    for (b, f) in r.partition.blocks().iter().zip(&r.formulas) {
        text += &format!("{{{}}}: {f}\n", names(space, b));
    }
    let mut code = 0;
    if cfg.oracle {
        let e = enumerate(model, &cfg.enumeration())?;
        let matches = e.partition == r.partition;
        let blocks: Vec<Value> = e.partition.blocks().iter().map(|b| state_set_json(space, b)).collect();
        obj.insert(
            "enumeration".into(),
            json!({"blocks": blocks, "skipped_undecided": e.undecided, "match": matches}),
        );
        text += &format!("enumeration match: {matches}\n");
        if !matches {
            code = 4;
        }
    }
    Ok(Outcome::new(Value::Object(obj), text).with_code(code))
}

fn equiv(m1: &GameModel, m2: &GameModel, cfg: &RunConfig) -> effgame::Result<Outcome> {
    let verdict = logical_equiv(m1, m2)?;
    let (mut obj, mut text, mut code, equivalent) = match &verdict {
        EquivVerdict::Equivalent(c) => {
            let leg = |m: &GameModel, f: &[usize]| {
                let mut map = Map::new();
                for (s, &t) in f.iter().enumerate() {
                    map.insert(m.space().name(s).into(), json!(c.target.space().name(t)));
                }
                Value::Object(map)
            };
            let mut obj = Map::new();
            obj.insert("verdict".into(), json!("equivalent"));
            obj.insert(
                "cospan".into(),
                json!({"target": model_json(&c.target), "left": leg(m1, &c.left), "right": leg(m2, &c.right)}),
            );
            let text = format!("equivalent via a common factor with {} states\n", c.target.len());
            (obj, text, 0, Some(true))
        }
        EquivVerdict::Distinguished {
            formula,
            side,
            fast_confirmed,
        } => {
            let side = match side {
                Side::First => "first",
                Side::Second => "second",
            };
            let mut obj = Map::new();
            obj.insert("verdict".into(), json!("distinguished"));
            obj.insert("formula".into(), json!(formula.to_string()));
            obj.insert("satisfied_in".into(), json!(side));
            obj.insert("fast_confirmed".into(), json!(fast_confirmed));
            let text = format!("distinguished: `{formula}` holds somewhere in the {side} model only\n");
            (obj, text, 0, Some(false))
        }
        EquivVerdict::Undecided(reason) => {
            let obj = Map::from_iter([("verdict".into(), json!("undecided")), ("reason".into(), json!(reason))]);
            (obj, format!("undecided: {reason}\n"), 1, None)
        }
    };
    if cfg.oracle {
        let classes = theory_classes(m1, m2, &cfg.enumeration())?;
        let enum_equiv = classes.iter().all(|(l, r)| !l.is_empty() && !r.is_empty());
        let matches = equivalent.is_none_or(|e| e == enum_equiv);
        obj.insert("enumeration".into(), json!({"equivalent": enum_equiv, "match": matches}));
        text += &format!("enumeration match: {matches}\n");
        if !matches {
            code = 4;
        }
    }
    Ok(Outcome::new(Value::Object(obj), text).with_code(code))
}

fn oracle(cmd: &OracleCommand, cfg: &RunConfig) -> effgame::Result<Outcome> {
    let den = cfg.grid.unwrap_or(64);
    let grid_outcome = |r: effgame::oracle::GridReport| {
        let matches = r.matches();
        let text = format!("fast: {}\nmismatches: {}\nmatch: {matches}\n", r.fast, r.mismatches.join(", "));
        let mut json = serde_json::to_value(&r).expect("serializable");
        json["match"] = json!(matches);
        Outcome::new(json, text).with_code(if matches { 0 } else { 4 })
    };
    match cmd {
        OracleCommand::Choice { first, second } => {
            let (a, b) = (parse_interval_set(first)?, parse_interval_set(second)?);
            Ok(grid_outcome(choice_report(&a, &b, den)))
        }
        OracleCommand::Star { terms } => {
            let terms = terms.iter().map(|t| parse_interval_set(t)).collect::<effgame::Result<Vec<_>>>()?;
            if terms.len() > 6 {
                return Err(Error::TooLarge {
                    what: "star oracle stream",
                    limit: 6,
                    found: terms.len(),
                });
            }
            Ok(grid_outcome(star_report(&terms, den)))
        }
        OracleCommand::KernelSums { model, game } => {
            let model = load_model(model)?;
            let program = parse_game(game)?;
            let k = pdl_kernel(&model, &program)?.to_kernel().ok_or_else(|| {
                Error::Unsupported("program kernel has entries above 1; power sums need a substochastic kernel".into())
            })?;
            let r = kernel_sum_report(&k, cfg.star_depth())?;
            let space = model.space();
            let partial: Map<String, Value> = r
                .partial
                .iter()
                .enumerate()
                .map(|(s, row)| {
                    let entries: Map<String, Value> = row
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !num_is_zero(v))
                        .map(|(t, v)| (space.name(t).to_string(), json!(v.to_string())))
                        .collect();
                    (space.name(s).to_string(), Value::Object(entries))
                })
                .collect();
            let matches = r.matches();
            let json = json!({
                "depth": r.depth,
                "partial_sum": partial,
                "closure": ext_kernel_json(space, &r.closure),
                "below_closure": r.below_closure,
                "fixed_point": r.fixed_point,
                "match": matches,
            });
            let text = format!(
                "closure: {}\nbelow closure: {}\nfixed point: {}\nmatch: {matches}\n",
                ext_kernel_json(space, &r.closure),
                r.below_closure,
                r.fixed_point
            );
            Ok(Outcome::new(json, text).with_code(if matches { 0 } else { 4 }))
        }
        OracleCommand::Portfolio { model, game } => {
            let model = load_model(model)?;
            let p = model.effectivity(game)?;
            let den = cfg.grid.unwrap_or(8);
            let mismatches = portfolio_report(p, den)?;
            let matches = mismatches.is_empty();
            let checked = p.len() * (1usize << p.len()) * (den as usize + 1) * 2;
            let json = json!({
                "grid": den,
                "checked": checked,
                "mismatches": serde_json::to_value(&mismatches).expect("serializable"),
                "match": matches,
            });
            let text = format!("checked: {checked}\nmismatches: {}\nmatch: {matches}\n", mismatches.len());
            Ok(Outcome::new(json, text).with_code(if matches { 0 } else { 4 }))
        }
    }
}

fn num_is_zero(r: &effgame::Rational) -> bool {
    *r.numer() == 0.into()
}
