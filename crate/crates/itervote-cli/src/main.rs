//! Command-line driver: run scenarios to their outcome, check profiles
//! for stability, census equilibria, cross-validate the closed forms
//! against brute force, verify the built-in registry, and batch-run
//! seeded random games.
//!
//! Exit codes: 0 success (or equilibrium), 2 bad input, 10 cycle
//! detected, 11 step limit hit, 12 expectation or validation failure,
//! 13 search space refused as too large.

mod batch;
mod output;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use itervote::dynamics::equilibrium_witness;
use itervote::model::Behavior;
use itervote::oracle::OracleError;
use itervote::scenarios::{parse_rational, InitialSpec};
use itervote::strategy::{ld_move_set, wcr_values};
use itervote::{
    agent_view, builtin, builtin_names, cross_validate, equilibrium_census,
    equilibrium_census_restricted, verify_expectations, FamilySpec, Metric, Outcome, Scenario,
    ENUMERATION_CAP,
};
use std::path::{Path, PathBuf};

const EXIT_BAD_INPUT: i32 = 2;
const EXIT_CYCLE: i32 = 10;
const EXIT_STEP_LIMIT: i32 = 11;
const EXIT_FAILED: i32 = 12;
const EXIT_REFUSED: i32 = 13;

#[derive(Parser)]
#[command(name = "itervote", version, about = "Iterative plurality voting under uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (file path or built-in name) to its outcome.
    Run {
        scenario: String,
        /// Write a JSON Lines trace with a replay header.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write a per-step CSV of candidate scores.
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Check the scenario's expectations instead of mapping the
        /// outcome to an exit code.
        #[arg(long)]
        expect: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        step_limit: Option<usize>,
    },
    /// Report every agent's response at the initial (or given) profile.
    Check {
        scenario: String,
        /// Profile override as initial-spec JSON, e.g.
        /// {"kind":"votes","votes":["a","b"]}.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Enumerate every equilibrium of the profile space.
    Census {
        scenario: String,
        /// Ignore the scenario's allowed-votes restriction.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = ENUMERATION_CAP)]
        cap: u128,
        /// Write equilibria as JSON lines instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed-form answers against brute-force enumeration over
    /// a family of atomic views.
    CrossValidate {
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 8)]
        max_score: i64,
        /// Comma-separated radii, rationals allowed.
        #[arg(long, default_value = "0,1,2,3")]
        radii: String,
        /// Comma-separated subset of linf, multiplicative, l1.
        #[arg(long, default_value = "linf,multiplicative,l1")]
        metrics: String,
        #[arg(long, default_value_t = ENUMERATION_CAP)]
        cap: u128,
    },
    /// Execute every built-in scenario's expectations.
    VerifyBuiltins,
    /// Run seeded random games and write one CSV row per game.
    Batch(batch::BatchArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_BAD_INPUT
        }
    };
    std::process::exit(code);
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Run { scenario, trace, scores, expect, seed, step_limit } => {
            cmd_run(&scenario, trace.as_deref(), scores.as_deref(), expect, seed, step_limit)
        }
        Command::Check { scenario, profile } => cmd_check(&scenario, profile.as_deref()),
        Command::Census { scenario, full, cap, out } => {
            cmd_census(&scenario, full, cap, out.as_deref())
        }
        Command::CrossValidate { max_m, max_score, radii, metrics, cap } => {
            cmd_cross_validate(max_m, max_score, &radii, &metrics, cap)
        }
        Command::VerifyBuiltins => cmd_verify_builtins(),
        Command::Batch(args) => batch::run_batch(&args),
    }
}

/// A scenario argument is a file path when one exists, otherwise a
/// built-in name.
fn resolve(spec: &str) -> anyhow::Result<Scenario> {
    let path = Path::new(spec);
    if path.exists() {
        return Scenario::load(path).with_context(|| format!("loading {spec}"));
    }
    builtin(spec).map_err(|_| {
        anyhow!("{spec:?} is neither a scenario file nor a built-in ({})", builtin_names().join(", "))
    })
}

fn cmd_run(
    spec: &str,
    trace_path: Option<&Path>,
    scores_path: Option<&Path>,
    expect: bool,
    seed: Option<u64>,
    step_limit: Option<usize>,
) -> anyhow::Result<i32> {
    let sc = resolve(spec)?;
    let mut compiled = sc.compile()?;
    if let Some(s) = seed {
        compiled.config.seed = s;
    }
    if let Some(l) = step_limit {
        compiled.config.step_limit = l;
    }
    let trace = itervote::run(&compiled.game, &compiled.initial, &compiled.config)?;
    println!(
        "outcome: {} after {} steps, winner {}, {} moves",
        output::outcome_kind(&trace.outcome),
        trace.steps(),
        sc.candidates[trace.final_winner()],
        trace.moves.len()
    );
    if let Some(path) = trace_path {
        output::write_trace(path, &sc, &compiled, &trace)?;
    }
    if let Some(path) = scores_path {
        output::write_scores(path, &sc, &compiled, &trace)?;
    }
    if expect {
        let checks = verify_expectations(&sc)?;
        let mut ok = true;
        for check in &checks {
            println!(
                "expect {}: {} ({})",
                check.label,
                if check.pass { "PASS" } else { "FAIL" },
                check.detail
            );
            ok &= check.pass;
        }
        return Ok(if ok { 0 } else { EXIT_FAILED });
    }
    Ok(match trace.outcome {
        Outcome::Equilibrium | Outcome::ScriptExhausted => 0,
        Outcome::Cycle { .. } => EXIT_CYCLE,
        Outcome::StepLimit => EXIT_STEP_LIMIT,
    })
}

fn cmd_check(spec: &str, profile: Option<&str>) -> anyhow::Result<i32> {
    let mut sc = resolve(spec)?;
    if let Some(text) = profile {
        sc.initial = serde_json::from_str::<InitialSpec>(text).context("parsing --profile")?;
    }
    let compiled = sc.compile()?;
    let scores = compiled.game.scores(&compiled.initial)?;
    let rendered: Vec<String> = scores
        .s
        .iter()
        .enumerate()
        .map(|(c, v)| format!("{}={}", sc.candidates[c], v))
        .collect();
    println!("scores: {}", rendered.join(" "));
    println!("winner: {}", sc.candidates[scores.winner()]);
    for agent in 0..compiled.game.population.agent_count() {
        let view = agent_view(&compiled.game, &compiled.initial, agent, 0)?
            .expect("agent index in range");
        let behavior = itervote::dynamics::agent_type(&compiled.game.population, agent)
            .expect("agent index in range")
            .behavior;
        let vote = &sc.candidates[view.current];
        match behavior {
            Behavior::StrictLd | Behavior::WeakLd => {
                let moves = ld_move_set(&view)?;
                if moves.is_empty() {
                    println!("agent {agent} (votes {vote}): no dominating move");
                } else {
                    let named: Vec<&String> =
                        moves.iter().map(|&c| &sc.candidates[c]).collect();
                    println!(
                        "agent {agent} (votes {vote}): dominated, moves {:?}",
                        named
                    );
                }
            }
            Behavior::Wcr => {
                let values = wcr_values(&view)?;
                let named: Vec<String> = values
                    .iter()
                    .enumerate()
                    .map(|(c, v)| format!("{}={}", sc.candidates[c], v))
                    .collect();
                let resp = itervote::wcr_response(&view)?;
                println!(
                    "agent {agent} (votes {vote}): regret {} response {}",
                    named.join(" "),
                    resp.map_or("keep".to_string(), |c| sc.candidates[c].clone())
                );
            }
        }
    }
    match equilibrium_witness(&compiled.game, &compiled.initial, 0)? {
        None => println!("stable"),
        Some(wish) => println!(
            "unstable: agent {} moves {} -> {}",
            wish.agent, sc.candidates[wish.from], sc.candidates[wish.to]
        ),
    }
    Ok(0)
}

fn cmd_census(spec: &str, full: bool, cap: u128, out: Option<&Path>) -> anyhow::Result<i32> {
    let sc = resolve(spec)?;
    let compiled = sc.compile()?;
    let result = match (&compiled.allowed, full) {
        (Some(allowed), false) => {
            equilibrium_census_restricted(&compiled.game, allowed, 0, cap)
        }
        _ => equilibrium_census(&compiled.game, 0, cap),
    };
    let census = match result {
        Ok(census) => census,
        Err(OracleError::Refused { size, cap }) => {
            eprintln!("refused: {size} profiles exceed the cap of {cap}");
            return Ok(EXIT_REFUSED);
        }
        Err(err) => return Err(err.into()),
    };
    println!("{} profiles, {} equilibria", census.profiles, census.equilibria.len());
    let lines: Vec<String> = census
        .equilibria
        .iter()
        .map(|p| {
            let spec = output::profile_to_spec(&sc.candidates, p);
            serde_json::to_string(&spec).expect("profile serializes")
        })
        .collect();
    match out {
        Some(path) => std::fs::write(path, lines.join("\n") + "\n")?,
        None => {
            for line in lines {
                println!("{line}");
            }
        }
    }
    Ok(0)
}

fn cmd_cross_validate(
    max_m: usize,
    max_score: i64,
    radii: &str,
    metrics: &str,
    cap: u128,
) -> anyhow::Result<i32> {
    let radii = radii
        .split(',')
        .map(|s| parse_rational(s.trim()).map_err(|e| anyhow!(e)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let metrics = parse_metrics(metrics)?;
    let spec = FamilySpec { max_m, max_score, radii, metrics, state_cap: cap };
    let report = cross_validate(&spec)?;
    println!(
        "{} balls, {} cases, {} states, {} refused",
        report.balls, report.cases, report.states, report.refused
    );
    println!("{} mismatches", report.mismatch_count);
    for mm in report.mismatches.iter().take(10) {
        println!("  {mm:?}");
    }
    println!(
        "{} multiplicative rounding gaps{}",
        report.rounding_gaps,
        report
            .rounding_gap_example
            .as_ref()
            .map(|(c, r)| format!(" (first at center {c:?}, radius {r})"))
            .unwrap_or_default()
    );
    Ok(if report.mismatch_count == 0 { 0 } else { EXIT_FAILED })
}

fn parse_metrics(text: &str) -> anyhow::Result<Vec<Metric>> {
    text.split(',')
        .map(|s| {
            serde_json::from_str::<Metric>(&format!("\"{}\"", s.trim()))
                .map_err(|_| anyhow!("unknown metric {s:?} (linf, multiplicative, l1)"))
        })
        .collect()
}

fn cmd_verify_builtins() -> anyhow::Result<i32> {
    let mut ok = true;
    for name in builtin_names() {
        let checks = verify_expectations(&builtin(name)?)?;
        for check in checks {
            println!(
                "{name}: {} {} ({})",
                check.label,
                if check.pass { "PASS" } else { "FAIL" },
                check.detail
            );
            ok &= check.pass;
        }
    }
    Ok(if ok { 0 } else { EXIT_FAILED })
}
