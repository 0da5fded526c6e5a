//! Trace and score-series writers.
//!
//! A trace file is JSON Lines: one header record carrying everything a
//! replay needs (scenario hash, seed, RNG family, scheduler), then one
//! record per move, then a summary record. The score series is a CSV
//! with one row per step boundary.

use anyhow::Context;
use itervote::dynamics::Scheduler;
use itervote::model::Profile;
use itervote::scenarios::{Compiled, InitialSpec, Scenario};
use itervote::{MoveClass, Outcome, Trace};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// FNV-1a, 64-bit: tiny, stable fingerprint for replay headers.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn outcome_kind(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Equilibrium => "equilibrium",
        Outcome::Cycle { .. } => "cycle",
        Outcome::ScriptExhausted => "script-exhausted",
        Outcome::StepLimit => "step-limit",
    }
}

#[derive(Serialize)]
struct HeaderLine<'a> {
    kind: &'static str,
    scenario: &'a str,
    hash: String,
    seed: u64,
    step_limit: usize,
    rng: &'static str,
    scheduler: &'a Scheduler,
}

#[derive(Serialize)]
struct MoveLine<'a> {
    kind: &'static str,
    step: usize,
    agent: usize,
    from: &'a str,
    to: &'a str,
    class: MoveClass,
    winner_after: &'a str,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    kind: &'static str,
    outcome: &'a Outcome,
    steps: usize,
    winner: &'a str,
    moves: usize,
}

pub fn write_trace(
    path: &Path,
    sc: &Scenario,
    compiled: &Compiled,
    trace: &Trace,
) -> anyhow::Result<()> {
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    let header = HeaderLine {
        kind: "header",
        scenario: &sc.name,
        hash: format!("{:016x}", fnv1a64(sc.to_json().as_bytes())),
        seed: compiled.config.seed,
        step_limit: compiled.config.step_limit,
        rng: "ChaCha12",
        scheduler: &compiled.config.scheduler,
    };
    writeln!(file, "{}", serde_json::to_string(&header)?)?;
    for mv in &trace.moves {
        let line = MoveLine {
            kind: "move",
            step: mv.step,
            agent: mv.agent,
            from: &sc.candidates[mv.from],
            to: &sc.candidates[mv.to],
            class: mv.class,
            winner_after: &sc.candidates[mv.winner_after],
        };
        writeln!(file, "{}", serde_json::to_string(&line)?)?;
    }
    let summary = SummaryLine {
        kind: "summary",
        outcome: &trace.outcome,
        steps: trace.steps(),
        winner: &sc.candidates[trace.final_winner()],
        moves: trace.moves.len(),
    };
    writeln!(file, "{}", serde_json::to_string(&summary)?)?;
    Ok(())
}

pub fn write_scores(
    path: &Path,
    sc: &Scenario,
    compiled: &Compiled,
    trace: &Trace,
) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    let mut headers = vec!["t".to_string()];
    headers.extend(sc.candidates.iter().cloned());
    headers.push("winner".into());
    writer.write_record(&headers)?;
    for (t, profile) in trace.profiles.iter().enumerate() {
        let scores = compiled.game.scores(profile)?;
        let mut row = vec![t.to_string()];
        row.extend(scores.s.iter().map(|x| x.to_string()));
        row.push(sc.candidates[scores.winner()].clone());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Render a profile in the initial-spec JSON dialect, with names.
pub fn profile_to_spec(candidates: &[String], profile: &Profile) -> InitialSpec {
    match profile {
        Profile::Atomic(votes) => InitialSpec::Votes {
            votes: votes.iter().map(|&c| candidates[c].clone()).collect(),
        },
        Profile::Nonatomic(counts) => InitialSpec::Blocks {
            blocks: counts
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(_, &n)| n > 0)
                        .map(|(c, &n)| (candidates[c].clone(), n))
                        .collect::<BTreeMap<String, u32>>()
                })
                .collect(),
        },
    }
}
