//! Seeded random-game harness: samples games within the given bounds,
//! runs each to its outcome, and writes one CSV row per game. Each game
//! gets its own RNG stream off the master seed, so any row can be
//! regenerated in isolation.

use anyhow::anyhow;
use clap::{Args, ValueEnum};
use itervote::dynamics::Scheduler;
use itervote::model::{
    rat, ratio, Behavior, NonatomicType, Population, PopulationKind, PreferenceOrder, Profile,
    Rat, TieBreak, VoterType,
};
use itervote::strategy::WeakLdPolicy;
use itervote::{Game, Metric, RunConfig, Trace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Atomic,
    Nonatomic,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BehaviorArg {
    WeakLd,
    StrictLd,
    Wcr,
    Mixed,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Number of games to run.
    #[arg(long, default_value_t = 100)]
    pub games: u64,
    /// Master seed; game i runs on stream i of this seed.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = KindArg::Nonatomic)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = BehaviorArg::WeakLd)]
    pub behavior: BehaviorArg,
    #[arg(long, default_value_t = 5)]
    pub max_m: usize,
    /// Types (nonatomic) or voters (atomic) per game.
    #[arg(long, default_value_t = 6)]
    pub max_types: usize,
    /// Comma-separated subset of linf, multiplicative, l1.
    #[arg(long, default_value = "linf,multiplicative")]
    pub metrics: String,
    #[arg(long, default_value_t = 10_000)]
    pub step_limit: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_batch(args: &BatchArgs) -> anyhow::Result<i32> {
    let metrics = crate::parse_metrics(&args.metrics)?;
    if args.max_m < 2 || args.max_types < 1 {
        return Err(anyhow!("need at least 2 candidates and 1 type"));
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut outcomes = [0u64; 4];
    for id in 0..args.games {
        let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
        rng.set_stream(id);
        let sample = sample_game(&mut rng, args, &metrics)?;
        let trace = itervote::run(&sample.game, &sample.initial, &sample.config)?;
        let kind = crate::output::outcome_kind(&trace.outcome);
        match kind {
            "equilibrium" => outcomes[0] += 1,
            "cycle" => outcomes[1] += 1,
            "step-limit" => outcomes[2] += 1,
            _ => outcomes[3] += 1,
        }
        rows.push(vec![
            id.to_string(),
            sample.game.m().to_string(),
            sample.game.population.agent_count().to_string(),
            sample.metric_label.to_string(),
            sample.scheduler_label.to_string(),
            sample.behavior_label.to_string(),
            trace.steps().to_string(),
            kind.to_string(),
            max_moves_by_one_agent(&trace).to_string(),
            winner_score_monotone(&trace).to_string(),
        ]);
    }
    let header = [
        "game",
        "m",
        "agents",
        "metric",
        "scheduler",
        "behavior",
        "steps",
        "outcome",
        "max_moves_one_agent",
        "winner_score_monotone",
    ];
    let summary = format!(
        "{} games: {} equilibria, {} cycles, {} step-limits",
        args.games, outcomes[0], outcomes[1], outcomes[2]
    );
    match &args.out {
        Some(path) => {
            let mut writer = csv::Writer::from_path(path)?;
            writer.write_record(header)?;
            for row in &rows {
                writer.write_record(row)?;
            }
            writer.flush()?;
            println!("{summary}");
        }
        None => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            writer.write_record(header)?;
            for row in &rows {
                writer.write_record(row)?;
            }
            writer.flush()?;
            eprintln!("{summary}");
        }
    }
    Ok(0)
}

fn max_moves_by_one_agent(trace: &Trace) -> usize {
    let mut counts = std::collections::HashMap::new();
    for mv in &trace.moves {
        *counts.entry(mv.agent).or_insert(0usize) += 1;
    }
    counts.values().copied().max().unwrap_or(0)
}

fn winner_score_monotone(trace: &Trace) -> bool {
    trace.winner_scores.windows(2).all(|w| w[1] >= w[0])
}

struct Sample {
    game: Game,
    initial: Profile,
    config: RunConfig,
    metric_label: &'static str,
    scheduler_label: &'static str,
    behavior_label: &'static str,
}

const RADIUS_GRID: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (1, 1), (2, 1)];

fn sample_game(
    rng: &mut ChaCha12Rng,
    args: &BatchArgs,
    metrics: &[Metric],
) -> anyhow::Result<Sample> {
    let m = rng.gen_range(2..=args.max_m);
    let metric = metrics[rng.gen_range(0..metrics.len())];
    let metric_label = match metric {
        Metric::LInf => "linf",
        Metric::Multiplicative => "multiplicative",
        Metric::L1 => "l1",
    };
    let atomic = match args.kind {
        KindArg::Atomic => true,
        KindArg::Nonatomic => false,
        KindArg::Mixed => rng.gen_bool(0.5),
    };
    let base_scores: Vec<Rat> = (0..m).map(|_| rat(rng.gen_range(0..=10))).collect();
    let mut behavior_label = "";
    let mut draw_type = |rng: &mut ChaCha12Rng| -> VoterType {
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let prefs = PreferenceOrder::new(order).expect("shuffled permutation");
        let (n, d) = RADIUS_GRID[rng.gen_range(0..RADIUS_GRID.len())];
        let behavior = match args.behavior {
            BehaviorArg::WeakLd => Behavior::WeakLd,
            BehaviorArg::StrictLd => Behavior::StrictLd,
            BehaviorArg::Wcr => Behavior::Wcr,
            BehaviorArg::Mixed => {
                [Behavior::WeakLd, Behavior::StrictLd, Behavior::Wcr][rng.gen_range(0..3)]
            }
        };
        behavior_label = match behavior {
            Behavior::WeakLd => "weak-ld",
            Behavior::StrictLd => "strict-ld",
            Behavior::Wcr => "wcr",
        };
        VoterType::new(prefs, ratio(n, d), behavior).expect("grid radii are nonnegative")
    };
    let (population, initial, scheduler, scheduler_label) = if atomic {
        let n = rng.gen_range(2..=args.max_types.max(2));
        let voters: Vec<VoterType> = (0..n).map(|_| draw_type(rng)).collect();
        let initial = Profile::Atomic((0..n).map(|_| rng.gen_range(0..m)).collect());
        let (scheduler, label) = match rng.gen_range(0..3) {
            0 => (Scheduler::SingletonFirstFound, "singleton-first-found"),
            1 => (Scheduler::SingletonRoundRobin, "singleton-round-robin"),
            _ => (Scheduler::SingletonRandom, "singleton-random"),
        };
        (
            Population { base_scores, kind: PopulationKind::Atomic { voters } },
            initial,
            scheduler,
            label,
        )
    } else {
        let n = rng.gen_range(1..=args.max_types);
        let types: Vec<NonatomicType> = (0..n)
            .map(|_| NonatomicType { ty: draw_type(rng), blocks: rng.gen_range(1..=4) })
            .collect();
        let epsilon = [rat(1), ratio(1, 2), ratio(3, 10)][rng.gen_range(0..3)].clone();
        let counts: Vec<Vec<u32>> = types
            .iter()
            .map(|t| {
                let mut row = vec![0u32; m];
                for _ in 0..t.blocks {
                    row[rng.gen_range(0..m)] += 1;
                }
                row
            })
            .collect();
        let (scheduler, label) = match rng.gen_range(0..5) {
            0 => (Scheduler::SimultaneousAll, "simultaneous-all"),
            1 => (Scheduler::GroupRandom { p: 0.3 }, "group-random-0.3"),
            2 => (Scheduler::GroupRandom { p: 0.7 }, "group-random-0.7"),
            3 => (Scheduler::SingletonFirstFound, "singleton-first-found"),
            _ => (Scheduler::SingletonRandom, "singleton-random"),
        };
        (
            Population { base_scores, kind: PopulationKind::Nonatomic { types, epsilon } },
            Profile::Nonatomic(counts),
            scheduler,
            label,
        )
    };
    let game = Game::new(population, metric, TieBreak::lexicographic(m))?;
    let config = RunConfig {
        scheduler,
        weak_ld_policy: WeakLdPolicy::Adversarial,
        step_limit: args.step_limit,
        seed: rng.gen(),
    };
    Ok(Sample { game, initial, config, metric_label, scheduler_label, behavior_label })
}
