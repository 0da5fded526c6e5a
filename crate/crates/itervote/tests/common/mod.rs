//! Seeded random instances shared by the integration suites.
//!
//! Every generator takes the caller's rng so a single seed pins the whole
//! sample; nothing here draws from global randomness.

#![allow(dead_code)]

use itervote::{
    rat, ratio, truthful_profile, Behavior, Game, Metric, NonatomicType, Population,
    PopulationKind, PreferenceOrder, Profile, Rat, RunConfig, Scheduler, TieBreak,
    UtilityScale, ViewPoint, VoterType, WeakLdPolicy,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub fn seeded(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn random_prefs(rng: &mut ChaCha12Rng, m: usize) -> PreferenceOrder {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    PreferenceOrder::new(order).expect("permutation")
}

/// Radii exercised by the random games: zero, fractional, unit, large.
pub fn radius_pool() -> Vec<Rat> {
    vec![rat(0), ratio(1, 4), ratio(1, 2), rat(1), rat(2)]
}

fn pick<T: Clone>(rng: &mut ChaCha12Rng, pool: &[T]) -> T {
    pool.choose(rng).expect("nonempty").clone()
}

fn candidate_wise_metric(rng: &mut ChaCha12Rng) -> Metric {
    pick(rng, &[Metric::LInf, Metric::Multiplicative])
}

fn random_base(rng: &mut ChaCha12Rng, m: usize) -> Vec<Rat> {
    (0..m).map(|_| rat(rng.gen_range(0..=8))).collect()
}

/// Spread `blocks` over the m candidates uniformly at random.
fn random_row(rng: &mut ChaCha12Rng, blocks: u32, m: usize) -> Vec<u32> {
    let mut row = vec![0u32; m];
    for _ in 0..blocks {
        row[rng.gen_range(0..m)] += 1;
    }
    row
}

/// Nonatomic weak-LD game with mixed radii, an arbitrary initial
/// profile, and a random-group scheduler.
pub fn random_nonatomic_game(rng: &mut ChaCha12Rng) -> (Game, Profile, RunConfig) {
    let m = rng.gen_range(2..=5);
    let n_types = rng.gen_range(1..=6);
    let radii = radius_pool();
    let types: Vec<NonatomicType> = (0..n_types)
        .map(|_| {
            let prefs = random_prefs(rng, m);
            let r = pick(rng, &radii);
            let ty = VoterType::new(prefs, r, Behavior::WeakLd).expect("valid type");
            NonatomicType { ty, blocks: rng.gen_range(1..=4) }
        })
        .collect();
    let initial = Profile::Nonatomic(
        types.iter().map(|t| random_row(rng, t.blocks, m)).collect(),
    );
    let population = Population {
        base_scores: random_base(rng, m),
        kind: PopulationKind::Nonatomic {
            types,
            epsilon: pick(rng, &[rat(1), ratio(1, 2), ratio(3, 10)]),
        },
    };
    let game = Game::new(population, candidate_wise_metric(rng), TieBreak::lexicographic(m))
        .expect("valid game");
    let config = RunConfig {
        scheduler: Scheduler::GroupRandom { p: pick(rng, &[0.2, 0.5, 0.8]) },
        weak_ld_policy: WeakLdPolicy::Adversarial,
        step_limit: 10_000,
        seed: rng.gen(),
    };
    (game, initial, config)
}

/// Atomic LD game (weak and strict voters mixed) with mixed radii, an
/// arbitrary initial profile, and a singleton scheduler.
pub fn random_atomic_game(rng: &mut ChaCha12Rng) -> (Game, Profile, RunConfig) {
    let m = rng.gen_range(2..=5);
    let n = rng.gen_range(2..=6);
    let radii = radius_pool();
    let voters: Vec<VoterType> = (0..n)
        .map(|_| {
            let prefs = random_prefs(rng, m);
            let behavior = pick(rng, &[Behavior::WeakLd, Behavior::StrictLd]);
            VoterType::new(prefs, pick(rng, &radii), behavior).expect("valid type")
        })
        .collect();
    let initial = Profile::Atomic((0..n).map(|_| rng.gen_range(0..m)).collect());
    let population = Population {
        base_scores: random_base(rng, m),
        kind: PopulationKind::Atomic { voters },
    };
    let game = Game::new(population, candidate_wise_metric(rng), TieBreak::lexicographic(m))
        .expect("valid game");
    let config = RunConfig {
        scheduler: pick(
            rng,
            &[
                Scheduler::SingletonFirstFound,
                Scheduler::SingletonRoundRobin,
                Scheduler::SingletonRandom,
            ],
        ),
        weak_ld_policy: WeakLdPolicy::Adversarial,
        step_limit: 10_000,
        seed: rng.gen(),
    };
    (game, initial, config)
}

/// Truthful-start nonatomic strict-LD game where every type shares one
/// radius, or one nonincreasing radius schedule when `scheduled`.
pub fn random_truthful_uniform_game(
    rng: &mut ChaCha12Rng,
    scheduled: bool,
) -> (Game, Profile, RunConfig) {
    let m = rng.gen_range(2..=5);
    let n_types = rng.gen_range(1..=6);
    let radii = radius_pool();
    let shared_r = pick(rng, &radii);
    let shared_schedule: Option<Vec<Rat>> = scheduled.then(|| {
        let mut sched: Vec<Rat> =
            (0..rng.gen_range(2..=4)).map(|_| pick(rng, &radii)).collect();
        sched.sort();
        sched.reverse();
        sched
    });
    let types: Vec<NonatomicType> = (0..n_types)
        .map(|_| {
            let prefs = random_prefs(rng, m);
            let mut ty =
                VoterType::new(prefs, shared_r.clone(), Behavior::StrictLd).expect("valid type");
            if let Some(sched) = &shared_schedule {
                ty = ty.with_schedule(sched.clone()).expect("nonincreasing");
            }
            NonatomicType { ty, blocks: rng.gen_range(1..=4) }
        })
        .collect();
    let population = Population {
        base_scores: random_base(rng, m),
        kind: PopulationKind::Nonatomic { types, epsilon: pick(rng, &[rat(1), ratio(1, 2)]) },
    };
    let initial = truthful_profile(&population);
    let game = Game::new(population, candidate_wise_metric(rng), TieBreak::lexicographic(m))
        .expect("valid game");
    let config = RunConfig {
        scheduler: pick(
            rng,
            &[
                Scheduler::SingletonFirstFound,
                Scheduler::SingletonRoundRobin,
                Scheduler::SingletonRandom,
            ],
        ),
        weak_ld_policy: WeakLdPolicy::Adversarial,
        step_limit: 10_000,
        seed: rng.gen(),
    };
    (game, initial, config)
}

/// Random nonatomic view under a candidate-wise metric.
pub fn random_candidate_wise_view(rng: &mut ChaCha12Rng) -> ViewPoint {
    let m = rng.gen_range(2..=5);
    let scores: Vec<Rat> = (0..m)
        .map(|_| {
            let whole = rat(rng.gen_range(0..=10));
            if rng.gen_bool(0.3) {
                whole + ratio(1, 2)
            } else {
                whole
            }
        })
        .collect();
    let prefs = random_prefs(rng, m);
    let utilities = UtilityScale::borda(&prefs);
    let current = rng.gen_range(0..m);
    let radius = pick(rng, &radius_pool());
    ViewPoint::nonatomic(&scores, current, candidate_wise_metric(rng), radius, prefs, utilities)
        .expect("valid view")
}
