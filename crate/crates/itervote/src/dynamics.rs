//! Iterative voting: schedulers activate voters (or blocks), activated
//! agents best-respond to the pre-step state, and the loop ends at an
//! equilibrium, a revisited state, an exhausted script, or the step
//! limit, checked in that order.

use crate::model::{
    is_eps_valid, scores_of, CandidateId, ModelError, Population, PopulationKind, Profile, Rat,
    ScoreVector, TieBreak, VoterType,
};
use crate::strategy::{
    strict_ld_response, weak_ld_response, wcr_response, StrategyError, ViewPoint, WeakLdPolicy,
};
use crate::model::Behavior;
use crate::uncertainty::{possible_winners, BeliefBall, Metric};
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("script activates agent {agent} but the population has {n} agents")]
    BadScript { agent: usize, n: usize },
    #[error("group activation probability must lie in [0, 1]")]
    BadProbability,
    #[error("initial profile does not fit the population")]
    BadInitial,
    #[error("invariant check needs the possible-winner series, which requires uniform radii")]
    NoWinnerSeries,
}

/// A population, the uncertainty metric every voter applies, and the
/// realized tie-break of the observed dynamics.
#[derive(Debug, Clone)]
pub struct Game {
    pub population: Population,
    pub metric: Metric,
    pub tiebreak: TieBreak,
}

impl Game {
    pub fn new(
        population: Population,
        metric: Metric,
        tiebreak: TieBreak,
    ) -> Result<Self, DynamicsError> {
        population.validate()?;
        if tiebreak.m() != population.m() {
            return Err(DynamicsError::Model(ModelError::ProfileShape));
        }
        Ok(Game { population, metric, tiebreak })
    }

    pub fn m(&self) -> usize {
        self.population.m()
    }

    pub fn scores(&self, profile: &Profile) -> Result<ScoreVector, DynamicsError> {
        Ok(scores_of(&self.population, profile, &self.tiebreak)?)
    }
}

/// The voter type behind an agent index; nonatomic agents are blocks in
/// type order.
pub fn agent_type(population: &Population, agent: usize) -> Option<&VoterType> {
    match &population.kind {
        PopulationKind::Atomic { voters } => voters.get(agent),
        PopulationKind::Nonatomic { types, .. } => {
            let mut rest = agent;
            for t in types {
                if rest < t.blocks as usize {
                    return Some(&t.ty);
                }
                rest -= t.blocks as usize;
            }
            None
        }
    }
}

/// Current vote of an agent. Blocks within a type are anonymous, so the
/// j-th block of a type votes for the j-th candidate slot in candidate
/// order.
pub fn agent_vote(
    population: &Population,
    profile: &Profile,
    agent: usize,
) -> Option<CandidateId> {
    match (&population.kind, profile) {
        (PopulationKind::Atomic { .. }, Profile::Atomic(votes)) => votes.get(agent).copied(),
        (PopulationKind::Nonatomic { types, .. }, Profile::Nonatomic(counts)) => {
            let mut rest = agent;
            for (row, t) in counts.iter().zip(types) {
                if rest < t.blocks as usize {
                    let mut j = rest as u32;
                    for (c, &n) in row.iter().enumerate() {
                        if j < n {
                            return Some(c);
                        }
                        j -= n;
                    }
                    return None;
                }
                rest -= t.blocks as usize;
            }
            None
        }
        _ => None,
    }
}

fn type_index(population: &Population, agent: usize) -> Option<usize> {
    match &population.kind {
        PopulationKind::Atomic { .. } => Some(agent),
        PopulationKind::Nonatomic { types, .. } => {
            let mut rest = agent;
            for (i, t) in types.iter().enumerate() {
                if rest < t.blocks as usize {
                    return Some(i);
                }
                rest -= t.blocks as usize;
            }
            None
        }
    }
}

fn scores_i64(scores: &ScoreVector) -> Vec<i64> {
    scores.s.iter().map(|x| x.to_integer().to_i64().expect("fits i64")).collect()
}

/// Direction of a vote change relative to the mover's own ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveClass {
    /// Toward a more preferred candidate.
    Opportunity,
    /// Toward a less preferred candidate.
    Compromise,
}

pub fn classify_move(
    prefs: &crate::model::PreferenceOrder,
    from: CandidateId,
    to: CandidateId,
) -> Result<MoveClass, ModelError> {
    if from == to {
        return Err(ModelError::NullMove);
    }
    Ok(if prefs.rank(to) < prefs.rank(from) {
        MoveClass::Opportunity
    } else {
        MoveClass::Compromise
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub step: usize,
    pub agent: usize,
    pub from: CandidateId,
    pub to: CandidateId,
    pub class: MoveClass,
    /// Winner once every move of this step has been applied.
    pub winner_after: CandidateId,
}

/// Who gets to act at each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheduler {
    /// Lowest-indexed agent that wants to move.
    SingletonFirstFound,
    /// First mover scanning cyclically from just past the previous mover.
    SingletonRoundRobin,
    /// Uniform draw among the agents that want to move.
    SingletonRandom,
    /// Every agent that wants to move does, against the pre-step state.
    SimultaneousAll,
    /// Each agent is independently activated with probability p.
    GroupRandom { p: f64 },
    /// Round t activates exactly the listed agents.
    Scripted { rounds: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scheduler: Scheduler,
    pub weak_ld_policy: WeakLdPolicy,
    pub step_limit: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheduler: Scheduler::SingletonFirstFound,
            weak_ld_policy: WeakLdPolicy::Adversarial,
            step_limit: 10_000,
            seed: 0,
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    /// No agent wants to move.
    Equilibrium,
    /// The (votes, radii, scheduler cursor) state at `start` reappeared
    /// `period` steps later. Only reported under deterministic
    /// schedulers, where a revisit really does repeat forever; random
    /// activation keeps running until equilibrium or the step limit.
    Cycle { period: usize, start: usize },
    /// The scripted rounds ran out before anything else happened.
    ScriptExhausted,
    StepLimit,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub moves: Vec<MoveRecord>,
    pub outcome: Outcome,
    /// Winner at every step boundary, starting with the initial profile.
    pub winners: Vec<CandidateId>,
    /// Winning score at every step boundary.
    pub winner_scores: Vec<Rat>,
    /// Observer-level possible winners per boundary, present at
    /// boundaries where all agents share one radius (continuum
    /// relaxation of the scores).
    pub possible_winners: Vec<Option<Vec<CandidateId>>>,
    /// Profile at every step boundary, aligned with `winners`.
    pub profiles: Vec<Profile>,
    pub final_profile: Profile,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.winners.len() - 1
    }

    pub fn final_winner(&self) -> CandidateId {
        *self.winners.last().expect("nonempty")
    }
}

fn build_view(
    game: &Game,
    scores: &ScoreVector,
    ty: &VoterType,
    current: CandidateId,
    t: usize,
) -> Result<ViewPoint, DynamicsError> {
    let r = ty.radius_at(t);
    let view = if game.population.is_atomic() {
        ViewPoint::atomic(
            &scores_i64(scores),
            current,
            game.metric,
            r,
            ty.prefs.clone(),
            ty.utilities_or_default(),
        )?
    } else {
        ViewPoint::nonatomic(
            &scores.s,
            current,
            game.metric,
            r,
            ty.prefs.clone(),
            ty.utilities_or_default(),
        )?
    };
    Ok(view)
}

/// The belief ball and preferences through which `agent` sees `profile`
/// at step `t`; None when the agent index is out of range.
pub fn agent_view(
    game: &Game,
    profile: &Profile,
    agent: usize,
    t: usize,
) -> Result<Option<ViewPoint>, DynamicsError> {
    let Some(ty) = agent_type(&game.population, agent) else {
        return Ok(None);
    };
    let Some(current) = agent_vote(&game.population, profile, agent) else {
        return Ok(None);
    };
    let scores = game.scores(profile)?;
    Ok(Some(build_view(game, &scores, ty, current, t)?))
}

fn agent_response<R: Rng>(
    game: &Game,
    scores: &ScoreVector,
    profile: &Profile,
    agent: usize,
    t: usize,
    weak_policy: WeakLdPolicy,
    rng: &mut R,
) -> Result<Option<(CandidateId, CandidateId)>, DynamicsError> {
    let ty = agent_type(&game.population, agent).expect("agent in range");
    let current = agent_vote(&game.population, profile, agent).expect("agent in range");
    let view = build_view(game, scores, ty, current, t)?;
    let resp = match ty.behavior {
        Behavior::StrictLd => strict_ld_response(&view)?,
        Behavior::WeakLd => weak_ld_response(&view, weak_policy, rng)?,
        Behavior::Wcr => wcr_response(&view)?,
    };
    Ok(resp.filter(|&to| to != current).map(|to| (current, to)))
}

/// An agent that wants to change its vote, under deterministic witness
/// rules (weak local dominance witnesses with its least preferred move).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveWish {
    pub agent: usize,
    pub from: CandidateId,
    pub to: CandidateId,
}

/// First agent, by index, that wants to move at step t; None means the
/// profile is an equilibrium for the radii in force at t.
pub fn equilibrium_witness(
    game: &Game,
    profile: &Profile,
    t: usize,
) -> Result<Option<MoveWish>, DynamicsError> {
    if !is_eps_valid(&game.population, profile) {
        return Err(DynamicsError::BadInitial);
    }
    let scores = game.scores(profile)?;
    let mut rng = ChaCha12Rng::seed_from_u64(0);
    for agent in 0..game.population.agent_count() {
        if let Some((from, to)) =
            agent_response(game, &scores, profile, agent, t, WeakLdPolicy::Adversarial, &mut rng)?
        {
            return Ok(Some(MoveWish { agent, from, to }));
        }
    }
    Ok(None)
}

pub fn is_equilibrium(game: &Game, profile: &Profile, t: usize) -> Result<bool, DynamicsError> {
    Ok(equilibrium_witness(game, profile, t)?.is_none())
}

fn apply_move(profile: &mut Profile, population: &Population, agent: usize, to: CandidateId) {
    match profile {
        Profile::Atomic(votes) => votes[agent] = to,
        Profile::Nonatomic(counts) => {
            let ti = type_index(population, agent).expect("agent in range");
            let from = agent_vote(population, &Profile::Nonatomic(counts.clone()), agent)
                .expect("agent in range");
            counts[ti][from] -= 1;
            counts[ti][to] += 1;
        }
    }
}

/// Apply one step: activate agents per the scheduler, evaluate all
/// activated agents against the pre-step state, then apply their moves.
/// Returns the records, which share this step's post-move winner.
#[allow(clippy::too_many_arguments)]
fn execute_step(
    game: &Game,
    profile: &mut Profile,
    t: usize,
    config: &RunConfig,
    round_robin_ptr: &mut usize,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<MoveRecord>, DynamicsError> {
    let n = game.population.agent_count();
    let scores = game.scores(profile)?;
    let mut staged: Vec<(usize, CandidateId, CandidateId)> = Vec::new();
    match &config.scheduler {
        Scheduler::SingletonFirstFound => {
            for agent in 0..n {
                if let Some((from, to)) = agent_response(
                    game, &scores, profile, agent, t, config.weak_ld_policy, rng,
                )? {
                    staged.push((agent, from, to));
                    break;
                }
            }
        }
        Scheduler::SingletonRoundRobin => {
            for k in 0..n {
                let agent = (*round_robin_ptr + k) % n;
                if let Some((from, to)) = agent_response(
                    game, &scores, profile, agent, t, config.weak_ld_policy, rng,
                )? {
                    staged.push((agent, from, to));
                    *round_robin_ptr = (agent + 1) % n;
                    break;
                }
            }
        }
        Scheduler::SingletonRandom => {
            let mut wishes = Vec::new();
            for agent in 0..n {
                if let Some((from, to)) = agent_response(
                    game, &scores, profile, agent, t, config.weak_ld_policy, rng,
                )? {
                    wishes.push((agent, from, to));
                }
            }
            if !wishes.is_empty() {
                staged.push(wishes[rng.gen_range(0..wishes.len())]);
            }
        }
        Scheduler::SimultaneousAll => {
            for agent in 0..n {
                if let Some((from, to)) = agent_response(
                    game, &scores, profile, agent, t, config.weak_ld_policy, rng,
                )? {
                    staged.push((agent, from, to));
                }
            }
        }
        Scheduler::GroupRandom { p } => {
            let activated: Vec<usize> = (0..n).filter(|_| rng.gen_bool(*p)).collect();
            for agent in activated {
                if let Some((from, to)) = agent_response(
                    game, &scores, profile, agent, t, config.weak_ld_policy, rng,
                )? {
                    staged.push((agent, from, to));
                }
            }
        }
        Scheduler::Scripted { rounds } => {
            for &agent in &rounds[t] {
                if let Some((from, to)) = agent_response(
                    game, &scores, profile, agent, t, config.weak_ld_policy, rng,
                )? {
                    staged.push((agent, from, to));
                }
            }
        }
    }
    for &(agent, _, to) in &staged {
        apply_move(profile, &game.population, agent, to);
    }
    let winner_after = game.scores(profile)?.winner();
    staged
        .into_iter()
        .map(|(agent, from, to)| {
            let prefs = &agent_type(&game.population, agent).expect("in range").prefs;
            Ok(MoveRecord {
                step: t,
                agent,
                from,
                to,
                class: classify_move(prefs, from, to)?,
                winner_after,
            })
        })
        .collect()
}

fn radii_at(population: &Population, t: usize) -> Vec<Rat> {
    match &population.kind {
        PopulationKind::Atomic { voters } => voters.iter().map(|v| v.radius_at(t)).collect(),
        PopulationKind::Nonatomic { types, .. } => {
            types.iter().map(|ty| ty.ty.radius_at(t)).collect()
        }
    }
}

fn observer_possible_winners(
    game: &Game,
    scores: &ScoreVector,
    radii: &[Rat],
) -> Option<Vec<CandidateId>> {
    let first = radii.first()?;
    if radii.iter().any(|r| r != first) {
        return None;
    }
    let ball = BeliefBall::nonatomic(scores.s.clone(), game.metric, first.clone()).ok()?;
    Some(possible_winners(&ball))
}

/// True when activation and responses depend only on the current state,
/// so a revisited (votes, radii, cursor) state repeats forever.
fn is_deterministic(game: &Game, config: &RunConfig) -> bool {
    let scheduler_det = matches!(
        config.scheduler,
        Scheduler::SingletonFirstFound
            | Scheduler::SingletonRoundRobin
            | Scheduler::SimultaneousAll
            | Scheduler::Scripted { .. }
    );
    if !scheduler_det {
        return false;
    }
    if config.weak_ld_policy == WeakLdPolicy::Uniform {
        let any_weak = match &game.population.kind {
            PopulationKind::Atomic { voters } => {
                voters.iter().any(|v| v.behavior == Behavior::WeakLd)
            }
            PopulationKind::Nonatomic { types, .. } => {
                types.iter().any(|ty| ty.ty.behavior == Behavior::WeakLd)
            }
        };
        if any_weak {
            return false;
        }
    }
    true
}

/// Run the dynamics from an initial profile until an outcome is reached.
///
/// Each iteration records the boundary state, then checks in order:
/// equilibrium at the current radii, recurrence of the (votes, radii,
/// round-robin cursor) state, script exhaustion, and the step limit.
/// Recurrence is only checked for deterministic runs; under random
/// activation or uniform weak-response sampling a revisit proves
/// nothing, so those runs end at equilibrium or the step limit.
pub fn run(game: &Game, initial: &Profile, config: &RunConfig) -> Result<Trace, DynamicsError> {
    if !is_eps_valid(&game.population, initial) {
        return Err(DynamicsError::BadInitial);
    }
    if let Scheduler::GroupRandom { p } = config.scheduler {
        if !(0.0..=1.0).contains(&p) {
            return Err(DynamicsError::BadProbability);
        }
    }
    let n = game.population.agent_count();
    if let Scheduler::Scripted { rounds } = &config.scheduler {
        for round in rounds {
            if let Some(&agent) = round.iter().find(|&&a| a >= n) {
                return Err(DynamicsError::BadScript { agent, n });
            }
        }
    }

    let mut profile = initial.clone();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut round_robin_ptr = 0usize;
    let deterministic = is_deterministic(game, config);
    let mut seen: HashMap<(Profile, Vec<Rat>, usize), usize> = HashMap::new();
    let mut moves = Vec::new();
    let mut winners = Vec::new();
    let mut winner_scores = Vec::new();
    let mut possible = Vec::new();
    let mut profiles = Vec::new();

    let mut t = 0usize;
    let outcome = loop {
        let scores = game.scores(&profile)?;
        let radii = radii_at(&game.population, t);
        winners.push(scores.winner());
        winner_scores.push(scores.s[scores.winner()].clone());
        possible.push(observer_possible_winners(game, &scores, &radii));
        profiles.push(profile.clone());

        if equilibrium_witness(game, &profile, t)?.is_none() {
            break Outcome::Equilibrium;
        }
        if deterministic {
            let key = (profile.clone(), radii, round_robin_ptr);
            if let Some(&start) = seen.get(&key) {
                break Outcome::Cycle { period: t - start, start };
            }
            seen.insert(key, t);
        }
        if let Scheduler::Scripted { rounds } = &config.scheduler {
            if t >= rounds.len() {
                break Outcome::ScriptExhausted;
            }
        }
        if t >= config.step_limit {
            break Outcome::StepLimit;
        }

        let step_moves = execute_step(game, &mut profile, t, config, &mut round_robin_ptr, &mut rng)?;
        moves.extend(step_moves);
        t += 1;
    };

    Ok(Trace {
        moves,
        outcome,
        winners,
        winner_scores,
        possible_winners: possible,
        profiles,
        final_profile: profile,
    })
}

/// Invariants of truthful-start runs with shared radii: the possible
/// winner set only shrinks, the winning score never drops, every move is
/// a compromise, and every cast vote is its owner's favourite possible
/// winner or not a possible winner at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthfulInvariants {
    pub possible_winners_shrink: bool,
    pub winner_score_monotone: bool,
    pub all_compromise: bool,
    pub votes_top_of_w_or_outside: bool,
}

impl TruthfulInvariants {
    pub fn all_hold(&self) -> bool {
        self.possible_winners_shrink
            && self.winner_score_monotone
            && self.all_compromise
            && self.votes_top_of_w_or_outside
    }
}

pub fn check_truthful_invariants(
    game: &Game,
    trace: &Trace,
) -> Result<TruthfulInvariants, DynamicsError> {
    let series: Vec<&Vec<CandidateId>> = trace
        .possible_winners
        .iter()
        .map(|o| o.as_ref().ok_or(DynamicsError::NoWinnerSeries))
        .collect::<Result<_, _>>()?;
    let possible_winners_shrink =
        series.windows(2).all(|w| w[1].iter().all(|c| w[0].contains(c)));
    let winner_score_monotone =
        trace.winner_scores.windows(2).all(|w| w[1] >= w[0]);
    let all_compromise = trace.moves.iter().all(|mv| mv.class == MoveClass::Compromise);
    let mut votes_top_of_w_or_outside = true;
    for mv in &trace.moves {
        let w_t = series[mv.step];
        let prefs = &agent_type(&game.population, mv.agent)
            .expect("recorded agent exists")
            .prefs;
        let top = prefs.best_of(w_t.iter().copied());
        if w_t.contains(&mv.to) && Some(mv.to) != top {
            votes_top_of_w_or_outside = false;
        }
    }
    Ok(TruthfulInvariants {
        possible_winners_shrink,
        winner_score_monotone,
        all_compromise,
        votes_top_of_w_or_outside,
    })
}
