//! Brute-force ground truth and exhaustive search.
//!
//! Every routine here recomputes outcomes definitionally: plausible
//! states are enumerated one by one, and a winner is read off a raw
//! argmax under each tie-break permutation in turn. None of the
//! closed-form reasoning in `uncertainty` or `strategy` is consulted,
//! which makes these routines slow, small, and suitable as a second
//! opinion. `cross_validate` runs both routes over a whole family of
//! views and reports any disagreement with a reproducer.

use crate::dynamics::{is_equilibrium, DynamicsError, Game};
use crate::model::{rat, zero_rat, CandidateId, PopulationKind, PreferenceOrder, Rat, UtilityScale};
use crate::strategy::{StrategyAnalysis, ViewPoint};
use crate::uncertainty::{
    ball_enumerate, ball_state_count, possible_winners, tie_set_feasible, BeliefBall, Metric,
    UncertaintyError,
};
use itertools::Itertools;
use num::{One, Zero};
use rayon::prelude::*;
use std::collections::HashSet;
use thiserror::Error;

/// Default ceiling on enumerated states or permutations per query.
pub const ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("search space of {size} exceeds the cap of {cap}")]
    Refused { size: u128, cap: u128 },
    #[error("allowed-vote table does not match the population")]
    Shape,
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Size of a brute-force query before it runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSpace {
    pub states: u128,
    pub permutations: u128,
}

impl SearchSpace {
    pub fn total(&self) -> u128 {
        self.states.saturating_mul(self.permutations)
    }
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

pub fn search_space(ball: &BeliefBall) -> Result<SearchSpace, OracleError> {
    Ok(SearchSpace { states: ball_state_count(ball)?, permutations: factorial(ball.m()) })
}

fn argmax_mask(state: &[i64]) -> u32 {
    let top = *state.iter().max().expect("nonempty state");
    let mut mask = 0u32;
    for (c, &s) in state.iter().enumerate() {
        if s == top {
            mask |= 1 << c;
        }
    }
    mask
}

/// Argmax after the view's owner adds one point to candidate `x`.
fn vote_mask(state: &[i64], x: usize) -> u32 {
    let bump = |c: usize| state[c] + i64::from(c == x);
    let top = (0..state.len()).map(&bump).max().expect("nonempty state");
    let mut mask = 0u32;
    for c in 0..state.len() {
        if bump(c) == top {
            mask |= 1 << c;
        }
    }
    mask
}

/// Prefs-independent digest of an enumerated ball: every exact argmax
/// set that some state realizes, and every distinct per-vote outcome
/// tuple (the argmax sets after the owner votes each candidate).
#[derive(Debug, Clone)]
pub struct StateSummary {
    m: usize,
    raw_ties: Vec<u32>,
    vote_tuples: Vec<Vec<u32>>,
}

pub fn summarize_states(states: &[Vec<i64>], m: usize) -> StateSummary {
    assert!(m * m <= 128, "mask tuple key must fit u128");
    let mut raw: HashSet<u32> = HashSet::new();
    let mut seen: HashSet<u128> = HashSet::new();
    let mut vote_tuples = Vec::new();
    let mut scratch = vec![0u32; m];
    for state in states {
        raw.insert(argmax_mask(state));
        let mut key = 0u128;
        for (x, slot) in scratch.iter_mut().enumerate() {
            let mask = vote_mask(state, x);
            *slot = mask;
            key |= u128::from(mask) << (x * m);
        }
        if seen.insert(key) {
            vote_tuples.push(scratch.clone());
        }
    }
    let mut raw_ties: Vec<u32> = raw.into_iter().collect();
    raw_ties.sort_unstable();
    StateSummary { m, raw_ties, vote_tuples }
}

impl StateSummary {
    /// Candidates that win some state under some permutation when the
    /// owner votes for them.
    pub fn possible_winners(&self) -> Vec<CandidateId> {
        (0..self.m)
            .filter(|&c| self.vote_tuples.iter().any(|t| t[c] & (1 << c) != 0))
            .collect()
    }

    /// Bitmask per tie set that equals the exact argmax of some state.
    pub fn feasible_ties(&self) -> &[u32] {
        &self.raw_ties
    }

    /// Beats matrix and worst-case regret by trying every tie-break
    /// permutation against every distinct per-vote outcome tuple.
    pub fn evaluate(&self, prefs: &PreferenceOrder, utilities: &UtilityScale) -> Evaluation {
        let m = self.m;
        let perms: Vec<Vec<CandidateId>> = (0..m).permutations(m).collect();
        let mut beats = vec![vec![false; m]; m];
        let mut wcr = vec![zero_rat(); m];
        let mut winners = vec![0usize; m];
        for tuple in &self.vote_tuples {
            for q in &perms {
                for (x, w) in winners.iter_mut().enumerate() {
                    *w = q
                        .iter()
                        .copied()
                        .find(|&c| tuple[x] & (1 << c) != 0)
                        .expect("argmax mask is nonempty");
                }
                for x in 0..m {
                    for y in 0..m {
                        if x != y && !beats[x][y] && prefs.prefers(winners[x], winners[y]) {
                            beats[x][y] = true;
                        }
                    }
                }
                let best = winners.iter().map(|&w| &utilities.u[w]).max().expect("m > 0");
                for (b, slot) in wcr.iter_mut().enumerate() {
                    let reg = best - &utilities.u[winners[b]];
                    if reg > *slot {
                        *slot = reg;
                    }
                }
            }
        }
        Evaluation { beats, wcr }
    }
}

/// Prefs-dependent half of the ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub beats: Vec<Vec<bool>>,
    pub wcr: Vec<Rat>,
}

/// Definitional answers for one atomic view.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub possible_winners: Vec<CandidateId>,
    pub feasible_ties: Vec<u32>,
    pub beats: Vec<Vec<bool>>,
    pub wcr: Vec<Rat>,
}

pub fn ground_truth(view: &ViewPoint, cap: u128) -> Result<GroundTruth, OracleError> {
    let space = search_space(&view.ball)?;
    if space.states > cap {
        return Err(OracleError::Refused { size: space.states, cap });
    }
    if space.permutations > cap {
        return Err(OracleError::Refused { size: space.permutations, cap });
    }
    let states = ball_enumerate(&view.ball)?;
    let summary = summarize_states(&states, view.m());
    let eval = summary.evaluate(&view.prefs, &view.utilities);
    Ok(GroundTruth {
        possible_winners: summary.possible_winners(),
        feasible_ties: summary.raw_ties.clone(),
        beats: eval.beats,
        wcr: eval.wcr,
    })
}

/// Exhaustive scan of a finite profile space for voting equilibria.
#[derive(Debug, Clone)]
pub struct Census {
    pub profiles: u128,
    pub equilibria: Vec<crate::model::Profile>,
}

/// Every vote profile, all agents unrestricted.
pub fn equilibrium_census(game: &Game, t: usize, cap: u128) -> Result<Census, OracleError> {
    let all: Vec<CandidateId> = (0..game.m()).collect();
    let rows = match &game.population.kind {
        PopulationKind::Atomic { voters } => voters.len(),
        PopulationKind::Nonatomic { types, .. } => types.len(),
    };
    equilibrium_census_restricted(game, &vec![all; rows], t, cap)
}

/// Census over a restricted strategy space: `allowed[i]` lists the votes
/// available to atomic voter i, or to every block of nonatomic type i.
/// Useful when a dominance argument has already pruned the full space.
pub fn equilibrium_census_restricted(
    game: &Game,
    allowed: &[Vec<CandidateId>],
    t: usize,
    cap: u128,
) -> Result<Census, OracleError> {
    let m = game.m();
    if allowed.iter().any(|set| set.iter().any(|&c| c >= m)) {
        return Err(OracleError::Shape);
    }
    match &game.population.kind {
        PopulationKind::Atomic { voters } => {
            if allowed.len() != voters.len() {
                return Err(OracleError::Shape);
            }
            let total = checked_product(allowed.iter().map(|set| set.len() as u128));
            if total > cap {
                return Err(OracleError::Refused { size: total, cap });
            }
            let equilibria = scan_space(total, |mut idx| {
                let mut votes = vec![0; allowed.len()];
                for (i, set) in allowed.iter().enumerate().rev() {
                    votes[i] = set[(idx % set.len() as u128) as usize];
                    idx /= set.len() as u128;
                }
                crate::model::Profile::Atomic(votes)
            })
            .map(|profile| Ok(is_equilibrium(game, &profile, t)?.then_some(profile)))
            .collect::<Result<Vec<_>, OracleError>>()?;
            Ok(Census { profiles: total, equilibria: equilibria.into_iter().flatten().collect() })
        }
        PopulationKind::Nonatomic { types, .. } => {
            if allowed.len() != types.len() {
                return Err(OracleError::Shape);
            }
            let rows: Vec<Vec<Vec<u32>>> = types
                .iter()
                .zip(allowed)
                .map(|(ty, set)| compositions(ty.blocks, set, m))
                .collect();
            let total = checked_product(rows.iter().map(|r| r.len() as u128));
            if total > cap {
                return Err(OracleError::Refused { size: total, cap });
            }
            let equilibria = scan_space(total, |mut idx| {
                let mut counts = vec![Vec::new(); rows.len()];
                for (i, r) in rows.iter().enumerate().rev() {
                    counts[i] = r[(idx % r.len() as u128) as usize].clone();
                    idx /= r.len() as u128;
                }
                crate::model::Profile::Nonatomic(counts)
            })
            .map(|profile| Ok(is_equilibrium(game, &profile, t)?.then_some(profile)))
            .collect::<Result<Vec<_>, OracleError>>()?;
            Ok(Census { profiles: total, equilibria: equilibria.into_iter().flatten().collect() })
        }
    }
}

fn checked_product<I: Iterator<Item = u128>>(factors: I) -> u128 {
    factors.fold(1u128, |acc, k| acc.checked_mul(k).unwrap_or(u128::MAX))
}

fn scan_space<F>(total: u128, decode: F) -> impl ParallelIterator<Item = crate::model::Profile>
where
    F: Fn(u128) -> crate::model::Profile + Sync + Send,
{
    (0..total as u64).into_par_iter().map(move |idx| decode(u128::from(idx)))
}

/// All ways to spread `blocks` indistinguishable blocks over the allowed
/// candidates, as full-width count rows.
fn compositions(blocks: u32, allowed: &[CandidateId], m: usize) -> Vec<Vec<u32>> {
    if allowed.is_empty() {
        return if blocks == 0 { vec![vec![0; m]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut row = vec![0u32; m];
    fn rec(slots: &[CandidateId], left: u32, row: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots.len() == 1 {
            row[slots[0]] = left;
            out.push(row.clone());
            row[slots[0]] = 0;
            return;
        }
        for k in 0..=left {
            row[slots[0]] = k;
            rec(&slots[1..], left - k, row, out);
        }
        row[slots[0]] = 0;
    }
    rec(allowed, blocks, &mut row, &mut out);
    out
}

/// A family of atomic views to compare across both routes.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    /// Candidate counts 2..=max_m are covered.
    pub max_m: usize,
    /// Center coordinates range over 0..=max_score.
    pub max_score: i64,
    pub radii: Vec<Rat>,
    pub metrics: Vec<Metric>,
    /// Per-ball state ceiling; larger balls are counted as refused.
    pub state_cap: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MismatchKind {
    PossibleWinners { ours: Vec<CandidateId>, brute: Vec<CandidateId> },
    TieSet { tie: Vec<CandidateId>, ours: bool, brute: bool },
    Beats { x: CandidateId, y: CandidateId, ours: bool, brute: bool },
    Dominates { x: CandidateId, y: CandidateId, ours: bool, brute: bool },
    Wcr { b: CandidateId, ours: Rat, brute: Rat },
}

/// Enough to rebuild the failing view verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub center: Vec<i64>,
    pub metric: Metric,
    pub radius: Rat,
    pub prefs: Option<Vec<CandidateId>>,
    pub kind: MismatchKind,
}

#[derive(Debug, Clone, Default)]
pub struct CrossValidation {
    pub balls: u64,
    pub cases: u64,
    pub states: u128,
    pub refused: u64,
    pub mismatch_count: u64,
    /// First few mismatches, enough to reproduce; the count above is complete.
    pub mismatches: Vec<Mismatch>,
    /// Multiplicative atomic balls where the integer-rounded ranges admit
    /// a different possible-winner set than the unrounded thresholds
    /// would. Informational: the rounded ranges are the committed
    /// semantics, this counts how often the two readings part ways.
    pub rounding_gaps: u64,
    pub rounding_gap_example: Option<(Vec<i64>, Rat)>,
}

const KEPT_MISMATCHES: usize = 64;

/// Run the closed-form route and the brute-force route over every view in
/// the family and collect disagreements on possible winners, exact-tie
/// feasibility, beats, dominance, and worst-case regret.
pub fn cross_validate(spec: &FamilySpec) -> Result<CrossValidation, OracleError> {
    let mut balls: Vec<(Vec<i64>, Metric, Rat)> = Vec::new();
    for m in 2..=spec.max_m {
        let axis: Vec<i64> = (0..=spec.max_score).collect();
        for center in (0..m).map(|_| axis.clone()).multi_cartesian_product() {
            for &metric in &spec.metrics {
                for r in &spec.radii {
                    balls.push((center.clone(), metric, r.clone()));
                }
            }
        }
    }
    let reports = balls
        .into_par_iter()
        .map(|(center, metric, radius)| validate_ball(spec, center, metric, radius))
        .collect::<Result<Vec<_>, OracleError>>()?;
    let mut out = CrossValidation::default();
    for report in reports {
        out.balls += 1;
        out.cases += report.cases;
        out.states += report.states;
        out.refused += u64::from(report.refused);
        out.mismatch_count += report.mismatches.len() as u64;
        for mm in report.mismatches {
            if out.mismatches.len() < KEPT_MISMATCHES {
                out.mismatches.push(mm);
            }
        }
        if report.rounding_gap {
            out.rounding_gaps += 1;
            if out.rounding_gap_example.is_none() {
                out.rounding_gap_example = Some((report.center, report.radius));
            }
        }
    }
    Ok(out)
}

struct BallReport {
    center: Vec<i64>,
    metric: Metric,
    radius: Rat,
    cases: u64,
    states: u128,
    refused: bool,
    mismatches: Vec<Mismatch>,
    rounding_gap: bool,
}

fn pref_orders(m: usize) -> Vec<PreferenceOrder> {
    let identity: Vec<CandidateId> = (0..m).collect();
    let reversed: Vec<CandidateId> = (0..m).rev().collect();
    let rotated: Vec<CandidateId> = (0..m).map(|c| (c + 1) % m).collect();
    let mut orders = Vec::new();
    for cand in [identity, reversed, rotated] {
        if !orders.iter().any(|p: &PreferenceOrder| p.order() == cand) {
            orders.push(PreferenceOrder::new(cand).expect("permutation by construction"));
        }
    }
    orders
}

fn validate_ball(
    spec: &FamilySpec,
    center: Vec<i64>,
    metric: Metric,
    radius: Rat,
) -> Result<BallReport, OracleError> {
    let m = center.len();
    let ball = BeliefBall::atomic(center.clone(), metric, radius.clone())?;
    let mut report = BallReport {
        center,
        metric,
        radius,
        cases: 0,
        states: 0,
        refused: false,
        mismatches: Vec::new(),
        rounding_gap: false,
    };
    let states_n = ball_state_count(&ball)?;
    if states_n > spec.state_cap {
        report.refused = true;
        return Ok(report);
    }
    report.states = states_n;
    let states = ball_enumerate(&ball)?;
    let summary = summarize_states(&states, m);

    let ours_w = possible_winners(&ball);
    let brute_w = summary.possible_winners();
    if ours_w != brute_w {
        report.push(None, MismatchKind::PossibleWinners { ours: ours_w.clone(), brute: brute_w });
    }

    for mask in 1u32..(1 << m) {
        let tie: Vec<CandidateId> = (0..m).filter(|&c| mask & (1 << c) != 0).collect();
        let ours = tie_set_feasible(&ball, &tie)?;
        let brute = summary.feasible_ties().contains(&mask);
        if ours != brute {
            report.push(None, MismatchKind::TieSet { tie, ours, brute });
        }
    }
    report.cases += 1;

    for prefs in pref_orders(m) {
        let utilities = UtilityScale::borda(&prefs);
        let ours = StrategyAnalysis::from_states(&states, &prefs, &utilities);
        let brute = summary.evaluate(&prefs, &utilities);
        for x in 0..m {
            for y in 0..m {
                if x == y {
                    continue;
                }
                if ours.beats[x][y] != brute.beats[x][y] {
                    report.push(
                        Some(prefs.order().to_vec()),
                        MismatchKind::Beats { x, y, ours: ours.beats[x][y], brute: brute.beats[x][y] },
                    );
                }
                let ours_dom = ours.beats[x][y] && !ours.beats[y][x];
                let brute_dom = brute.beats[x][y] && !brute.beats[y][x];
                if ours_dom != brute_dom {
                    report.push(
                        Some(prefs.order().to_vec()),
                        MismatchKind::Dominates { x, y, ours: ours_dom, brute: brute_dom },
                    );
                }
            }
        }
        for b in 0..m {
            if ours.wcr[b] != brute.wcr[b] {
                report.push(
                    Some(prefs.order().to_vec()),
                    MismatchKind::Wcr { b, ours: ours.wcr[b].clone(), brute: brute.wcr[b].clone() },
                );
            }
        }
        report.cases += 1;
    }

    if ball.metric() == Metric::Multiplicative {
        report.rounding_gap = threshold_winners(&ball) != ours_w;
    }
    Ok(report)
}

impl BallReport {
    fn push(&mut self, prefs: Option<Vec<CandidateId>>, kind: MismatchKind) {
        self.mismatches.push(Mismatch {
            center: self.center.clone(),
            metric: self.metric,
            radius: self.radius.clone(),
            prefs,
            kind,
        });
    }
}

/// Possible winners a multiplicative ball would have if scores were not
/// rounded to integers: hi(c) + 1 >= lo(x) on the raw rational ranges.
fn threshold_winners(ball: &BeliefBall) -> Vec<CandidateId> {
    let m = ball.m();
    let one_plus_r = rat(1) + ball.radius();
    let lo = |c: usize| {
        if ball.center()[c].is_zero() {
            zero_rat()
        } else {
            &ball.center()[c] / &one_plus_r
        }
    };
    let hi = |c: usize| &ball.center()[c] * &one_plus_r;
    (0..m)
        .filter(|&c| {
            let reach = hi(c) + Rat::one();
            (0..m).filter(|&x| x != c).map(lo).all(|bar| reach >= bar)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Game;
    use crate::model::{
        Behavior, NonatomicType, Population, PopulationKind, Profile, TieBreak, VoterType,
    };
    use crate::strategy::wcr_values;

    fn prefs(order: &[CandidateId]) -> PreferenceOrder {
        PreferenceOrder::new(order.to_vec()).unwrap()
    }

    fn view(full: &[i64], own: CandidateId, r: i64, order: &[CandidateId]) -> ViewPoint {
        let p = prefs(order);
        let u = UtilityScale::borda(&p);
        ViewPoint::atomic(full, own, Metric::LInf, rat(r), p, u).unwrap()
    }

    fn swap_game() -> Game {
        let voters = vec![
            VoterType::new(prefs(&[1, 2, 0]), rat(1), Behavior::StrictLd).unwrap(),
            VoterType::new(prefs(&[2, 1, 0]), rat(1), Behavior::StrictLd).unwrap(),
        ];
        Game::new(
            Population {
                base_scores: vec![rat(5), rat(1), rat(1)],
                kind: PopulationKind::Atomic { voters },
            },
            Metric::LInf,
            TieBreak::lexicographic(3),
        )
        .unwrap()
    }

    fn cycle_game() -> Game {
        let voters = vec![
            VoterType::new(prefs(&[1, 0, 2, 3]), rat(2), Behavior::Wcr).unwrap(),
            VoterType::new(prefs(&[2, 1, 0, 3]), rat(4), Behavior::Wcr).unwrap(),
        ];
        Game::new(
            Population {
                base_scores: vec![rat(9), rat(4), rat(0), rat(9)],
                kind: PopulationKind::Atomic { voters },
            },
            Metric::LInf,
            TieBreak::lexicographic(4),
        )
        .unwrap()
    }

    #[test]
    fn ground_truth_agrees_with_closed_forms_on_small_views() {
        for v in [view(&[9, 5, 1, 9], 1, 2, &[1, 0, 2, 3]), view(&[10, 4, 1, 9], 2, 4, &[2, 1, 0, 3])] {
            let gt = ground_truth(&v, ENUMERATION_CAP).unwrap();
            let ours = StrategyAnalysis::atomic(&v).unwrap();
            assert_eq!(gt.beats, ours.beats);
            assert_eq!(gt.wcr, wcr_values(&v).unwrap());
            assert_eq!(gt.possible_winners, possible_winners(&v.ball));
            for mask in 1u32..(1 << v.m()) {
                let tie: Vec<CandidateId> =
                    (0..v.m()).filter(|&c| mask & (1 << c) != 0).collect();
                assert_eq!(
                    gt.feasible_ties.contains(&mask),
                    tie_set_feasible(&v.ball, &tie).unwrap(),
                    "tie {tie:?}"
                );
            }
        }
    }

    #[test]
    fn ground_truth_refuses_oversized_spaces() {
        let v = view(&[9, 5, 1, 9], 1, 2, &[1, 0, 2, 3]);
        match ground_truth(&v, 3) {
            Err(OracleError::Refused { size, cap: 3 }) => assert!(size > 3),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn census_finds_the_stable_profiles_of_the_swap_game() {
        // Off-diagonal profiles are unstable: the voter parked on a sees
        // the other voter's candidate within one point of the leader and
        // deviates to it.
        let census = equilibrium_census(&swap_game(), 0, ENUMERATION_CAP).unwrap();
        assert_eq!(census.profiles, 9);
        let expect: Vec<Profile> =
            [[0, 0], [1, 1], [2, 2]].iter().map(|v| Profile::Atomic(v.to_vec())).collect();
        assert_eq!(census.equilibria, expect);
    }

    #[test]
    fn restricted_census_scans_only_the_allowed_votes() {
        let allowed = vec![vec![2], vec![0, 2]];
        let census =
            equilibrium_census_restricted(&swap_game(), &allowed, 0, ENUMERATION_CAP).unwrap();
        assert_eq!(census.profiles, 2);
        assert_eq!(census.equilibria, vec![Profile::Atomic(vec![2, 2])]);
    }

    #[test]
    fn census_of_the_regret_cycle_game_is_empty() {
        let census = equilibrium_census(&cycle_game(), 0, ENUMERATION_CAP).unwrap();
        assert_eq!(census.profiles, 16);
        assert!(census.equilibria.is_empty());
    }

    #[test]
    fn nonatomic_census_walks_block_splits() {
        let ty = NonatomicType {
            ty: VoterType::new(prefs(&[1, 0]), rat(0), Behavior::StrictLd).unwrap(),
            blocks: 2,
        };
        let game = Game::new(
            Population {
                base_scores: vec![rat(5), rat(0)],
                kind: PopulationKind::Nonatomic { types: vec![ty], epsilon: rat(1) },
            },
            Metric::LInf,
            TieBreak::lexicographic(2),
        )
        .unwrap();
        let census = equilibrium_census(&game, 0, ENUMERATION_CAP).unwrap();
        assert_eq!(census.profiles, 3);
        assert_eq!(census.equilibria.len(), 3);
    }

    #[test]
    fn census_refuses_oversized_spaces() {
        match equilibrium_census(&cycle_game(), 0, 10) {
            Err(OracleError::Refused { size: 16, cap: 10 }) => {}
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn tiny_family_cross_validates_cleanly() {
        let spec = FamilySpec {
            max_m: 2,
            max_score: 3,
            radii: vec![rat(0), rat(1)],
            metrics: vec![Metric::LInf, Metric::Multiplicative, Metric::L1],
            state_cap: ENUMERATION_CAP,
        };
        let report = cross_validate(&spec).unwrap();
        assert_eq!(report.mismatch_count, 0, "{:?}", report.mismatches.first());
        assert_eq!(report.balls, 16 * 6);
        assert_eq!(report.refused, 0);
        assert!(report.states > 0);
    }
}
