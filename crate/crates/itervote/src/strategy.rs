//! Single-voter strategic reasoning against a belief ball: outcome
//! comparison between two votes, dominance, local-dominance move sets,
//! and worst-case regret.
//!
//! The tie-break permutation is existentially quantified and shared
//! between the two sides of every comparison: "x beats y" means some
//! ball state and some permutation make x's outcome strictly better
//! while y is evaluated under that same state and permutation.

use crate::model::{rat, CandidateId, PreferenceOrder, Rat, UtilityScale};
use crate::uncertainty::{
    ball_enumerate, possible_winners, tie_set_feasible, BeliefBall, Metric, UncertaintyError,
};
use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error("view components disagree on the number of candidates")]
    Shape,
    #[error("candidate out of range")]
    BadCandidate,
    #[error("state shape does not match the view")]
    BadState,
}

/// One voter's picture of the election: what they believe about the
/// scores with their own vote excluded (atomic) or the full observed
/// scores (nonatomic), plus how they rank and value candidates and what
/// they currently vote.
#[derive(Debug, Clone)]
pub struct ViewPoint {
    pub ball: BeliefBall,
    pub prefs: PreferenceOrder,
    pub utilities: UtilityScale,
    pub current: CandidateId,
}

impl ViewPoint {
    pub fn new(
        ball: BeliefBall,
        prefs: PreferenceOrder,
        utilities: UtilityScale,
        current: CandidateId,
    ) -> Result<Self, StrategyError> {
        let m = ball.m();
        if prefs.m() != m || utilities.u.len() != m {
            return Err(StrategyError::Shape);
        }
        if current >= m {
            return Err(StrategyError::BadCandidate);
        }
        if !utilities.fits(&prefs) {
            return Err(StrategyError::Shape);
        }
        Ok(ViewPoint { ball, prefs, utilities, current })
    }

    /// Atomic view from the full scores: the voter's own vote is removed
    /// from the center and re-added by every query.
    pub fn atomic(
        full_scores: &[i64],
        own_vote: CandidateId,
        metric: Metric,
        radius: Rat,
        prefs: PreferenceOrder,
        utilities: UtilityScale,
    ) -> Result<Self, StrategyError> {
        if own_vote >= full_scores.len() || full_scores[own_vote] < 1 {
            return Err(StrategyError::BadCandidate);
        }
        let mut center = full_scores.to_vec();
        center[own_vote] -= 1;
        let ball = BeliefBall::atomic(center, metric, radius)?;
        ViewPoint::new(ball, prefs, utilities, own_vote)
    }

    /// Nonatomic view: the block is measure zero, so the center is the
    /// observed scores as they stand.
    pub fn nonatomic(
        scores: &[Rat],
        current: CandidateId,
        metric: Metric,
        radius: Rat,
        prefs: PreferenceOrder,
        utilities: UtilityScale,
    ) -> Result<Self, StrategyError> {
        let ball = BeliefBall::nonatomic(scores.to_vec(), metric, radius)?;
        ViewPoint::new(ball, prefs, utilities, current)
    }

    pub fn m(&self) -> usize {
        self.ball.m()
    }
}

/// Winner set after the view's owner casts `vote` at one plausible state,
/// before the tie-break picks among it.
///
/// An atomic vote adds a full point; a nonatomic vote only tips an exact
/// tie toward the voted candidate.
pub fn modified_outcome(
    view: &ViewPoint,
    state: &[Rat],
    vote: CandidateId,
) -> Result<Vec<CandidateId>, StrategyError> {
    let m = view.m();
    if state.len() != m {
        return Err(StrategyError::BadState);
    }
    if vote >= m {
        return Err(StrategyError::BadCandidate);
    }
    if view.ball.is_atomic() {
        let mut s = state.to_vec();
        s[vote] += rat(1);
        let mx = s.iter().max().expect("nonempty").clone();
        Ok((0..m).filter(|&c| s[c] == mx).collect())
    } else {
        let mx = state.iter().max().expect("nonempty");
        let argmax: Vec<CandidateId> = (0..m).filter(|&c| &state[c] == mx).collect();
        if argmax.contains(&vote) {
            Ok(vec![vote])
        } else {
            Ok(argmax)
        }
    }
}

/// Top-score and runner-up bitmasks of one integer state.
fn level_masks(state: &[i64]) -> (u32, u32) {
    let t = *state.iter().max().expect("nonempty");
    let mut top = 0u32;
    let mut near = 0u32;
    for (c, &x) in state.iter().enumerate() {
        if x == t {
            top |= 1 << c;
        } else if x + 1 == t {
            near |= 1 << c;
        }
    }
    (top, near)
}

/// Argmax mask after voting x: a top candidate wins outright, a runner-up
/// joins the tie, anything else leaves the tie unchanged.
fn outcome_mask(top: u32, near: u32, x: usize) -> u32 {
    if top & (1 << x) != 0 {
        1 << x
    } else if near & (1 << x) != 0 {
        top | (1 << x)
    } else {
        top
    }
}

/// Whether some shared tie-break makes the `a` outcome strictly better
/// than the `b` outcome. The pair (p, q) is jointly realizable unless p
/// also ties in b and q also ties in a, which would need p and q to each
/// precede the other.
fn mask_beats(a: u32, b: u32, prefs: &PreferenceOrder) -> bool {
    let m = prefs.m();
    for p in 0..m {
        if a & (1 << p) == 0 {
            continue;
        }
        for q in 0..m {
            if b & (1 << q) == 0 || p == q || !prefs.prefers(p, q) {
                continue;
            }
            if !(b & (1 << p) != 0 && a & (1 << q) != 0) {
                return true;
            }
        }
    }
    false
}

fn mask_best_utility(mask: u32, u: &UtilityScale) -> Rat {
    (0..u.u.len())
        .filter(|&c| mask & (1 << c) != 0)
        .map(|c| u.u[c].clone())
        .max()
        .expect("nonempty mask")
}

fn mask_worst_utility(mask: u32, u: &UtilityScale) -> Rat {
    (0..u.u.len())
        .filter(|&c| mask & (1 << c) != 0)
        .map(|c| u.u[c].clone())
        .min()
        .expect("nonempty mask")
}

/// Worst-case regret of voting b at one state, maximized over shared
/// tie-breaks: the adversary realizes the best achievable alternative
/// winner (any top candidate outright, or any runner-up other than b via
/// precedence) while steering b's own tie to its least preferred member.
fn mask_regret(top: u32, near: u32, b: usize, u: &UtilityScale) -> Rat {
    let alternative = top | (near & !(1 << b));
    let own = outcome_mask(top, near, b);
    let best = mask_best_utility(alternative, u);
    let worst = mask_worst_utility(own, u);
    if best > worst {
        best - worst
    } else {
        Rat::zero()
    }
}

/// Beats matrix and per-vote worst-case regret for an atomic view,
/// computed in one pass over the ball.
///
/// States collapse onto their (top, runner-up) mask pair first; every
/// comparison and regret value depends only on that pair, so the
/// per-permutation work runs once per distinct pair instead of once per
/// state.
#[derive(Debug, Clone)]
pub struct StrategyAnalysis {
    pub beats: Vec<Vec<bool>>,
    pub wcr: Vec<Rat>,
}

impl StrategyAnalysis {
    pub fn atomic(view: &ViewPoint) -> Result<Self, StrategyError> {
        let states = ball_enumerate(&view.ball)?;
        Ok(Self::from_states(&states, &view.prefs, &view.utilities))
    }

    /// Analysis over an explicit list of plausible pre-vote states. Lets a
    /// caller that already enumerated a ball reuse the states for several
    /// preference orders.
    pub fn from_states(
        states: &[Vec<i64>],
        prefs: &PreferenceOrder,
        utilities: &UtilityScale,
    ) -> Self {
        let m = prefs.m();
        let mut pairs: HashSet<(u32, u32)> = HashSet::new();
        for state in states {
            pairs.insert(level_masks(state));
        }
        let mut beats = vec![vec![false; m]; m];
        let mut wcr = vec![Rat::zero(); m];
        for (top, near) in pairs {
            let masks: Vec<u32> = (0..m).map(|x| outcome_mask(top, near, x)).collect();
            for x in 0..m {
                for y in 0..m {
                    if x != y && !beats[x][y] && mask_beats(masks[x], masks[y], prefs) {
                        beats[x][y] = true;
                    }
                }
            }
            for b in 0..m {
                let reg = mask_regret(top, near, b, utilities);
                if reg > wcr[b] {
                    wcr[b] = reg;
                }
            }
        }
        StrategyAnalysis { beats, wcr }
    }
}

/// All feasible exact-tie sets of a nonatomic ball, as bitmasks.
fn feasible_tie_masks(ball: &BeliefBall) -> Result<Vec<u32>, StrategyError> {
    let m = ball.m();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let tie: Vec<CandidateId> = (0..m).filter(|&c| mask & (1 << c) != 0).collect();
        if tie_set_feasible(ball, &tie)? {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Nonatomic beats test over one exact tie: a vote for a tied candidate
/// wins it the tie, a vote elsewhere leaves the tie to the shared
/// permutation.
fn tie_mask_beats(mask: u32, x: usize, y: usize, prefs: &PreferenceOrder) -> bool {
    let m = prefs.m();
    let x_in = mask & (1 << x) != 0;
    let y_in = mask & (1 << y) != 0;
    if x_in && y_in {
        prefs.prefers(x, y)
    } else if x_in {
        (0..m).any(|c| c != x && mask & (1 << c) != 0 && prefs.prefers(x, c))
    } else if y_in {
        (0..m).any(|c| c != y && mask & (1 << c) != 0 && prefs.prefers(c, y))
    } else {
        false
    }
}

fn full_beats_matrix(view: &ViewPoint) -> Result<Vec<Vec<bool>>, StrategyError> {
    if view.ball.is_atomic() {
        Ok(StrategyAnalysis::atomic(view)?.beats)
    } else {
        let m = view.m();
        let masks = feasible_tie_masks(&view.ball)?;
        let mut beats = vec![vec![false; m]; m];
        for &mask in &masks {
            for x in 0..m {
                for y in 0..m {
                    if x != y && !beats[x][y] && tie_mask_beats(mask, x, y, &view.prefs) {
                        beats[x][y] = true;
                    }
                }
            }
        }
        Ok(beats)
    }
}

/// Whether voting x yields a strictly better outcome than voting y under
/// some plausible state and some shared tie-break.
pub fn s_beats(view: &ViewPoint, x: CandidateId, y: CandidateId) -> Result<bool, StrategyError> {
    let m = view.m();
    if x >= m || y >= m {
        return Err(StrategyError::BadCandidate);
    }
    if x == y {
        return Ok(false);
    }
    Ok(full_beats_matrix(view)?[x][y])
}

/// x dominates y: x sometimes beats y and y never beats x.
pub fn s_dominates(
    view: &ViewPoint,
    x: CandidateId,
    y: CandidateId,
) -> Result<bool, StrategyError> {
    let beats = full_beats_matrix(view)?;
    let m = view.m();
    if x >= m || y >= m {
        return Err(StrategyError::BadCandidate);
    }
    Ok(x != y && beats[x][y] && !beats[y][x])
}

/// Candidates that dominate the current vote and are themselves
/// undominated, sorted most preferred first. Empty means stay put.
pub fn ld_move_set(view: &ViewPoint) -> Result<Vec<CandidateId>, StrategyError> {
    let m = view.m();
    let beats = full_beats_matrix(view)?;
    let dom = |x: usize, y: usize| x != y && beats[x][y] && !beats[y][x];
    let dominated: Vec<bool> =
        (0..m).map(|d| (0..m).any(|e| dom(e, d))).collect();
    let mut moves: Vec<CandidateId> =
        (0..m).filter(|&d| dom(d, view.current) && !dominated[d]).collect();
    moves.sort_by_key(|&c| view.prefs.rank(c));
    Ok(moves)
}

/// Strict local dominance: most preferred candidate in the move set.
pub fn strict_ld_response(view: &ViewPoint) -> Result<Option<CandidateId>, StrategyError> {
    Ok(ld_move_set(view)?.first().copied())
}

/// How weak local dominance picks among admissible moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeakLdPolicy {
    /// Least preferred admissible move.
    Adversarial,
    /// Uniform draw from the move set.
    Uniform,
}

pub fn weak_ld_response<R: Rng>(
    view: &ViewPoint,
    policy: WeakLdPolicy,
    rng: &mut R,
) -> Result<Option<CandidateId>, StrategyError> {
    let moves = ld_move_set(view)?;
    Ok(match policy {
        WeakLdPolicy::Adversarial => moves.last().copied(),
        WeakLdPolicy::Uniform => moves.choose(rng).copied(),
    })
}

/// Worst-case regret of voting b at one integer state of an atomic view.
pub fn state_regret(
    view: &ViewPoint,
    state: &[i64],
    b: CandidateId,
) -> Result<Rat, StrategyError> {
    if !view.ball.is_atomic() {
        return Err(StrategyError::from(UncertaintyError::AtomicOnly));
    }
    if state.len() != view.m() || state.iter().any(|&x| x < 0) {
        return Err(StrategyError::BadState);
    }
    if b >= view.m() {
        return Err(StrategyError::BadCandidate);
    }
    let (top, near) = level_masks(state);
    Ok(mask_regret(top, near, b, &view.utilities))
}

/// Worst-case regret of every vote over the whole ball.
pub fn wcr_values(view: &ViewPoint) -> Result<Vec<Rat>, StrategyError> {
    if view.ball.is_atomic() {
        Ok(StrategyAnalysis::atomic(view)?.wcr)
    } else {
        let m = view.m();
        let u = &view.utilities;
        let mut vals = vec![Rat::zero(); m];
        for &mask in &feasible_tie_masks(&view.ball)? {
            let best = mask_best_utility(mask, u);
            let worst = mask_worst_utility(mask, u);
            for (b, val) in vals.iter_mut().enumerate() {
                let actual =
                    if mask & (1 << b) != 0 { u.u[b].clone() } else { worst.clone() };
                let reg = &best - &actual;
                if reg > *val {
                    *val = reg;
                }
            }
        }
        Ok(vals)
    }
}

pub fn wcr(view: &ViewPoint, b: CandidateId) -> Result<Rat, StrategyError> {
    if b >= view.m() {
        return Err(StrategyError::BadCandidate);
    }
    Ok(wcr_values(view)?.swap_remove(b))
}

/// Regret-minimizing vote, or None to keep the current one.
///
/// Candidate-wise nonatomic views reduce to "most preferred possible
/// winner" and never move when at most one winner is possible. Atomic
/// and l1 views minimize the enumerated regret directly, keep the
/// current vote whenever it is minimal, and break remaining ties by
/// preference.
pub fn wcr_response(view: &ViewPoint) -> Result<Option<CandidateId>, StrategyError> {
    if !view.ball.is_atomic() && view.ball.metric().candidate_wise() {
        let w = possible_winners(&view.ball);
        if w.len() <= 1 {
            return Ok(None);
        }
        let top = view.prefs.best_of(w).expect("nonempty");
        return Ok(if top == view.current { None } else { Some(top) });
    }
    let vals = wcr_values(view)?;
    let best = vals.iter().min().expect("nonempty").clone();
    if vals[view.current] == best {
        return Ok(None);
    }
    let winners = (0..view.m()).filter(|&c| vals[c] == best);
    Ok(view.prefs.best_of(winners))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ratio;

    fn prefs(order: &[usize]) -> PreferenceOrder {
        PreferenceOrder::new(order.to_vec()).unwrap()
    }

    fn atomic_view(
        full: &[i64],
        own: usize,
        r: i64,
        order: &[usize],
    ) -> ViewPoint {
        let p = prefs(order);
        let u = UtilityScale::borda(&p);
        ViewPoint::atomic(full, own, Metric::LInf, rat(r), p, u).unwrap()
    }

    #[test]
    fn regret_minimizers_walk_the_four_step_cycle() {
        // Two regret minimizers alternating from (b, c) revisit the start
        // after four moves. Radii differ: 2 for the first voter, 4 for
        // the second.
        let i_prefs = [1, 0, 2, 3];
        let j_prefs = [2, 1, 0, 3];

        let v = atomic_view(&[9, 5, 1, 9], 1, 2, &i_prefs);
        assert_eq!(wcr_values(&v).unwrap(), vec![rat(1), rat(2), rat(3), rat(3)]);
        assert_eq!(wcr_response(&v).unwrap(), Some(0));

        let v = atomic_view(&[10, 4, 1, 9], 2, 4, &j_prefs);
        assert_eq!(wcr_values(&v).unwrap(), vec![rat(2), rat(1), rat(2), rat(2)]);
        assert_eq!(wcr_response(&v).unwrap(), Some(1));

        let v = atomic_view(&[10, 5, 0, 9], 0, 2, &i_prefs);
        assert_eq!(wcr_values(&v).unwrap(), vec![rat(3), rat(2), rat(3), rat(3)]);
        assert_eq!(wcr_response(&v).unwrap(), Some(1));

        let v = atomic_view(&[9, 6, 0, 9], 1, 4, &j_prefs);
        assert_eq!(wcr_values(&v).unwrap(), vec![rat(2), rat(3), rat(2), rat(3)]);
        assert_eq!(wcr_response(&v).unwrap(), Some(2));
    }

    #[test]
    fn wcr_keeps_current_vote_when_minimal() {
        // Same view center, two current votes: staying is best for b, so
        // the b voter holds while the c voter switches to b.
        let v = atomic_view(&[9, 6, 0, 9], 1, 2, &[2, 1, 0, 3]);
        assert_eq!(wcr_values(&v).unwrap(), vec![rat(2), rat(1), rat(2), rat(2)]);
        assert_eq!(wcr_response(&v).unwrap(), None);
        let v = atomic_view(&[9, 5, 1, 9], 2, 2, &[2, 1, 0, 3]);
        assert_eq!(wcr_response(&v).unwrap(), Some(1));
    }

    #[test]
    fn nonatomic_candidate_wise_response_is_top_possible_winner() {
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let scores = vec![rat(45), rat(40), rat(16)];
        let v = ViewPoint::nonatomic(&scores, 2, Metric::Multiplicative, ratio(1, 5), p, u)
            .unwrap();
        assert_eq!(wcr_response(&v).unwrap(), Some(1));
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let v = ViewPoint::nonatomic(&scores, 2, Metric::Multiplicative, rat(0), p, u).unwrap();
        assert_eq!(wcr_response(&v).unwrap(), None);
    }

    #[test]
    fn intro_block_compromises_to_its_second_choice() {
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let scores = vec![rat(45), rat(40), rat(16)];
        let v = ViewPoint::nonatomic(&scores, 2, Metric::Multiplicative, ratio(1, 5), p, u)
            .unwrap();
        assert!(s_dominates(&v, 1, 2).unwrap());
        assert!(!s_beats(&v, 2, 1).unwrap());
        assert!(!s_dominates(&v, 0, 2).unwrap());
        assert_eq!(ld_move_set(&v).unwrap(), vec![1]);
        assert_eq!(strict_ld_response(&v).unwrap(), Some(1));
        // After the move the new vote is undominated: nothing beats b.
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let after = vec![rat(45), rat(41), rat(15)];
        let v = ViewPoint::nonatomic(&after, 1, Metric::Multiplicative, ratio(1, 5), p, u)
            .unwrap();
        assert_eq!(strict_ld_response(&v).unwrap(), None);
    }

    #[test]
    fn own_top_choice_is_never_dominated() {
        // A vote for the voter's top candidate always survives: no rival
        // can beat it at every state and permutation.
        let v = atomic_view(&[3, 2, 2, 1], 0, 1, &[0, 1, 2, 3]);
        for e in 1..4 {
            assert!(!s_dominates(&v, e, 0).unwrap(), "candidate {e}");
        }
    }

    #[test]
    fn modified_outcome_adds_the_atomic_vote() {
        let v = atomic_view(&[5, 5, 4], 0, 1, &[0, 1, 2]);
        let state: Vec<Rat> = [5, 5, 4].iter().map(|&x| rat(x)).collect();
        assert_eq!(modified_outcome(&v, &state, 0).unwrap(), vec![0]);
        assert_eq!(modified_outcome(&v, &state, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn modified_outcome_nonatomic_only_tips_exact_ties() {
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let scores = vec![rat(5), rat(5), rat(4)];
        let v = ViewPoint::nonatomic(&scores, 2, Metric::LInf, rat(1), p, u).unwrap();
        assert_eq!(modified_outcome(&v, &scores, 1).unwrap(), vec![1]);
        assert_eq!(modified_outcome(&v, &scores, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn weak_ld_policies_pick_from_the_move_set() {
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let scores = vec![rat(45), rat(40), rat(16)];
        let v = ViewPoint::nonatomic(&scores, 2, Metric::Multiplicative, ratio(1, 5), p, u)
            .unwrap();
        let moves = ld_move_set(&v).unwrap();
        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        assert_eq!(
            weak_ld_response(&v, WeakLdPolicy::Adversarial, &mut rng).unwrap(),
            moves.last().copied()
        );
        let picked = weak_ld_response(&v, WeakLdPolicy::Uniform, &mut rng).unwrap();
        assert_eq!(picked, Some(1));
        // No admissible move leaves the vote unchanged under both policies.
        let p = prefs(&[2, 1, 0]);
        let u = UtilityScale::borda(&p);
        let settled = vec![rat(45), rat(41), rat(15)];
        let v = ViewPoint::nonatomic(&settled, 1, Metric::Multiplicative, ratio(1, 5), p, u)
            .unwrap();
        assert_eq!(weak_ld_response(&v, WeakLdPolicy::Adversarial, &mut rng).unwrap(), None);
        assert_eq!(weak_ld_response(&v, WeakLdPolicy::Uniform, &mut rng).unwrap(), None);
    }
}
