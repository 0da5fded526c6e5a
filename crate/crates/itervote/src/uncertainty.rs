//! Belief sets around an observed score vector: per-candidate score
//! ranges, possible winners, and exact-tie feasibility under three
//! uncertainty metrics.
//!
//! A belief ball never fixes the tie-break permutation. Every query here
//! quantifies over all permutations, so "possible" means achievable under
//! some state in the ball combined with some permutation, even at radius
//! zero.

use crate::model::{rat, CandidateId, Rat};
use itertools::Itertools;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance between score vectors used to shape the belief ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Bounded additive shift per candidate.
    LInf,
    /// Bounded relative shift per candidate; zero scores stay zero.
    Multiplicative,
    /// Bounded total shift summed over candidates.
    L1,
}

impl Metric {
    /// Whether the ball factors into independent per-candidate ranges.
    pub fn candidate_wise(&self) -> bool {
        !matches!(self, Metric::L1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UncertaintyError {
    #[error("per-candidate ranges are undefined for the l1 metric")]
    NotCandidateWise,
    #[error("operation requires an atomic ball")]
    AtomicOnly,
    #[error("atomic centers must be integer scores")]
    NonIntegerCenter,
    #[error("tie set must be a nonempty set of distinct candidates below m")]
    InvalidTieSet,
    #[error("radius must be nonnegative")]
    NegativeRadius,
    #[error("center scores must be nonnegative")]
    NegativeCenter,
}

/// A ball of plausible score vectors around an observed center.
///
/// Atomic balls contain only integer states; an atomic ball built from a
/// voter's view excludes that voter's own vote, and voter-facing queries
/// add it back explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefBall {
    center: Vec<Rat>,
    metric: Metric,
    radius: Rat,
    atomic: bool,
}

impl BeliefBall {
    pub fn nonatomic(
        center: Vec<Rat>,
        metric: Metric,
        radius: Rat,
    ) -> Result<Self, UncertaintyError> {
        Self::build(center, metric, radius, false)
    }

    pub fn atomic(
        center: Vec<i64>,
        metric: Metric,
        radius: Rat,
    ) -> Result<Self, UncertaintyError> {
        Self::build(center.into_iter().map(rat).collect(), metric, radius, true)
    }

    fn build(
        center: Vec<Rat>,
        metric: Metric,
        radius: Rat,
        atomic: bool,
    ) -> Result<Self, UncertaintyError> {
        if radius.is_negative() {
            return Err(UncertaintyError::NegativeRadius);
        }
        if center.iter().any(|x| x.is_negative()) {
            return Err(UncertaintyError::NegativeCenter);
        }
        if atomic && !center.iter().all(|x| x.is_integer()) {
            return Err(UncertaintyError::NonIntegerCenter);
        }
        Ok(BeliefBall { center, metric, radius, atomic })
    }

    pub fn m(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[Rat] {
        &self.center
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn radius(&self) -> &Rat {
        &self.radius
    }

    pub fn is_atomic(&self) -> bool {
        self.atomic
    }

    /// Integer center of an atomic ball.
    pub fn center_i64(&self) -> Result<Vec<i64>, UncertaintyError> {
        if !self.atomic {
            return Err(UncertaintyError::AtomicOnly);
        }
        Ok(self
            .center
            .iter()
            .map(|x| x.to_integer().to_i64().expect("atomic scores fit i64"))
            .collect())
    }
}

/// Closed per-candidate score interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreRange {
    pub lo: Rat,
    pub hi: Rat,
}

fn floor_rat(x: &Rat) -> Rat {
    x.floor()
}

fn ceil_rat(x: &Rat) -> Rat {
    x.ceil()
}

/// Range of plausible scores for one candidate.
///
/// Atomic ranges are integer endpoints: multiplicative bounds round
/// outward by definition of the discrete ball, additive bounds round
/// inward to the integers actually inside the real interval.
pub fn score_range(ball: &BeliefBall, c: CandidateId) -> Result<ScoreRange, UncertaintyError> {
    if !ball.metric.candidate_wise() {
        return Err(UncertaintyError::NotCandidateWise);
    }
    let s = &ball.center[c];
    let r = &ball.radius;
    let range = match ball.metric {
        Metric::Multiplicative => {
            if s.is_zero() {
                ScoreRange { lo: Rat::zero(), hi: Rat::zero() }
            } else {
                let grow = Rat::one() + r;
                let lo = s / &grow;
                let hi = s * &grow;
                if ball.atomic {
                    ScoreRange { lo: floor_rat(&lo), hi: ceil_rat(&hi) }
                } else {
                    ScoreRange { lo, hi }
                }
            }
        }
        Metric::LInf => {
            let lo = (s - r).max(Rat::zero());
            let hi = s + r;
            if ball.atomic {
                ScoreRange { lo: ceil_rat(&lo), hi: floor_rat(&hi) }
            } else {
                ScoreRange { lo, hi }
            }
        }
        Metric::L1 => unreachable!("guarded above"),
    };
    Ok(range)
}

/// Candidates that win under some state in the ball and some tie-break.
///
/// For an atomic ball the center is a voter's view and the voter's own
/// vote is added to the candidate under test.
pub fn possible_winners(ball: &BeliefBall) -> Vec<CandidateId> {
    let m = ball.m();
    if ball.metric.candidate_wise() {
        let ranges: Vec<ScoreRange> =
            (0..m).map(|c| score_range(ball, c).expect("candidate-wise")).collect();
        let own_vote = if ball.atomic { Rat::one() } else { Rat::zero() };
        (0..m)
            .filter(|&c| {
                let rival = (0..m)
                    .filter(|&x| x != c)
                    .map(|x| ranges[x].lo.clone())
                    .max()
                    .unwrap_or_else(Rat::zero);
                ranges[c].hi.clone() + own_vote.clone() >= rival
            })
            .collect()
    } else if ball.atomic {
        l1_atomic_possible_winners(ball)
    } else {
        l1_nonatomic_possible_winners(ball)
    }
}

/// Cheapest total shift making c weakly maximal; the cost in t is convex
/// piecewise linear, so the minimum sits at one of the center scores.
fn l1_nonatomic_possible_winners(ball: &BeliefBall) -> Vec<CandidateId> {
    let m = ball.m();
    let s = ball.center();
    (0..m)
        .filter(|&c| {
            s.iter().any(|t| {
                let mut cost = (&s[c] - t).abs();
                for (a, sa) in s.iter().enumerate() {
                    if a != c && sa > t {
                        cost += sa - t;
                    }
                }
                cost <= ball.radius
            })
        })
        .collect()
}

/// Atomic variant: the voter's own vote lands on c, so rivals only need
/// to be held at or below t + 1 while c's view score is moved to t.
fn l1_atomic_possible_winners(ball: &BeliefBall) -> Vec<CandidateId> {
    let m = ball.m();
    let v = ball.center_i64().expect("atomic");
    let max_v = v.iter().copied().max().unwrap_or(0);
    (0..m)
        .filter(|&c| {
            (0..=max_v).any(|t| {
                let mut cost = (v[c] - t).abs();
                for (a, &va) in v.iter().enumerate() {
                    if a != c {
                        cost += (va - (t + 1)).max(0);
                    }
                }
                rat(cost) <= ball.radius
            })
        })
        .collect()
}

fn validate_tie_set(m: usize, tie: &[CandidateId]) -> Result<(), UncertaintyError> {
    let mut seen = vec![false; m];
    if tie.is_empty() {
        return Err(UncertaintyError::InvalidTieSet);
    }
    for &c in tie {
        if c >= m || seen[c] {
            return Err(UncertaintyError::InvalidTieSet);
        }
        seen[c] = true;
    }
    Ok(())
}

/// Whether some state in the ball has exactly `tie` as its argmax set,
/// with every outsider strictly below the shared maximum.
pub fn tie_set_feasible(ball: &BeliefBall, tie: &[CandidateId]) -> Result<bool, UncertaintyError> {
    let m = ball.m();
    validate_tie_set(m, tie)?;
    let mut member = vec![false; m];
    for &c in tie {
        member[c] = true;
    }
    if ball.metric.candidate_wise() {
        let ranges: Vec<ScoreRange> =
            (0..m).map(|c| score_range(ball, c).expect("candidate-wise")).collect();
        let need_at_least =
            tie.iter().map(|&c| ranges[c].lo.clone()).max().expect("nonempty tie set");
        let cap = tie.iter().map(|&c| ranges[c].hi.clone()).min().expect("nonempty tie set");
        let outsider_floor =
            (0..m).filter(|&c| !member[c]).map(|c| ranges[c].lo.clone()).max();
        let feasible = match outsider_floor {
            None => need_at_least <= cap,
            Some(o) if ball.atomic => need_at_least.max(o + Rat::one()) <= cap,
            Some(o) => need_at_least <= cap && o < cap,
        };
        Ok(feasible)
    } else if ball.atomic {
        Ok(l1_atomic_tie_feasible(ball, &member))
    } else {
        Ok(l1_nonatomic_tie_feasible(ball, &member))
    }
}

/// Integer tie level scan. Outsiders must end at t - 1 or lower, which is
/// impossible at t = 0, so the scan starts at 1 whenever outsiders exist.
fn l1_atomic_tie_feasible(ball: &BeliefBall, member: &[bool]) -> bool {
    let v = ball.center_i64().expect("atomic");
    let has_outsiders = member.iter().any(|&b| !b);
    let max_v = v.iter().copied().max().unwrap_or(0);
    let t_min = if has_outsiders { 1 } else { 0 };
    (t_min..=max_v + 1).any(|t| {
        let mut cost = 0i64;
        for (c, &vc) in v.iter().enumerate() {
            if member[c] {
                cost += (vc - t).abs();
            } else {
                cost += (vc - (t - 1)).max(0);
            }
        }
        rat(cost) <= ball.radius
    })
}

/// Total shift F(t) to pin members at t and push outsiders to or below t
/// is convex piecewise linear. Feasibility at t needs F(t) <= r when no
/// outsider sits at or above t, and strict slack F(t) < r otherwise, so
/// it suffices to test the breakpoints, midpoints of adjacent distinct
/// scores, and one point above each of the outsider and global maxima.
fn l1_nonatomic_tie_feasible(ball: &BeliefBall, member: &[bool]) -> bool {
    let s = ball.center();
    let r = &ball.radius;
    let mut points: Vec<Rat> = s.to_vec();
    points.sort();
    points.dedup();
    let mut probes = points.clone();
    for w in points.windows(2) {
        probes.push((&w[0] + &w[1]) / rat(2));
    }
    if let Some(mx) = points.last() {
        probes.push(mx + Rat::one());
    }
    let outsider_max = s
        .iter()
        .enumerate()
        .filter(|(c, _)| !member[*c])
        .map(|(_, x)| x.clone())
        .max();
    if let Some(o) = &outsider_max {
        probes.push(o + Rat::one());
    }
    probes.iter().any(|t| {
        let mut f = Rat::zero();
        let mut blocked = 0usize;
        for (c, sc) in s.iter().enumerate() {
            if member[c] {
                f += (sc - t).abs();
            } else {
                if sc > t {
                    f += sc - t;
                }
                if sc >= t {
                    blocked += 1;
                }
            }
        }
        (blocked == 0 && &f <= r) || &f < r
    })
}

/// Every integer state in an atomic ball.
pub fn ball_enumerate(ball: &BeliefBall) -> Result<Vec<Vec<i64>>, UncertaintyError> {
    if !ball.atomic {
        return Err(UncertaintyError::AtomicOnly);
    }
    let m = ball.m();
    if ball.metric.candidate_wise() {
        let ranges: Vec<(i64, i64)> = (0..m)
            .map(|c| {
                let r = score_range(ball, c).expect("candidate-wise");
                (rat_to_i64(&r.lo), rat_to_i64(&r.hi))
            })
            .collect();
        Ok(ranges.iter().map(|&(lo, hi)| lo..=hi).multi_cartesian_product().collect())
    } else {
        let v = ball.center_i64()?;
        let budget = rat_to_i64(&ball.radius.floor());
        let mut out = Vec::new();
        let mut state = vec![0i64; m];
        l1_enumerate_rec(&v, 0, budget, &mut state, &mut out);
        Ok(out)
    }
}

fn l1_enumerate_rec(
    v: &[i64],
    idx: usize,
    budget: i64,
    state: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if idx == v.len() {
        out.push(state.clone());
        return;
    }
    let lo = (v[idx] - budget).max(0);
    for val in lo..=v[idx] + budget {
        state[idx] = val;
        l1_enumerate_rec(v, idx + 1, budget - (val - v[idx]).abs(), state, out);
    }
}

/// Exact number of states `ball_enumerate` would yield, without
/// materializing them.
pub fn ball_state_count(ball: &BeliefBall) -> Result<u128, UncertaintyError> {
    if !ball.atomic {
        return Err(UncertaintyError::AtomicOnly);
    }
    let m = ball.m();
    if ball.metric.candidate_wise() {
        let mut n: u128 = 1;
        for c in 0..m {
            let r = score_range(ball, c).expect("candidate-wise");
            n = n.saturating_mul((rat_to_i64(&r.hi) - rat_to_i64(&r.lo) + 1) as u128);
        }
        Ok(n)
    } else {
        let v = ball.center_i64()?;
        let budget = rat_to_i64(&ball.radius.floor()) as usize;
        // dp[b] = assignments to the coordinates seen so far with total cost b.
        let mut dp = vec![0u128; budget + 1];
        dp[0] = 1;
        for &vc in &v {
            let mut next = vec![0u128; budget + 1];
            for (b, &ways) in dp.iter().enumerate().filter(|(_, &w)| w > 0) {
                for cost in 0..=(budget - b) as i64 {
                    let choices = if cost == 0 {
                        1
                    } else if vc - cost >= 0 {
                        2
                    } else {
                        1
                    };
                    next[b + cost as usize] += ways * choices as u128;
                }
            }
            dp = next;
        }
        Ok(dp.iter().sum())
    }
}

/// Whether an integer state lies inside an atomic ball.
pub fn ball_contains(ball: &BeliefBall, state: &[i64]) -> Result<bool, UncertaintyError> {
    if !ball.atomic {
        return Err(UncertaintyError::AtomicOnly);
    }
    let v = ball.center_i64()?;
    if state.len() != v.len() || state.iter().any(|&x| x < 0) {
        return Ok(false);
    }
    match ball.metric {
        Metric::L1 => {
            let dist: i64 = state.iter().zip(&v).map(|(&a, &b)| (a - b).abs()).sum();
            Ok(rat(dist) <= ball.radius)
        }
        _ => Ok((0..v.len()).all(|c| {
            let r = score_range(ball, c).expect("candidate-wise");
            rat(state[c]) >= r.lo && rat(state[c]) <= r.hi
        })),
    }
}

fn rat_to_i64(x: &Rat) -> i64 {
    x.to_integer().to_i64().expect("score fits i64")
}
