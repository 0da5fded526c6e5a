//! Structural invariants of the decision procedures, checked over
//! randomized instances: closed-form ranges against raw enumeration,
//! monotonicity in the radius, candidate-wise tie rules, dominance
//! shape, and deterministic replay of whole runs.

mod common;

use common::{
    radius_pool, random_atomic_game, random_candidate_wise_view, random_nonatomic_game,
    random_prefs, random_truthful_uniform_game, seeded,
};
use itervote::model::{is_eps_valid, scores_of};
use itervote::{
    ball_contains, ball_enumerate, ball_state_count, possible_winners, rat, ratio, run, s_beats,
    s_dominates, score_range, strict_ld_response, tie_set_feasible, wcr_response, BeliefBall,
    Metric, PopulationKind, PreferenceOrder, Profile, Rat, ScoreVector, TieBreak, UtilityScale,
    ViewPoint,
};
use proptest::prelude::*;
use rand::Rng;

fn center_strategy(max_m: usize, max_score: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..=max_score, 2..=max_m)
}

fn rat_center(center: &[i64], halves: u32) -> Vec<Rat> {
    // Bit k of `halves` adds one half to coordinate k, off the integer grid.
    center
        .iter()
        .enumerate()
        .map(|(k, &s)| rat(s) + if halves >> k & 1 == 1 { ratio(1, 2) } else { rat(0) })
        .collect()
}

fn any_metric(index: usize) -> Metric {
    [Metric::LInf, Metric::Multiplicative, Metric::L1][index % 3]
}

proptest! {
    #[test]
    fn winner_is_the_tiebreak_head_of_the_argmax(
        scores in prop::collection::vec(0i64..=10, 1..=6),
        seed in any::<u64>(),
    ) {
        let m = scores.len();
        let mut rng = seeded(seed);
        let order = random_prefs(&mut rng, m).order().to_vec();
        let tiebreak = TieBreak::new(order.clone()).unwrap();
        let sv = ScoreVector::new(scores.iter().map(|&x| rat(x)).collect(), tiebreak).unwrap();
        let argmax = sv.argmax();
        let expected = order.iter().copied().find(|c| argmax.contains(c)).unwrap();
        prop_assert_eq!(sv.winner(), expected);
        prop_assert!(argmax.contains(&sv.winner()));
    }

    #[test]
    fn atomic_ranges_are_the_enumeration_envelope(
        center in center_strategy(4, 6),
        r_idx in 0usize..5,
        metric_idx in 0usize..2,
    ) {
        let radius = radius_pool()[r_idx].clone();
        let metric = [Metric::LInf, Metric::Multiplicative][metric_idx];
        let ball = BeliefBall::atomic(center.clone(), metric, radius).unwrap();
        let states = ball_enumerate(&ball).unwrap();
        prop_assert_eq!(ball_state_count(&ball).unwrap(), states.len() as u128);
        for c in 0..center.len() {
            let range = score_range(&ball, c).unwrap();
            let lo = states.iter().map(|s| s[c]).min().unwrap();
            let hi = states.iter().map(|s| s[c]).max().unwrap();
            prop_assert_eq!(&range.lo, &rat(lo), "candidate {} low", c);
            prop_assert_eq!(&range.hi, &rat(hi), "candidate {} high", c);
        }
        for state in &states {
            prop_assert!(ball_contains(&ball, state).unwrap());
        }
    }

    #[test]
    fn l1_enumeration_stays_inside_the_ball(
        center in center_strategy(4, 6),
        r in 0i64..=3,
    ) {
        let ball = BeliefBall::atomic(center.clone(), Metric::L1, rat(r)).unwrap();
        let states = ball_enumerate(&ball).unwrap();
        prop_assert_eq!(ball_state_count(&ball).unwrap(), states.len() as u128);
        for state in &states {
            let dist: i64 =
                state.iter().zip(&center).map(|(a, b)| (a - b).abs()).sum();
            prop_assert!(dist <= r);
            prop_assert!(state.iter().all(|&x| x >= 0));
            prop_assert!(ball_contains(&ball, state).unwrap());
        }
        prop_assert!(states.contains(&center));
    }

    #[test]
    fn possible_winners_grow_with_the_radius(
        center in center_strategy(5, 8),
        halves in 0u32..32,
        metric_idx in 0usize..3,
        r_lo in 0usize..5,
        r_hi in 0usize..5,
    ) {
        let pool = radius_pool();
        let (lo, hi) = if pool[r_lo] <= pool[r_hi] { (r_lo, r_hi) } else { (r_hi, r_lo) };
        let metric = any_metric(metric_idx);
        let scores = rat_center(&center, halves);
        let small = BeliefBall::nonatomic(scores.clone(), metric, pool[lo].clone()).unwrap();
        let large = BeliefBall::nonatomic(scores.clone(), metric, pool[hi].clone()).unwrap();
        let w_small = possible_winners(&small);
        let w_large = possible_winners(&large);
        prop_assert!(!w_small.is_empty());
        prop_assert!(w_small.iter().all(|c| w_large.contains(c)));

        let zero = BeliefBall::nonatomic(scores.clone(), metric, rat(0)).unwrap();
        let tiebreak = TieBreak::lexicographic(center.len());
        let sv = ScoreVector::new(scores, tiebreak).unwrap();
        prop_assert_eq!(possible_winners(&zero), sv.argmax());
    }

    #[test]
    fn feasible_ties_stay_feasible_as_the_radius_grows(
        center in center_strategy(4, 8),
        halves in 0u32..16,
        metric_idx in 0usize..3,
        r_lo in 0usize..5,
        r_hi in 0usize..5,
        tie_bits in 1u32..16,
    ) {
        let m = center.len();
        let tie: Vec<usize> = (0..m).filter(|c| tie_bits >> c & 1 == 1).collect();
        prop_assume!(!tie.is_empty());
        let pool = radius_pool();
        let (lo, hi) = if pool[r_lo] <= pool[r_hi] { (r_lo, r_hi) } else { (r_hi, r_lo) };
        let scores = rat_center(&center, halves);
        let metric = any_metric(metric_idx);
        let small = BeliefBall::nonatomic(scores.clone(), metric, pool[lo].clone()).unwrap();
        let large = BeliefBall::nonatomic(scores, metric, pool[hi].clone()).unwrap();
        if tie_set_feasible(&small, &tie).unwrap() {
            prop_assert!(tie_set_feasible(&large, &tie).unwrap());
        }
    }

    #[test]
    fn candidate_wise_possible_winners_top_out_together(
        center in center_strategy(5, 8),
        halves in 0u32..32,
        metric_idx in 0usize..2,
        r_idx in 0usize..5,
    ) {
        // Outsiders pinned at the shared level block the bare pair, but
        // under a candidate-wise metric some feasible exact tie always
        // absorbs them; l1 is the metric where even this fails.
        let metric = [Metric::LInf, Metric::Multiplicative][metric_idx];
        let m = center.len();
        let scores = rat_center(&center, halves);
        let ball =
            BeliefBall::nonatomic(scores, metric, radius_pool()[r_idx].clone()).unwrap();
        let w = possible_winners(&ball);
        for (i, &x) in w.iter().enumerate() {
            for &y in &w[i + 1..] {
                let covered = (1u32..1 << m).any(|mask| {
                    mask >> x & 1 == 1 && mask >> y & 1 == 1 && {
                        let tie: Vec<usize> =
                            (0..m).filter(|&c| mask >> c & 1 == 1).collect();
                        tie_set_feasible(&ball, &tie).unwrap()
                    }
                });
                prop_assert!(
                    covered,
                    "possible winners {} and {} share no feasible tie under {:?}",
                    x, y, metric
                );
            }
        }
    }

    #[test]
    fn strict_ld_moves_match_wcr_on_candidate_wise_views(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for _ in 0..8 {
            let view = random_candidate_wise_view(&mut rng);
            if let Some(target) = strict_ld_response(&view).unwrap() {
                prop_assert_eq!(wcr_response(&view).unwrap(), Some(target));
            }
        }
    }

    #[test]
    fn dominance_is_asymmetric_and_irreflexive(
        center in center_strategy(3, 5),
        r in 0i64..=2,
        own in 0usize..3,
        seed in any::<u64>(),
    ) {
        let m = center.len();
        let own = own % m;
        prop_assume!(center[own] >= 1);
        let mut rng = seeded(seed);
        let prefs = random_prefs(&mut rng, m);
        let utilities = UtilityScale::borda(&prefs);
        let view =
            ViewPoint::atomic(&center, own, Metric::LInf, rat(r), prefs, utilities).unwrap();
        for x in 0..m {
            prop_assert!(!s_beats(&view, x, x).unwrap());
            prop_assert!(!s_dominates(&view, x, x).unwrap());
            for y in 0..m {
                if s_dominates(&view, x, y).unwrap() {
                    prop_assert!(!s_dominates(&view, y, x).unwrap());
                    prop_assert!(s_beats(&view, x, y).unwrap());
                }
            }
        }
    }

    #[test]
    fn scores_add_base_and_votes(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (game, initial, _) = if rng.gen_bool(0.5) {
            random_atomic_game(&mut rng)
        } else {
            random_nonatomic_game(&mut rng)
        };
        let population = &game.population;
        let sv = scores_of(population, &initial, &game.tiebreak).unwrap();
        let mut expected = population.base_scores.clone();
        match (&population.kind, &initial) {
            (PopulationKind::Atomic { .. }, Profile::Atomic(votes)) => {
                for &c in votes {
                    expected[c] += rat(1);
                }
            }
            (PopulationKind::Nonatomic { epsilon, .. }, Profile::Nonatomic(rows)) => {
                for row in rows {
                    for (c, &n) in row.iter().enumerate() {
                        expected[c] += epsilon * rat(i64::from(n));
                    }
                }
            }
            _ => prop_assert!(false, "mismatched shapes"),
        }
        prop_assert_eq!(sv.s, expected);
    }

    #[test]
    fn truthful_profiles_are_valid_and_sit_on_tops(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (game, initial, _) = random_truthful_uniform_game(&mut rng, false);
        prop_assert!(is_eps_valid(&game.population, &initial));
        let PopulationKind::Nonatomic { types, .. } = &game.population.kind else {
            return Err(TestCaseError::fail("generator is nonatomic"));
        };
        let Profile::Nonatomic(rows) = &initial else {
            return Err(TestCaseError::fail("profile matches population"));
        };
        for (ty, row) in types.iter().zip(rows) {
            prop_assert_eq!(row[ty.ty.prefs.top()], ty.blocks);
            prop_assert_eq!(row.iter().sum::<u32>(), ty.blocks);
        }
    }

    #[test]
    fn runs_replay_identically_for_a_fixed_seed(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (game, initial, config) = if rng.gen_bool(0.5) {
            random_atomic_game(&mut rng)
        } else {
            random_nonatomic_game(&mut rng)
        };
        let a = run(&game, &initial, &config).unwrap();
        let b = run(&game, &initial, &config).unwrap();
        prop_assert_eq!(a.moves, b.moves);
        prop_assert_eq!(a.outcome, b.outcome);
        prop_assert_eq!(a.winners, b.winners);
        prop_assert_eq!(a.final_profile, b.final_profile);
    }

    #[test]
    fn preference_ranks_are_consistent_with_the_order(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = rng.gen_range(1..=6);
        let prefs = random_prefs(&mut rng, m);
        for (rank, &c) in prefs.order().iter().enumerate() {
            prop_assert_eq!(prefs.rank(c), rank);
        }
        prop_assert_eq!(prefs.top(), prefs.order()[0]);
        for &x in prefs.order() {
            for &y in prefs.order() {
                prop_assert_eq!(prefs.prefers(x, y), prefs.rank(x) < prefs.rank(y));
            }
        }
    }
}

/// The documented failure of pairwise tieability outside candidate-wise
/// metrics: both are possible winners, yet no plausible state puts them
/// at the top together, bare or inside any larger tie.
#[test]
fn l1_possible_winner_pair_that_cannot_tie() {
    let scores = vec![rat(10), rat(9), rat(7), rat(6)];
    let ball = BeliefBall::nonatomic(scores, Metric::L1, rat(5)).unwrap();
    let w = possible_winners(&ball);
    assert!(w.contains(&2) && w.contains(&3));
    for mask in 1u32..16 {
        if mask >> 2 & 1 == 1 && mask >> 3 & 1 == 1 {
            let tie: Vec<usize> = (0..4).filter(|&c| mask >> c & 1 == 1).collect();
            assert!(!tie_set_feasible(&ball, &tie).unwrap(), "tie {tie:?} feasible");
        }
    }
}

/// Strict-ld response is the most preferred member of the move set, so a
/// view whose current vote is undominated never moves.
#[test]
fn undominated_current_vote_never_moves() {
    let prefs = PreferenceOrder::new(vec![0, 1, 2]).unwrap();
    let utilities = UtilityScale::borda(&prefs);
    let view = ViewPoint::nonatomic(
        &[rat(9), rat(2), rat(2)],
        0,
        Metric::LInf,
        rat(1),
        prefs,
        utilities,
    )
    .unwrap();
    assert_eq!(strict_ld_response(&view).unwrap(), None);
    assert_eq!(wcr_response(&view).unwrap(), None);
}
