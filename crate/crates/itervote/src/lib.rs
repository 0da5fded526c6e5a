//! Iterative plurality voting under score uncertainty.
//!
//! Voters know the current scores only up to a distance bound and react
//! either by discarding dominated votes (local dominance) or by
//! minimizing worst-case regret. The crate models atomic voters and
//! nonatomic block populations, runs the resulting dynamics under
//! several schedulers, and ships a brute-force oracle that re-derives
//! every closed-form answer by exhaustive enumeration.
//!
//! Module map:
//! - [`model`]: scores, preferences, populations, the plurality rule.
//! - [`uncertainty`]: belief balls, possible winners, exact-tie feasibility.
//! - [`strategy`]: dominance, move sets, worst-case regret, responses.
//! - [`dynamics`]: schedulers, runs, equilibria, convergence invariants.
//! - [`oracle`]: enumeration-based ground truth, census, cross-validation.
//! - [`scenarios`]: JSON scenario files, built-in instances, expectations.

pub mod dynamics;
pub mod model;
pub mod oracle;
pub mod scenarios;
pub mod strategy;
pub mod uncertainty;

pub use dynamics::{
    agent_view, check_truthful_invariants, is_equilibrium, run, Game, MoveClass, MoveRecord,
    Outcome, RunConfig, Scheduler, Trace, TruthfulInvariants,
};
pub use model::{
    rat, ratio, truthful_profile, Behavior, CandidateId, NonatomicType, Population,
    PopulationKind, PreferenceOrder, Profile, Rat, ScoreVector, TieBreak, UtilityScale,
    VoterType,
};
pub use oracle::{
    cross_validate, equilibrium_census, equilibrium_census_restricted, ground_truth, Census,
    CrossValidation, FamilySpec, GroundTruth, OracleError, ENUMERATION_CAP,
};
pub use scenarios::{builtin, builtin_names, verify_expectations, Scenario, ScenarioError};
pub use strategy::{
    ld_move_set, s_beats, s_dominates, strict_ld_response, wcr, wcr_response, wcr_values,
    StrategyAnalysis, ViewPoint, WeakLdPolicy,
};
pub use uncertainty::{
    ball_contains, ball_enumerate, ball_state_count, possible_winners, score_range,
    tie_set_feasible, BeliefBall, Metric, ScoreRange,
};
