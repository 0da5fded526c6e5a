//! Scenario files: a strict JSON description of one game (population,
//! metric, schedule, initial profile) plus machine-checkable
//! expectations, and a registry of built-in instances whose expected
//! results are verified by the test suite.
//!
//! Rationals are written as integer literals or strings like "3/10" and
//! parsed exactly. Unknown fields are rejected so a typo in an
//! experiment config fails loudly instead of being ignored.

use crate::dynamics::{
    agent_vote, run, DynamicsError, Game, Outcome, RunConfig, Scheduler, Trace,
};
use crate::model::{
    truthful_profile, Behavior, CandidateId, ModelError, NonatomicType, Population,
    PopulationKind, PreferenceOrder, Profile, Rat, TieBreak, UtilityScale, VoterType,
};
use crate::oracle::{
    equilibrium_census, equilibrium_census_restricted, OracleError, ENUMERATION_CAP,
};
use crate::strategy::{wcr_values, StrategyError, ViewPoint, WeakLdPolicy};
use crate::uncertainty::{tie_set_feasible, Metric};
use num::{BigInt, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unknown candidate {0:?}")]
    UnknownCandidate(String),
    #[error("duplicate candidate {0:?}")]
    DuplicateCandidate(String),
    #[error("unknown built-in scenario {0:?}")]
    UnknownBuiltin(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Uncertainty(#[from] crate::uncertainty::UncertaintyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Exact rational that serializes as an integer when it is one and as a
/// "p/q" string otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rat);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(n) = self.0.to_integer().to_i64() {
                return s.serialize_i64(n);
            }
        }
        s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum RawQ {
            Int(i64),
            Text(String),
        }
        match RawQ::deserialize(d)? {
            RawQ::Int(n) => Ok(Q(Rat::from_integer(BigInt::from(n)))),
            RawQ::Text(s) => parse_rational(&s).map(Q).map_err(serde::de::Error::custom),
        }
    }
}

/// Parse "p", "p/q", or signed variants, exactly.
pub fn parse_rational(text: &str) -> Result<Rat, String> {
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .unwrap_or("")
        .trim()
        .parse()
        .map_err(|_| format!("malformed rational {text:?}"))?;
    match parts.next() {
        None => Ok(Rat::from_integer(numer)),
        Some(rest) => {
            let denom: BigInt =
                rest.trim().parse().map_err(|_| format!("malformed rational {text:?}"))?;
            if denom.is_zero() {
                return Err(format!("zero denominator in {text:?}"));
            }
            Ok(Rat::new(numer, denom))
        }
    }
}

fn q(n: i64) -> Q {
    Q(crate::model::rat(n))
}

fn qr(n: i64, d: i64) -> Q {
    Q(crate::model::ratio(n, d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Display names; everything else refers to candidates by these.
    pub candidates: Vec<String>,
    /// Fixed background scores under the strategic population.
    pub base_scores: Vec<Q>,
    pub metric: Metric,
    /// Tie-break permutation as candidate names; omitted means the
    /// candidates-array order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiebreak: Option<Vec<String>>,
    pub population: PopulationSpec,
    /// Optional per-voter (or per-type) vote restriction for census runs,
    /// when a dominance argument has already pruned the strategy space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_votes: Option<Vec<Vec<String>>>,
    pub initial: InitialSpec,
    pub scheduler: Scheduler,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_ld_policy: Option<WeakLdPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PopulationSpec {
    Atomic { voters: Vec<VoterSpec> },
    Nonatomic { epsilon: Q, types: Vec<VoterSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterSpec {
    /// Candidate names, most preferred first.
    pub prefs: Vec<String>,
    pub r: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_schedule: Option<Vec<Q>>,
    pub behavior: Behavior,
    /// Cardinal utilities indexed like the candidates array; omitted
    /// means the positional default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<Q>>,
    /// Copies of this voter (atomic) or blocks of this type (nonatomic).
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub count: u32,
}

fn one() -> u32 {
    1
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_one(n: &u32) -> bool {
    *n == 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Everyone votes their top preference.
    Truthful,
    /// One vote per atomic voter, in population order.
    Votes { votes: Vec<String> },
    /// Per-type block counts by candidate name (nonatomic).
    Blocks { blocks: Vec<BTreeMap<String, u32>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Expectation {
    Equilibrium {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        winner: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        moves: Option<usize>,
    },
    Cycle {
        period: usize,
    },
    /// The (possibly restricted) profile space holds no equilibrium.
    NoEquilibria,
    /// Exactly these unordered pairs can never be the exact winning tie
    /// in the first agent's belief ball; all other pairs can.
    TiePairs {
        infeasible: Vec<[String; 2]>,
    },
    /// Worst-case regret of the first agent's view at the initial
    /// profile, per vote.
    WcrValues {
        values: BTreeMap<String, Q>,
    },
    /// The winner's score strictly decreases at some step.
    ScoreDrop,
}

/// A scenario resolved into runnable pieces.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub game: Game,
    pub initial: Profile,
    pub config: RunConfig,
    pub allowed: Option<Vec<Vec<CandidateId>>>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    fn candidate_table(&self) -> Result<HashMap<&str, CandidateId>, ScenarioError> {
        let mut table = HashMap::new();
        for (i, name) in self.candidates.iter().enumerate() {
            if table.insert(name.as_str(), i).is_some() {
                return Err(ScenarioError::DuplicateCandidate(name.clone()));
            }
        }
        Ok(table)
    }

    pub fn compile(&self) -> Result<Compiled, ScenarioError> {
        let m = self.candidates.len();
        let table = self.candidate_table()?;
        let id = |name: &str| -> Result<CandidateId, ScenarioError> {
            table.get(name).copied().ok_or_else(|| ScenarioError::UnknownCandidate(name.into()))
        };
        if self.base_scores.len() != m {
            return Err(ScenarioError::Invalid(format!(
                "{} base scores for {m} candidates",
                self.base_scores.len()
            )));
        }
        let base_scores: Vec<Rat> = self.base_scores.iter().map(|x| x.0.clone()).collect();
        let tiebreak = match &self.tiebreak {
            None => TieBreak::lexicographic(m),
            Some(names) => {
                let order =
                    names.iter().map(|n| id(n)).collect::<Result<Vec<_>, _>>()?;
                TieBreak::new(order)?
            }
        };
        let build_type = |spec: &VoterSpec| -> Result<VoterType, ScenarioError> {
            let order = spec.prefs.iter().map(|n| id(n)).collect::<Result<Vec<_>, _>>()?;
            let prefs = PreferenceOrder::new(order)?;
            let mut ty = VoterType::new(prefs, spec.r.0.clone(), spec.behavior)?;
            if let Some(u) = &spec.utilities {
                let scale =
                    UtilityScale::new(u.iter().map(|x| x.0.clone()).collect(), &ty.prefs)?;
                ty = ty.with_utilities(scale)?;
            }
            if let Some(sched) = &spec.r_schedule {
                ty = ty.with_schedule(sched.iter().map(|x| x.0.clone()).collect())?;
            }
            Ok(ty)
        };
        let kind = match &self.population {
            PopulationSpec::Atomic { voters } => {
                let mut expanded = Vec::new();
                for spec in voters {
                    let ty = build_type(spec)?;
                    for _ in 0..spec.count {
                        expanded.push(ty.clone());
                    }
                }
                PopulationKind::Atomic { voters: expanded }
            }
            PopulationSpec::Nonatomic { epsilon, types } => PopulationKind::Nonatomic {
                types: types
                    .iter()
                    .map(|spec| Ok(NonatomicType { ty: build_type(spec)?, blocks: spec.count }))
                    .collect::<Result<Vec<_>, ScenarioError>>()?,
                epsilon: epsilon.0.clone(),
            },
        };
        let population = Population { base_scores, kind };
        let game = Game::new(population, self.metric, tiebreak)?;

        let initial = match (&self.initial, &game.population.kind) {
            (InitialSpec::Truthful, _) => truthful_profile(&game.population),
            (InitialSpec::Votes { votes }, PopulationKind::Atomic { voters }) => {
                if votes.len() != voters.len() {
                    return Err(ScenarioError::Invalid(format!(
                        "{} initial votes for {} voters",
                        votes.len(),
                        voters.len()
                    )));
                }
                Profile::Atomic(votes.iter().map(|n| id(n)).collect::<Result<Vec<_>, _>>()?)
            }
            (InitialSpec::Blocks { blocks }, PopulationKind::Nonatomic { types, .. }) => {
                if blocks.len() != types.len() {
                    return Err(ScenarioError::Invalid(format!(
                        "{} block rows for {} types",
                        blocks.len(),
                        types.len()
                    )));
                }
                let mut counts = Vec::new();
                for (row, ty) in blocks.iter().zip(types) {
                    let mut full = vec![0u32; m];
                    for (name, &n) in row {
                        full[id(name)?] += n;
                    }
                    if full.iter().sum::<u32>() != ty.blocks {
                        return Err(ScenarioError::Invalid(format!(
                            "block row sums to {} but the type has {} blocks",
                            full.iter().sum::<u32>(),
                            ty.blocks
                        )));
                    }
                    counts.push(full);
                }
                Profile::Nonatomic(counts)
            }
            _ => {
                return Err(ScenarioError::Invalid(
                    "initial profile kind does not match the population mode".into(),
                ))
            }
        };

        let allowed = match &self.allowed_votes {
            None => None,
            Some(rows) => {
                let want = match &game.population.kind {
                    PopulationKind::Atomic { voters } => voters.len(),
                    PopulationKind::Nonatomic { types, .. } => types.len(),
                };
                if rows.len() != want {
                    return Err(ScenarioError::Invalid(format!(
                        "{} allowed-vote rows for {} agents",
                        rows.len(),
                        want
                    )));
                }
                Some(
                    rows.iter()
                        .map(|row| row.iter().map(|n| id(n)).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };

        let config = RunConfig {
            scheduler: self.scheduler.clone(),
            weak_ld_policy: self.weak_ld_policy.unwrap_or(WeakLdPolicy::Adversarial),
            step_limit: self.step_limit.unwrap_or(10_000),
            seed: self.seed.unwrap_or(0),
        };
        Ok(Compiled { game, initial, config, allowed })
    }
}

/// One verified expectation: what was claimed, whether it held, and what
/// was actually observed.
#[derive(Debug, Clone)]
pub struct ExpectationCheck {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

/// The belief ball and preferences of the first agent at the initial
/// profile; analysis expectations are stated against this view.
fn observer_view(compiled: &Compiled) -> Result<ViewPoint, ScenarioError> {
    let scores = compiled.game.scores(&compiled.initial)?;
    let vote = agent_vote(&compiled.game.population, &compiled.initial, 0)
        .ok_or_else(|| ScenarioError::Invalid("scenario has no agents".into()))?;
    match &compiled.game.population.kind {
        PopulationKind::Atomic { voters } => {
            let ty = &voters[0];
            let ints: Vec<i64> = scores
                .s
                .iter()
                .map(|x| x.to_integer().to_i64().expect("atomic scores fit i64"))
                .collect();
            Ok(ViewPoint::atomic(
                &ints,
                vote,
                compiled.game.metric,
                ty.radius_at(0),
                ty.prefs.clone(),
                ty.utilities_or_default(),
            )?)
        }
        PopulationKind::Nonatomic { types, .. } => {
            let ty = &types[0].ty;
            Ok(ViewPoint::nonatomic(
                &scores.s,
                vote,
                compiled.game.metric,
                ty.radius_at(0),
                ty.prefs.clone(),
                ty.utilities_or_default(),
            )?)
        }
    }
}

/// Execute every expectation of a scenario and report each one.
pub fn verify_expectations(sc: &Scenario) -> Result<Vec<ExpectationCheck>, ScenarioError> {
    let compiled = sc.compile()?;
    let table = sc.candidate_table()?;
    let id = |name: &str| -> Result<CandidateId, ScenarioError> {
        table.get(name).copied().ok_or_else(|| ScenarioError::UnknownCandidate(name.into()))
    };
    let needs_run = sc.expected.iter().any(|e| {
        matches!(
            e,
            Expectation::Equilibrium { .. } | Expectation::Cycle { .. } | Expectation::ScoreDrop
        )
    });
    let trace: Option<Trace> = if needs_run {
        Some(run(&compiled.game, &compiled.initial, &compiled.config)?)
    } else {
        None
    };
    let mut checks = Vec::new();
    for expectation in &sc.expected {
        checks.push(match expectation {
            Expectation::Equilibrium { winner, moves } => {
                let trace = trace.as_ref().expect("run cached");
                let mut pass = trace.outcome == Outcome::Equilibrium;
                if let Some(name) = winner {
                    pass &= trace.final_winner() == id(name)?;
                }
                if let Some(n) = moves {
                    pass &= trace.moves.len() == *n;
                }
                ExpectationCheck {
                    label: "equilibrium".into(),
                    pass,
                    detail: format!(
                        "outcome {:?}, winner {}, {} moves",
                        trace.outcome,
                        sc.candidates[trace.final_winner()],
                        trace.moves.len()
                    ),
                }
            }
            Expectation::Cycle { period } => {
                let trace = trace.as_ref().expect("run cached");
                let pass = matches!(trace.outcome, Outcome::Cycle { period: p, .. } if p == *period);
                ExpectationCheck {
                    label: "cycle".into(),
                    pass,
                    detail: format!("outcome {:?}", trace.outcome),
                }
            }
            Expectation::NoEquilibria => {
                let census = match &compiled.allowed {
                    Some(allowed) => equilibrium_census_restricted(
                        &compiled.game,
                        allowed,
                        0,
                        ENUMERATION_CAP,
                    )?,
                    None => equilibrium_census(&compiled.game, 0, ENUMERATION_CAP)?,
                };
                ExpectationCheck {
                    label: "no-equilibria".into(),
                    pass: census.equilibria.is_empty(),
                    detail: format!(
                        "{} profiles, {} equilibria",
                        census.profiles,
                        census.equilibria.len()
                    ),
                }
            }
            Expectation::TiePairs { infeasible } => {
                let view = observer_view(&compiled)?;
                let mut listed = Vec::new();
                for [x, y] in infeasible {
                    let (a, b) = (id(x)?, id(y)?);
                    listed.push(if a < b { (a, b) } else { (b, a) });
                }
                let m = view.m();
                let mut pass = true;
                let mut found = Vec::new();
                for x in 0..m {
                    for y in x + 1..m {
                        let feasible = tie_set_feasible(&view.ball, &[x, y])?;
                        if !feasible {
                            found.push(format!(
                                "{}-{}",
                                sc.candidates[x], sc.candidates[y]
                            ));
                        }
                        pass &= feasible == !listed.contains(&(x, y));
                    }
                }
                ExpectationCheck {
                    label: "tie-pairs".into(),
                    pass,
                    detail: format!("infeasible pairs: [{}]", found.join(", ")),
                }
            }
            Expectation::WcrValues { values } => {
                let view = observer_view(&compiled)?;
                let actual = wcr_values(&view)?;
                let mut pass = true;
                for (name, want) in values {
                    pass &= actual[id(name)?] == want.0;
                }
                let rendered: Vec<String> = actual
                    .iter()
                    .enumerate()
                    .map(|(c, v)| format!("{}={}", sc.candidates[c], v))
                    .collect();
                ExpectationCheck {
                    label: "wcr-values".into(),
                    pass,
                    detail: rendered.join(" "),
                }
            }
            Expectation::ScoreDrop => {
                let trace = trace.as_ref().expect("run cached");
                let pass = trace.winner_scores.windows(2).any(|w| w[1] < w[0]);
                let series: Vec<String> =
                    trace.winner_scores.iter().map(|x| x.to_string()).collect();
                ExpectationCheck {
                    label: "score-drop".into(),
                    pass,
                    detail: format!("winner scores [{}]", series.join(", ")),
                }
            }
        });
    }
    Ok(checks)
}

pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "intro-45-40-15",
        "wcr-noeq-nonatomic",
        "wcr-cycle-atomic",
        "l1-tieability",
        "l1-tieability-s2",
        "flaw-example",
        "simultaneous-swap",
        "truthful-uniform-r",
    ]
}

pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
    let sc = match name {
        "intro-45-40-15" => intro_45_40_15(),
        "wcr-noeq-nonatomic" => wcr_noeq_nonatomic(),
        "wcr-cycle-atomic" => wcr_cycle_atomic(),
        "l1-tieability" => l1_tieability(false),
        "l1-tieability-s2" => l1_tieability(true),
        "flaw-example" => flaw_example(),
        "simultaneous-swap" => simultaneous_swap(),
        "truthful-uniform-r" => truthful_uniform_r(),
        _ => return Err(ScenarioError::UnknownBuiltin(name.into())),
    };
    Ok(sc)
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// A 45/40/15 poll where supporters of the trailing candidate compromise
/// onto their second choice once the leaders are out of reach.
fn intro_45_40_15() -> Scenario {
    Scenario {
        name: "intro-45-40-15".into(),
        candidates: names(&["a", "b", "c"]),
        base_scores: vec![q(45), q(40), q(15)],
        metric: Metric::Multiplicative,
        tiebreak: None,
        population: PopulationSpec::Nonatomic {
            epsilon: q(1),
            types: vec![VoterSpec {
                prefs: names(&["c", "b", "a"]),
                r: qr(1, 5),
                r_schedule: None,
                behavior: Behavior::StrictLd,
                utilities: None,
                count: 1,
            }],
        },
        allowed_votes: None,
        initial: InitialSpec::Truthful,
        scheduler: Scheduler::SingletonFirstFound,
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected: vec![Expectation::Equilibrium { winner: Some("a".into()), moves: Some(1) }],
    }
}

/// Six-candidate population whose regret minimizers never settle: the
/// proof-reduced strategy space holds no equilibrium at all.
fn wcr_noeq_nonatomic() -> Scenario {
    let w_type = |own: &str, others: [&str; 2]| VoterSpec {
        prefs: names(&[own, "b", "a", "d", others[0], others[1]]),
        r: q(6),
        r_schedule: None,
        behavior: Behavior::Wcr,
        utilities: None,
        count: 4,
    };
    Scenario {
        name: "wcr-noeq-nonatomic".into(),
        candidates: names(&["a", "b", "c1", "c2", "c3", "d"]),
        base_scores: vec![q(12), q(6), q(0), q(0), q(0), q(12)],
        metric: Metric::LInf,
        tiebreak: None,
        population: PopulationSpec::Nonatomic {
            epsilon: qr(3, 10),
            types: vec![
                VoterSpec {
                    prefs: names(&["b", "a", "c1", "c2", "c3", "d"]),
                    r: q(2),
                    r_schedule: None,
                    behavior: Behavior::Wcr,
                    utilities: None,
                    count: 5,
                },
                w_type("c1", ["c2", "c3"]),
                w_type("c2", ["c1", "c3"]),
                w_type("c3", ["c1", "c2"]),
            ],
        },
        allowed_votes: Some(vec![
            names(&["a", "b"]),
            names(&["c1", "b"]),
            names(&["c2", "b"]),
            names(&["c3", "b"]),
        ]),
        initial: InitialSpec::Truthful,
        scheduler: Scheduler::SingletonFirstFound,
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected: vec![Expectation::NoEquilibria],
    }
}

/// Two regret minimizers with different radii chase each other through
/// four states forever; no vote profile of this game is stable.
fn wcr_cycle_atomic() -> Scenario {
    Scenario {
        name: "wcr-cycle-atomic".into(),
        candidates: names(&["a", "b", "c", "d"]),
        base_scores: vec![q(9), q(4), q(0), q(9)],
        metric: Metric::LInf,
        tiebreak: None,
        population: PopulationSpec::Atomic {
            voters: vec![
                VoterSpec {
                    prefs: names(&["b", "a", "c", "d"]),
                    r: q(2),
                    r_schedule: None,
                    behavior: Behavior::Wcr,
                    utilities: None,
                    count: 1,
                },
                VoterSpec {
                    prefs: names(&["c", "b", "a", "d"]),
                    r: q(4),
                    r_schedule: None,
                    behavior: Behavior::Wcr,
                    utilities: None,
                    count: 1,
                },
            ],
        },
        allowed_votes: None,
        initial: InitialSpec::Votes { votes: names(&["b", "c"]) },
        scheduler: Scheduler::Scripted { rounds: vec![vec![0], vec![1], vec![0], vec![1]] },
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected: vec![Expectation::Cycle { period: 4 }, Expectation::NoEquilibria],
    }
}

/// Distance-one vote transfers: under the sum metric some pairs can
/// never tie for the win, and regret separates the remaining votes.
fn l1_tieability(flat: bool) -> Scenario {
    let (name, base, expected) = if flat {
        (
            "l1-tieability-s2",
            vec![q(9), q(6), q(6), q(6)],
            vec![
                Expectation::TiePairs { infeasible: vec![] },
                Expectation::WcrValues {
                    values: [("a", q(5)), ("b", q(5)), ("c", q(4)), ("d", q(5))]
                        .into_iter()
                        .map(|(k, v)| (k.to_string(), v))
                        .collect(),
                },
            ],
        )
    } else {
        (
            "l1-tieability",
            vec![q(9), q(9), q(7), q(6)],
            vec![
                Expectation::TiePairs { infeasible: vec![["c".into(), "d".into()]] },
                Expectation::WcrValues {
                    values: [("a", q(4)), ("b", q(3)), ("c", q(4)), ("d", q(4))]
                        .into_iter()
                        .map(|(k, v)| (k.to_string(), v))
                        .collect(),
                },
            ],
        )
    };
    Scenario {
        name: name.into(),
        candidates: names(&["a", "b", "c", "d"]),
        base_scores: base,
        metric: Metric::L1,
        tiebreak: None,
        population: PopulationSpec::Nonatomic {
            epsilon: q(1),
            types: vec![VoterSpec {
                prefs: names(&["c", "b", "a", "d"]),
                r: q(5),
                r_schedule: None,
                behavior: Behavior::Wcr,
                utilities: Some(vec![q(3), q(4), q(5), q(0)]),
                count: 1,
            }],
        },
        allowed_votes: None,
        initial: InitialSpec::Blocks {
            blocks: vec![[("a".to_string(), 1u32)].into_iter().collect()],
        },
        scheduler: Scheduler::SingletonFirstFound,
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected,
    }
}

/// An opportunity move that lowers the winner's score on the way to
/// equilibrium, which no potential-function argument survives.
fn flaw_example() -> Scenario {
    Scenario {
        name: "flaw-example".into(),
        candidates: names(&["a", "b", "c", "d"]),
        base_scores: vec![q(5), q(3), q(4), q(1)],
        metric: Metric::L1,
        tiebreak: None,
        population: PopulationSpec::Atomic {
            voters: vec![
                VoterSpec {
                    prefs: names(&["c", "a", "b", "d"]),
                    r: q(2),
                    r_schedule: None,
                    behavior: Behavior::StrictLd,
                    utilities: None,
                    count: 1,
                },
                VoterSpec {
                    prefs: names(&["d", "a", "b", "c"]),
                    r: q(2),
                    r_schedule: None,
                    behavior: Behavior::StrictLd,
                    utilities: None,
                    count: 1,
                },
            ],
        },
        allowed_votes: None,
        initial: InitialSpec::Votes { votes: names(&["a", "d"]) },
        scheduler: Scheduler::SingletonFirstFound,
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected: vec![
            Expectation::Equilibrium { winner: Some("a".into()), moves: Some(2) },
            Expectation::ScoreDrop,
        ],
    }
}

/// Two voters who simultaneously abandon their posts and swap targets
/// forever; one-at-a-time scheduling settles the same start instantly.
fn simultaneous_swap() -> Scenario {
    Scenario {
        name: "simultaneous-swap".into(),
        candidates: names(&["a", "b", "c"]),
        base_scores: vec![q(5), q(1), q(1)],
        metric: Metric::LInf,
        tiebreak: None,
        population: PopulationSpec::Atomic {
            voters: vec![
                VoterSpec {
                    prefs: names(&["b", "c", "a"]),
                    r: q(1),
                    r_schedule: None,
                    behavior: Behavior::StrictLd,
                    utilities: None,
                    count: 1,
                },
                VoterSpec {
                    prefs: names(&["c", "b", "a"]),
                    r: q(1),
                    r_schedule: None,
                    behavior: Behavior::StrictLd,
                    utilities: None,
                    count: 1,
                },
            ],
        },
        allowed_votes: None,
        initial: InitialSpec::Truthful,
        scheduler: Scheduler::SimultaneousAll,
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected: vec![Expectation::Cycle { period: 2 }],
    }
}

/// Truthful start with one shared, weakly decreasing radius schedule;
/// the run demonstrates the invariant-checked regime.
fn truthful_uniform_r() -> Scenario {
    let sched = Some(vec![q(2), q(2), q(1), q(0)]);
    let ty = |prefs: &[&str], count: u32| VoterSpec {
        prefs: names(prefs),
        r: q(2),
        r_schedule: sched.clone(),
        behavior: Behavior::StrictLd,
        utilities: None,
        count,
    };
    Scenario {
        name: "truthful-uniform-r".into(),
        candidates: names(&["a", "b", "c", "d"]),
        base_scores: vec![q(8), q(5), q(3), q(1)],
        metric: Metric::LInf,
        tiebreak: None,
        population: PopulationSpec::Nonatomic {
            epsilon: q(1),
            types: vec![
                ty(&["b", "a", "c", "d"], 2),
                ty(&["c", "b", "a", "d"], 2),
                ty(&["d", "c", "b", "a"], 1),
            ],
        },
        allowed_votes: None,
        initial: InitialSpec::Truthful,
        scheduler: Scheduler::SingletonFirstFound,
        weak_ld_policy: None,
        step_limit: None,
        seed: None,
        expected: vec![Expectation::Equilibrium { winner: Some("a".into()), moves: Some(1) }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse_exactly_and_reject_zero_denominators() {
        assert_eq!(parse_rational("3/4").unwrap(), crate::model::ratio(3, 4));
        assert_eq!(parse_rational("-2/4").unwrap(), crate::model::ratio(-1, 2));
        assert_eq!(parse_rational("17").unwrap(), crate::model::rat(17));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn every_builtin_round_trips_byte_identically() {
        for name in builtin_names() {
            let sc = builtin(name).unwrap();
            let text = sc.to_json();
            let back = Scenario::from_json(&text).unwrap();
            assert_eq!(back, sc, "{name}");
            assert_eq!(back.to_json(), text, "{name}");
        }
    }

    #[test]
    fn unknown_fields_and_names_are_rejected() {
        let mut doc: serde_json::Value =
            serde_json::from_str(&builtin("intro-45-40-15").unwrap().to_json()).unwrap();
        doc["surprise"] = serde_json::json!(1);
        assert!(Scenario::from_json(&doc.to_string()).is_err());
        assert!(builtin("nope").is_err());

        let mut sc = builtin("flaw-example").unwrap();
        sc.initial = InitialSpec::Votes { votes: names(&["a", "zz"]) };
        assert!(matches!(sc.compile(), Err(ScenarioError::UnknownCandidate(_))));
    }

    #[test]
    fn compile_resolves_names_and_counts() {
        let sc = builtin("wcr-noeq-nonatomic").unwrap();
        let compiled = sc.compile().unwrap();
        let scores = compiled.game.scores(&compiled.initial).unwrap();
        // Truthful start: 1.5 mass on b, 1.2 on each c_k.
        assert_eq!(scores.s[1], crate::model::ratio(15, 2));
        assert_eq!(scores.s[2], crate::model::ratio(6, 5));
        assert_eq!(compiled.allowed.as_ref().unwrap()[0], vec![0, 1]);
        assert_eq!(compiled.game.population.agent_count(), 17);
    }

    #[test]
    fn intro_builtin_compromises_once_and_settles() {
        let checks = verify_expectations(&builtin("intro-45-40-15").unwrap()).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn mismatched_initial_kind_is_rejected() {
        let mut sc = builtin("intro-45-40-15").unwrap();
        sc.initial = InitialSpec::Votes { votes: names(&["c"]) };
        assert!(matches!(sc.compile(), Err(ScenarioError::Invalid(_))));
    }
}
