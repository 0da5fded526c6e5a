//! Core voting model: candidates, exact rational scores, strict preference
//! orders, utility scales, voter types, populations, and the plurality
//! winner rule with a deterministic tie-break permutation.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Candidates are dense indices `0..m`; display names live at the scenario layer.
pub type CandidateId = usize;

/// Exact rational scalar used for scores, radii, masses, and utilities.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("order must be a permutation of 0..{expected}, got {got:?}")]
    NotAPermutation { expected: usize, got: Vec<usize> },
    #[error("utility scale does not fit the preference order")]
    UtilityMismatch,
    #[error("scores must be nonnegative")]
    NegativeScore,
    #[error("radius must be nonnegative")]
    NegativeRadius,
    #[error("radius schedule must be nonincreasing")]
    IncreasingSchedule,
    #[error("profile shape does not match the population")]
    ProfileShape,
    #[error("atomic base scores must be integers")]
    NonIntegerAtomicScore,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("a move must change the vote")]
    NullMove,
}

fn check_permutation(order: &[usize], m: usize) -> Result<(), ModelError> {
    let mut seen = vec![false; m];
    if order.len() != m {
        return Err(ModelError::NotAPermutation { expected: m, got: order.to_vec() });
    }
    for &c in order {
        if c >= m || seen[c] {
            return Err(ModelError::NotAPermutation { expected: m, got: order.to_vec() });
        }
        seen[c] = true;
    }
    Ok(())
}

/// Deterministic tie-break permutation: earlier candidates win ties.
///
/// This is the realized tie-break used by the dynamics to resolve exact
/// ties in the observed outcome. Belief-side reasoning (possible winners,
/// dominance, regret) quantifies over all permutations and never reads it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreak {
    order: Vec<CandidateId>,
    pos: Vec<usize>,
}

impl TieBreak {
    pub fn new(order: Vec<CandidateId>) -> Result<Self, ModelError> {
        let m = order.len();
        check_permutation(&order, m)?;
        let mut pos = vec![0; m];
        for (i, &c) in order.iter().enumerate() {
            pos[c] = i;
        }
        Ok(TieBreak { order, pos })
    }

    /// Candidate indices in increasing order: the default tie-break.
    pub fn lexicographic(m: usize) -> Self {
        TieBreak::new((0..m).collect()).expect("identity is a permutation")
    }

    pub fn order(&self) -> &[CandidateId] {
        &self.order
    }

    /// Priority position; lower wins ties.
    pub fn position(&self, c: CandidateId) -> usize {
        self.pos[c]
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }
}

/// Exact scores for all candidates plus the realized tie-break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreVector {
    pub s: Vec<Rat>,
    pub tiebreak: TieBreak,
}

impl ScoreVector {
    pub fn new(s: Vec<Rat>, tiebreak: TieBreak) -> Result<Self, ModelError> {
        if s.len() != tiebreak.m() {
            return Err(ModelError::ProfileShape);
        }
        if s.iter().any(|x| x.is_negative()) {
            return Err(ModelError::NegativeScore);
        }
        Ok(ScoreVector { s, tiebreak })
    }

    pub fn m(&self) -> usize {
        self.s.len()
    }

    /// All candidates at the maximal score.
    pub fn argmax(&self) -> Vec<CandidateId> {
        let mx = self.s.iter().max().expect("nonempty");
        (0..self.m()).filter(|&c| &self.s[c] == mx).collect()
    }

    /// Plurality winner: maximal score, ties resolved by the tie-break.
    pub fn winner(&self) -> CandidateId {
        self.argmax()
            .into_iter()
            .min_by_key(|&c| self.tiebreak.position(c))
            .expect("nonempty")
    }
}

/// Strict total order over all candidates, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceOrder {
    order: Vec<CandidateId>,
    rank: Vec<usize>,
}

impl PreferenceOrder {
    pub fn new(order: Vec<CandidateId>) -> Result<Self, ModelError> {
        let m = order.len();
        check_permutation(&order, m)?;
        let mut rank = vec![0; m];
        for (i, &c) in order.iter().enumerate() {
            rank[c] = i;
        }
        Ok(PreferenceOrder { order, rank })
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[CandidateId] {
        &self.order
    }

    /// 0 for the most preferred candidate.
    pub fn rank(&self, c: CandidateId) -> usize {
        self.rank[c]
    }

    pub fn top(&self) -> CandidateId {
        self.order[0]
    }

    pub fn prefers(&self, x: CandidateId, y: CandidateId) -> bool {
        self.rank[x] < self.rank[y]
    }

    /// Most preferred member of a nonempty candidate set.
    pub fn best_of<I: IntoIterator<Item = CandidateId>>(&self, set: I) -> Option<CandidateId> {
        set.into_iter().min_by_key(|&c| self.rank[c])
    }

    /// Least preferred member of a nonempty candidate set.
    pub fn worst_of<I: IntoIterator<Item = CandidateId>>(&self, set: I) -> Option<CandidateId> {
        set.into_iter().max_by_key(|&c| self.rank[c])
    }
}

/// Cardinal utilities indexed by candidate; must strictly decrease along
/// the owner's preference order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityScale {
    pub u: Vec<Rat>,
}

impl UtilityScale {
    pub fn new(u: Vec<Rat>, prefs: &PreferenceOrder) -> Result<Self, ModelError> {
        let scale = UtilityScale { u };
        if scale.u.len() != prefs.m() || !scale.fits(prefs) {
            return Err(ModelError::UtilityMismatch);
        }
        Ok(scale)
    }

    pub fn fits(&self, prefs: &PreferenceOrder) -> bool {
        prefs.order().windows(2).all(|w| self.u[w[0]] > self.u[w[1]])
    }

    /// Default scale u(c) = m - rank(c).
    pub fn borda(prefs: &PreferenceOrder) -> Self {
        let m = prefs.m();
        UtilityScale { u: (0..m).map(|c| rat((m - prefs.rank(c)) as i64)).collect() }
    }
}

/// How a voter responds to uncertainty about the current scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Behavior {
    /// Move to any undominated candidate that dominates the current vote.
    WeakLd,
    /// Move to the most preferred such candidate.
    StrictLd,
    /// Minimize worst-case regret over the belief ball.
    Wcr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterType {
    pub prefs: PreferenceOrder,
    pub r: Rat,
    pub behavior: Behavior,
    pub utilities: Option<UtilityScale>,
    /// Optional per-step radii; entry t applies at step t, the last entry
    /// persists afterwards. Must be nonincreasing.
    pub r_schedule: Option<Vec<Rat>>,
}

impl VoterType {
    pub fn new(prefs: PreferenceOrder, r: Rat, behavior: Behavior) -> Result<Self, ModelError> {
        if r.is_negative() {
            return Err(ModelError::NegativeRadius);
        }
        Ok(VoterType { prefs, r, behavior, utilities: None, r_schedule: None })
    }

    pub fn with_utilities(mut self, u: UtilityScale) -> Result<Self, ModelError> {
        if !u.fits(&self.prefs) {
            return Err(ModelError::UtilityMismatch);
        }
        self.utilities = Some(u);
        Ok(self)
    }

    pub fn with_schedule(mut self, schedule: Vec<Rat>) -> Result<Self, ModelError> {
        if schedule.iter().any(|x| x.is_negative()) {
            return Err(ModelError::NegativeRadius);
        }
        if schedule.windows(2).any(|w| w[1] > w[0]) {
            return Err(ModelError::IncreasingSchedule);
        }
        self.r_schedule = Some(schedule);
        Ok(self)
    }

    pub fn utilities_or_default(&self) -> UtilityScale {
        self.utilities.clone().unwrap_or_else(|| UtilityScale::borda(&self.prefs))
    }

    /// Effective radius at step t.
    pub fn radius_at(&self, t: usize) -> Rat {
        match &self.r_schedule {
            Some(sched) if !sched.is_empty() => sched[t.min(sched.len() - 1)].clone(),
            _ => self.r.clone(),
        }
    }
}

/// One nonatomic type together with how many epsilon-blocks it comprises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonatomicType {
    pub ty: VoterType,
    pub blocks: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PopulationKind {
    /// Finitely many unit voters; each contributes one vote.
    Atomic { voters: Vec<VoterType> },
    /// Continuum types discretized into blocks of mass epsilon.
    Nonatomic { types: Vec<NonatomicType>, epsilon: Rat },
}

/// Fixed background scores plus the strategic voters layered on top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub base_scores: Vec<Rat>,
    pub kind: PopulationKind,
}

impl Population {
    pub fn m(&self) -> usize {
        self.base_scores.len()
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.kind, PopulationKind::Atomic { .. })
    }

    /// Number of independently scheduled agents (voters or blocks).
    pub fn agent_count(&self) -> usize {
        match &self.kind {
            PopulationKind::Atomic { voters } => voters.len(),
            PopulationKind::Nonatomic { types, .. } => {
                types.iter().map(|t| t.blocks as usize).sum()
            }
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let m = self.m();
        if self.base_scores.iter().any(|x| x.is_negative()) {
            return Err(ModelError::NegativeScore);
        }
        match &self.kind {
            PopulationKind::Atomic { voters } => {
                if !self.base_scores.iter().all(|x| x.is_integer()) {
                    return Err(ModelError::NonIntegerAtomicScore);
                }
                for v in voters {
                    if v.prefs.m() != m {
                        return Err(ModelError::ProfileShape);
                    }
                }
            }
            PopulationKind::Nonatomic { types, epsilon } => {
                if !epsilon.is_positive() {
                    return Err(ModelError::NonPositiveEpsilon);
                }
                for t in types {
                    if t.ty.prefs.m() != m {
                        return Err(ModelError::ProfileShape);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Who currently votes for what.
///
/// Atomic: one candidate per voter. Nonatomic: per type, the number of
/// epsilon-blocks on each candidate (blocks within a type are anonymous).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Profile {
    Atomic(Vec<CandidateId>),
    Nonatomic(Vec<Vec<u32>>),
}

/// Profile shape matches the population and nonatomic block counts are
/// conserved per type.
pub fn is_eps_valid(population: &Population, profile: &Profile) -> bool {
    let m = population.m();
    match (&population.kind, profile) {
        (PopulationKind::Atomic { voters }, Profile::Atomic(votes)) => {
            votes.len() == voters.len() && votes.iter().all(|&c| c < m)
        }
        (PopulationKind::Nonatomic { types, .. }, Profile::Nonatomic(counts)) => {
            counts.len() == types.len()
                && counts.iter().zip(types).all(|(row, t)| {
                    row.len() == m && row.iter().sum::<u32>() == t.blocks
                })
        }
        _ => false,
    }
}

/// Total scores: base plus every strategic vote.
pub fn scores_of(
    population: &Population,
    profile: &Profile,
    tiebreak: &TieBreak,
) -> Result<ScoreVector, ModelError> {
    if !is_eps_valid(population, profile) {
        return Err(ModelError::ProfileShape);
    }
    let mut s = population.base_scores.clone();
    match (&population.kind, profile) {
        (PopulationKind::Atomic { .. }, Profile::Atomic(votes)) => {
            for &c in votes {
                s[c] += Rat::one();
            }
        }
        (PopulationKind::Nonatomic { epsilon, .. }, Profile::Nonatomic(counts)) => {
            for row in counts {
                for (c, &n) in row.iter().enumerate() {
                    if n > 0 {
                        s[c] += epsilon * rat(n as i64);
                    }
                }
            }
        }
        _ => unreachable!("validated above"),
    }
    ScoreVector::new(s, tiebreak.clone())
}

/// Everyone votes for their most preferred candidate.
pub fn truthful_profile(population: &Population) -> Profile {
    let m = population.m();
    match &population.kind {
        PopulationKind::Atomic { voters } => {
            Profile::Atomic(voters.iter().map(|v| v.prefs.top()).collect())
        }
        PopulationKind::Nonatomic { types, .. } => Profile::Nonatomic(
            types
                .iter()
                .map(|t| {
                    let mut row = vec![0; m];
                    row[t.ty.prefs.top()] = t.blocks;
                    row
                })
                .collect(),
        ),
    }
}

pub fn zero_rat() -> Rat {
    Rat::zero()
}
